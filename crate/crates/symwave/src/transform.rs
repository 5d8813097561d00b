//! Discrete filter-bank transforms on sampled data, cascade evaluation of
//! refinable functions, and the approximation-order experiment.
//!
//! Exact mode stores grids as Laurent polynomials (keys are sample
//! positions), so perfect reconstruction is literal equality. Float mode
//! lowers the same filters to f64.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::extension::FilterBank;
use crate::gauss::{rat_to_f64, GaussRat, Rat};
use crate::lattice::DilationContext;
use crate::laurent::{Key, LaurentPoly};
use crate::mat::{IMat, RMat};

/// Boundary policy. Zero extension keeps reconstruction exact for free;
/// periodization is supported for diagonal dilations whose entries divide
/// the box at every level.
#[derive(Clone, Debug)]
pub enum Boundary {
    ZeroExtend,
    Periodic(Vec<i64>),
}

fn wrap_key(key: &mut Key, boundary: &Boundary) {
    if let Boundary::Periodic(box_dims) = boundary {
        for (k, n) in key.iter_mut().zip(box_dims) {
            *k = k.rem_euclid(*n);
        }
    }
}

fn coarse_boundary(boundary: &Boundary, ctx: &DilationContext) -> Result<Boundary> {
    match boundary {
        Boundary::ZeroExtend => Ok(Boundary::ZeroExtend),
        Boundary::Periodic(dims) => {
            let d = ctx.dim();
            let mut out = Vec::with_capacity(d);
            for l in 0..d {
                let g = ctx.mat.at(l, l);
                let off_diag = (0..d).any(|c| c != l && ctx.mat.at(l, c) != 0);
                if off_diag || g == 0 || dims[l] % g.abs() != 0 {
                    return Err(Error::SymmetryPreconditionFailed(
                        "periodic mode needs a diagonal dilation dividing the box".into(),
                    ));
                }
                out.push(dims[l] / g.abs());
            }
            Ok(Boundary::Periodic(out))
        }
    }
}

fn periodize(t: &LaurentPoly, boundary: &Boundary) -> LaurentPoly {
    match boundary {
        Boundary::ZeroExtend => t.clone(),
        Boundary::Periodic(_) => {
            let mut acc = LaurentPoly::zero(t.dim());
            for (k, c) in t.iter() {
                let mut key = k.clone();
                wrap_key(&mut key, boundary);
                let term = LaurentPoly::monomial(key, c.clone());
                let term = match t.root() {
                    None => term,
                    Some(b) => term.mul_sqrt(b, 1),
                };
                acc = acc.add(&term).expect("same offsets");
            }
            acc
        }
    }
}

/// Keep only the sublattice samples: out[p] = t[M p].
pub fn downsample(t: &LaurentPoly, ctx: &DilationContext) -> LaurentPoly {
    let mut acc = LaurentPoly::zero(t.dim());
    for (k, c) in t.iter() {
        if let Some(p) = ctx.preimage(k) {
            let term = LaurentPoly::monomial(p, c.clone());
            let term = match t.root() {
                None => term,
                Some(b) => term.mul_sqrt(b, 1),
            };
            acc = acc.add(&term).expect("integer keys");
        }
    }
    acc
}

/// Spread samples onto the sublattice: out[M p] = t[p].
pub fn upsample(t: &LaurentPoly, ctx: &DilationContext) -> LaurentPoly {
    let mut acc = LaurentPoly::zero(t.dim());
    for (k, c) in t.iter() {
        let term = LaurentPoly::monomial(ctx.mat.mul_vec(k), c.clone());
        let term = match t.root() {
            None => term,
            Some(b) => term.mul_sqrt(b, 1),
        };
        acc = acc.add(&term).expect("integer keys");
    }
    acc
}

/// Coefficient pyramid in exact arithmetic. `details[j][nu]` holds the
/// level-j band of wavelet nu (j = 0 is the finest level).
#[derive(Clone, Debug)]
pub struct ExactPyramid {
    pub approx: LaurentPoly,
    pub details: Vec<Vec<LaurentPoly>>,
}

fn analysis_step(
    data: &LaurentPoly,
    filter: &LaurentPoly,
    ctx: &DilationContext,
    boundary: &Boundary,
) -> Result<LaurentPoly> {
    let corr = data.mul(&filter.conj_reflect())?;
    Ok(downsample(&periodize(&corr, boundary), ctx))
}

fn synthesis_step(
    coeffs: &LaurentPoly,
    filter: &LaurentPoly,
    ctx: &DilationContext,
    boundary: &Boundary,
) -> Result<LaurentPoly> {
    let up = upsample(coeffs, ctx);
    Ok(periodize(&up.mul(filter)?, boundary))
}

/// Correlate with the dual filters and downsample, recursing on the
/// approximation band.
pub fn analyze_exact(
    bank: &FilterBank,
    data: &LaurentPoly,
    levels: usize,
    boundary: &Boundary,
) -> Result<ExactPyramid> {
    if data.dim() != bank.ctx.dim() {
        return Err(Error::DimMismatch(data.dim(), bank.ctx.dim()));
    }
    let ctx = &bank.ctx;
    let mut approx = periodize(data, boundary);
    let mut details = Vec::with_capacity(levels);
    let mut bd = boundary.clone();
    for _ in 0..levels {
        let mut bands = Vec::with_capacity(ctx.m);
        for w in &bank.wavelets {
            bands.push(analysis_step(&approx, &w.dual.poly, ctx, &bd)?);
        }
        let next = analysis_step(&approx, &bank.refinable.dual.poly, ctx, &bd)?;
        details.push(bands);
        approx = next;
        bd = coarse_boundary(&bd, ctx)?;
    }
    Ok(ExactPyramid { approx, details })
}

/// Upsample, filter with the primal masks, and merge; the exact inverse of
/// `analyze_exact` on finitely supported data.
pub fn synthesize_exact(
    bank: &FilterBank,
    pyr: &ExactPyramid,
    boundary: &Boundary,
) -> Result<LaurentPoly> {
    let ctx = &bank.ctx;
    let m_scale = GaussRat::real(Rat::from_integer((ctx.m as i64).into()));
    // boundary per level, finest first
    let mut boundaries = vec![boundary.clone()];
    for _ in 0..pyr.details.len() {
        let last = boundaries.last().unwrap().clone();
        boundaries.push(coarse_boundary(&last, ctx)?);
    }
    let mut acc = pyr.approx.clone();
    for (j, bands) in pyr.details.iter().enumerate().rev() {
        let bd = &boundaries[j];
        let mut level = synthesis_step(&acc, &bank.refinable.primal.poly, ctx, bd)?;
        for (w, band) in bank.wavelets.iter().zip(bands) {
            level = level.add(&synthesis_step(band, &w.primal.poly, ctx, bd)?)?;
        }
        acc = level.scalar_mul(&m_scale);
    }
    Ok(acc)
}

/// Float grid for the lowered pipeline.
pub type FloatGrid = HashMap<Key, f64>;

#[derive(Clone, Debug)]
pub struct FloatPyramid {
    pub approx: FloatGrid,
    pub details: Vec<Vec<FloatGrid>>,
}

fn filter_f64(t: &LaurentPoly) -> Result<Vec<(Key, f64)>> {
    t.to_real_f64()
}

fn analysis_step_f64(
    data: &FloatGrid,
    filter: &[(Key, f64)],
    ctx: &DilationContext,
    boundary: &Boundary,
) -> FloatGrid {
    // c[p] = sum_x data[x] h[x - Mp]
    let mut out = FloatGrid::new();
    for (x, &v) in data {
        for (k, h) in filter {
            let shifted: Vec<i64> = x.iter().zip(k).map(|(a, b)| a - b).collect();
            if let Some(p) = ctx.preimage(&shifted) {
                let mut p = p;
                wrap_key(&mut p, boundary);
                *out.entry(p).or_insert(0.0) += v * h;
            }
        }
    }
    out
}

fn synthesis_step_f64(
    coeffs: &FloatGrid,
    filter: &[(Key, f64)],
    ctx: &DilationContext,
    boundary: &Boundary,
) -> FloatGrid {
    let mut out = FloatGrid::new();
    for (p, &v) in coeffs {
        let base = ctx.mat.mul_vec(p);
        for (k, h) in filter {
            let mut key: Vec<i64> = base.iter().zip(k).map(|(a, b)| a + b).collect();
            wrap_key(&mut key, boundary);
            *out.entry(key).or_insert(0.0) += v * h;
        }
    }
    out
}

pub fn analyze_f64(
    bank: &FilterBank,
    data: &FloatGrid,
    levels: usize,
    boundary: &Boundary,
) -> Result<FloatPyramid> {
    let ctx = &bank.ctx;
    let duals: Vec<Vec<(Key, f64)>> = bank
        .wavelets
        .iter()
        .map(|w| filter_f64(&w.dual.poly))
        .collect::<Result<_>>()?;
    let dual0 = filter_f64(&bank.refinable.dual.poly)?;
    let mut approx = data.clone();
    let mut details = Vec::with_capacity(levels);
    let mut bd = boundary.clone();
    for _ in 0..levels {
        let mut bands = Vec::with_capacity(ctx.m);
        for f in &duals {
            bands.push(analysis_step_f64(&approx, f, ctx, &bd));
        }
        let next = analysis_step_f64(&approx, &dual0, ctx, &bd);
        details.push(bands);
        approx = next;
        bd = coarse_boundary(&bd, ctx)?;
    }
    Ok(FloatPyramid { approx, details })
}

pub fn synthesize_f64(
    bank: &FilterBank,
    pyr: &FloatPyramid,
    boundary: &Boundary,
) -> Result<FloatGrid> {
    let ctx = &bank.ctx;
    let primals: Vec<Vec<(Key, f64)>> = bank
        .wavelets
        .iter()
        .map(|w| filter_f64(&w.primal.poly))
        .collect::<Result<_>>()?;
    let primal0 = filter_f64(&bank.refinable.primal.poly)?;
    let mut boundaries = vec![boundary.clone()];
    for _ in 0..pyr.details.len() {
        let last = boundaries.last().unwrap().clone();
        boundaries.push(coarse_boundary(&last, ctx)?);
    }
    let mut acc = pyr.approx.clone();
    for (j, bands) in pyr.details.iter().enumerate().rev() {
        let bd = &boundaries[j];
        let mut level = synthesis_step_f64(&acc, &primal0, ctx, bd);
        for (f, band) in primals.iter().zip(bands) {
            for (k, v) in synthesis_step_f64(band, f, ctx, bd) {
                *level.entry(k).or_insert(0.0) += v;
            }
        }
        for v in level.values_mut() {
            *v *= ctx.m as f64;
        }
        acc = level;
    }
    Ok(acc)
}

/// Subdivision values approximating the refinable function on M^{-j} Z^d:
/// the returned polynomial's coefficient at key a is the value at M^{-j} a.
/// The total mass sum * m^{-j} stays exactly 1 when m0(0) = 1.
pub fn cascade_exact(m0: &LaurentPoly, ctx: &DilationContext, levels: usize) -> LaurentPoly {
    let d = ctx.dim();
    let m_scale = GaussRat::real(Rat::from_integer((ctx.m as i64).into()));
    let mut c = LaurentPoly::one(d);
    for _ in 0..levels {
        let up = upsample(&c, ctx);
        c = up.mul(m0).expect("same dims").scalar_mul(&m_scale);
    }
    c
}

/// Dense float grid over an integer box.
#[derive(Clone, Debug)]
pub struct DenseGrid {
    pub lo: Vec<i64>,
    pub dims: Vec<usize>,
    pub data: Vec<f64>,
}

impl DenseGrid {
    fn zeros(lo: Vec<i64>, hi: &[i64]) -> Self {
        let dims: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| usize::try_from(b - a + 1).unwrap())
            .collect();
        let total: usize = dims.iter().product();
        DenseGrid {
            lo,
            dims,
            data: vec![0.0; total],
        }
    }

    fn offset(&self, idx: &[i64]) -> Option<usize> {
        let mut acc = 0usize;
        for (l, &x) in idx.iter().enumerate() {
            let rel = x - self.lo[l];
            if rel < 0 || rel as usize >= self.dims[l] {
                return None;
            }
            acc = acc * self.dims[l] + rel as usize;
        }
        Some(acc)
    }

    pub fn get(&self, idx: &[i64]) -> f64 {
        self.offset(idx).map(|o| self.data[o]).unwrap_or(0.0)
    }

    fn add(&mut self, idx: &[i64], v: f64) {
        if let Some(o) = self.offset(idx) {
            self.data[o] += v;
        }
    }

    fn iter_indices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let dims = self.dims.clone();
        let lo = self.lo.clone();
        let total: usize = dims.iter().product();
        (0..total).map(move |mut flat| {
            let mut idx = vec![0i64; dims.len()];
            for l in (0..dims.len()).rev() {
                idx[l] = lo[l] + (flat % dims[l]) as i64;
                flat /= dims[l];
            }
            idx
        })
    }
}

fn box_map(mat: &IMat, lo: &[i64], hi: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let d = mat.d;
    let mut out_lo = vec![0i64; d];
    let mut out_hi = vec![0i64; d];
    for r in 0..d {
        let mut a = 0i64;
        let mut b = 0i64;
        for c in 0..d {
            let e = mat.at(r, c);
            if e >= 0 {
                a += e * lo[c];
                b += e * hi[c];
            } else {
                a += e * hi[c];
                b += e * lo[c];
            }
        }
        out_lo[r] = a;
        out_hi[r] = b;
    }
    (out_lo, out_hi)
}

/// Dense float cascade to the given depth.
pub fn cascade_f64(m0: &LaurentPoly, ctx: &DilationContext, levels: usize) -> Result<DenseGrid> {
    let d = ctx.dim();
    let taps = m0.to_real_f64()?;
    let (h_lo, h_hi) = match m0.support_box_twice() {
        Some((lo, hi)) => (
            lo.iter().map(|x| x.div_euclid(2)).collect::<Vec<i64>>(),
            hi.iter().map(|x| (x + 1).div_euclid(2)).collect::<Vec<i64>>(),
        ),
        None => (vec![0; d], vec![0; d]),
    };
    let mut grid = DenseGrid::zeros(vec![0; d], &vec![0; d]);
    grid.data[0] = 1.0;
    let mf = ctx.m as f64;
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for _ in 0..levels {
        let (mlo, mhi) = box_map(&ctx.mat, &lo, &hi);
        let new_lo: Vec<i64> = mlo.iter().zip(&h_lo).map(|(a, b)| a + b).collect();
        let new_hi: Vec<i64> = mhi.iter().zip(&h_hi).map(|(a, b)| a + b).collect();
        let mut next = DenseGrid::zeros(new_lo.clone(), &new_hi);
        for beta in grid.iter_indices() {
            let v = grid.get(&beta);
            if v == 0.0 {
                continue;
            }
            let base = ctx.mat.mul_vec(&beta);
            for (k, h) in &taps {
                let idx: Vec<i64> = base.iter().zip(k).map(|(a, b)| a + b).collect();
                next.add(&idx, mf * h * v);
            }
        }
        grid = next;
        lo = new_lo;
        hi = new_hi;
    }
    Ok(grid)
}

/// Result of the approximation-order experiment: grid errors per level and
/// the fitted slope of log(error) against the level.
#[derive(Clone, Debug)]
pub struct ApproxOrderResult {
    pub levels: Vec<u32>,
    pub errors: Vec<f64>,
    pub ratios: Vec<f64>,
    pub slope: f64,
}

pub struct ApproxExperimentCfg {
    pub levels: Vec<u32>,
    /// Sampling box per coordinate (real coordinates).
    pub domain: Vec<(f64, f64)>,
    /// Interior margin excluded from the error norm (keeps boundary effects
    /// of the zero extension out of the measurement).
    pub margin: f64,
    /// Relative cascade depth used to approximate a non-delta dual.
    pub dual_quadrature_depth: u32,
}

fn rmat_to_f64(m: &RMat) -> Vec<f64> {
    m.a.iter().map(rat_to_f64).collect()
}

fn apply_f64(mat: &[f64], d: usize, v: &[f64]) -> Vec<f64> {
    (0..d)
        .map(|r| (0..d).map(|c| mat[r * d + c] * v[c]).sum())
        .collect()
}

/// Measure ||f - P_j f||_2 on a fine grid for each level j, where P_j is
/// the projection onto the span of the level-j refinable translates with
/// dual-side coefficients, and fit the decay slope.
pub fn approx_order_experiment(
    bank: &FilterBank,
    f: &dyn Fn(&[f64]) -> f64,
    cfg: &ApproxExperimentCfg,
) -> Result<ApproxOrderResult> {
    let ctx = &bank.ctx;
    let d = ctx.dim();
    let j_max = *cfg.levels.iter().max().unwrap_or(&1);
    let big_l = j_max + 2;
    let depth = big_l + 2;
    let phi = cascade_f64(&bank.refinable.primal.poly, ctx, depth as usize)?;
    // dual side: a single-coefficient dual acts as point sampling; anything
    // larger is integrated against its own cascade approximation
    let mt0 = &bank.refinable.dual.poly;
    let delta_dual = mt0.num_terms() == 1 && mt0.sigma_is_zero();
    let dual_shift: Vec<i64> = if delta_dual {
        mt0.iter().next().map(|(k, _)| k.clone()).unwrap()
    } else {
        vec![0; d]
    };
    let dual_scale: f64 = if delta_dual {
        let (re, im) = mt0.iter().next().unwrap().1.to_f64_pair();
        let root = mt0.root().map(|b| (b as f64).sqrt()).unwrap_or(1.0);
        if im != 0.0 {
            return Err(Error::NonFiniteSamples);
        }
        re * root
    } else {
        1.0
    };
    let phit = if delta_dual {
        None
    } else {
        Some(cascade_f64(mt0, ctx, cfg.dual_quadrature_depth as usize)?)
    };
    let minv_f: Vec<f64> = rmat_to_f64(&ctx.minv);
    let m_pow = |e: u32| -> IMat { ctx.mat.pow(e) };
    let minv_pow = |e: u32| -> Vec<f64> {
        let mut acc = vec![0.0; d * d];
        for i in 0..d {
            acc[i * d + i] = 1.0;
        }
        for _ in 0..e {
            let mut next = vec![0.0; d * d];
            for r in 0..d {
                for c in 0..d {
                    for k in 0..d {
                        next[r * d + c] += minv_f[r * d + k] * acc[k * d + c];
                    }
                }
            }
            acc = next;
        }
        acc
    };
    // evaluation points: integer y with M^{-L} y inside the trimmed domain
    let m_l = m_pow(big_l);
    let minv_l = minv_pow(big_l);
    let core: Vec<(f64, f64)> = cfg
        .domain
        .iter()
        .map(|(a, b)| (a + cfg.margin, b - cfg.margin))
        .collect();
    let corner_box = {
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for corner in 0..(1u32 << d) {
            let x: Vec<f64> = (0..d)
                .map(|l| {
                    if (corner >> l) & 1 == 1 {
                        core[l].1
                    } else {
                        core[l].0
                    }
                })
                .collect();
            let y: Vec<f64> = (0..d)
                .map(|r| (0..d).map(|c| m_l.at(r, c) as f64 * x[c]).sum())
                .collect();
            for l in 0..d {
                lo[l] = lo[l].min(y[l].floor() as i64 - 1);
                hi[l] = hi[l].max(y[l].ceil() as i64 + 1);
            }
        }
        (lo, hi)
    };
    let mut points: Vec<(Vec<i64>, Vec<f64>)> = Vec::new();
    let (lo, hi) = corner_box;
    let mut cursor = lo.clone();
    'outer: loop {
        let x = apply_f64(&minv_l, d, &cursor.iter().map(|&v| v as f64).collect::<Vec<f64>>());
        if x.iter()
            .zip(&core)
            .all(|(xi, (a, b))| *xi >= *a && *xi <= *b)
        {
            points.push((cursor.clone(), x));
        }
        for l in (0..d).rev() {
            cursor[l] += 1;
            if cursor[l] <= hi[l] {
                continue 'outer;
            }
            cursor[l] = lo[l];
        }
        break;
    }
    if points.is_empty() {
        return Err(Error::NonFiniteSamples);
    }
    let mf = ctx.m as f64;
    let mut errors = Vec::with_capacity(cfg.levels.len());
    for &j in &cfg.levels {
        let minv_j = minv_pow(j);
        // dual coefficients c_q = <f, dual translate>
        let coef = |q: &[i64]| -> f64 {
            if delta_dual {
                // duals concentrated at a point: a shifted sample of f
                let arg: Vec<i64> = q.iter().zip(&dual_shift).map(|(a, b)| a - b).collect();
                let x = apply_f64(&minv_j, d, &arg.iter().map(|&v| v as f64).collect::<Vec<f64>>());
                dual_scale * f(&x)
            } else {
                let phit = phit.as_ref().unwrap();
                let q_depth = cfg.dual_quadrature_depth;
                let minv_jq = minv_pow(j + q_depth);
                let mut acc = 0.0;
                let m_q = m_pow(q_depth);
                for alpha in phit.iter_indices() {
                    let w = phit.get(&alpha);
                    if w == 0.0 {
                        continue;
                    }
                    // f(M^{-j}(M^{-q} alpha - q_vec)) with q_vec = q
                    let shifted: Vec<f64> = alpha
                        .iter()
                        .zip(m_q.mul_vec(q))
                        .map(|(a, b)| *a as f64 - b as f64)
                        .collect();
                    let x = apply_f64(&minv_jq, d, &shifted);
                    acc += w * f(&x);
                }
                acc * mf.powi(-(q_depth as i32))
            }
        };
        // P_j f at the evaluation points
        let m_dl = m_pow(depth - big_l + j);
        let m_d = m_pow(depth);
        let minv_d_f = minv_pow(depth);
        let mut sum_sq = 0.0;
        for (y, x) in &points {
            let fx = f(x);
            if !fx.is_finite() {
                return Err(Error::NonFiniteSamples);
            }
            // q range: cascade support around M^{j-L} y
            let anchor = m_dl.mul_vec(y);
            let mut q_lo = vec![i64::MAX; d];
            let mut q_hi = vec![i64::MIN; d];
            for corner in 0..(1u32 << d) {
                let idx: Vec<f64> = (0..d)
                    .map(|l| {
                        let end = if (corner >> l) & 1 == 1 {
                            phi.lo[l] + phi.dims[l] as i64 - 1
                        } else {
                            phi.lo[l]
                        };
                        (anchor[l] - end) as f64
                    })
                    .collect();
                let q = apply_f64(&minv_d_f, d, &idx);
                for l in 0..d {
                    q_lo[l] = q_lo[l].min(q[l].floor() as i64 - 1);
                    q_hi[l] = q_hi[l].max(q[l].ceil() as i64 + 1);
                }
            }
            let mut pj = 0.0;
            let mut qc = q_lo.clone();
            'qloop: loop {
                let idx: Vec<i64> = anchor
                    .iter()
                    .zip(m_d.mul_vec(&qc))
                    .map(|(a, b)| a - b)
                    .collect();
                let phi_v = phi.get(&idx);
                if phi_v != 0.0 {
                    pj += coef(&qc) * phi_v;
                }
                for l in (0..d).rev() {
                    qc[l] += 1;
                    if qc[l] <= q_hi[l] {
                        continue 'qloop;
                    }
                    qc[l] = q_lo[l];
                }
                break;
            }
            let diff = fx - pj;
            sum_sq += diff * diff;
        }
        let cell = mf.powi(-(big_l as i32));
        errors.push((sum_sq * cell).sqrt());
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    // least-squares slope of ln(error) against level
    let n = cfg.levels.len() as f64;
    let xs: Vec<f64> = cfg.levels.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.max(1e-300).ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    Ok(ApproxOrderResult {
        levels: cfg.levels.clone(),
        errors,
        ratios,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{bank_from_masks, orbits_from_point, BankSymmetryKind};
    use crate::gauss::rat;
    use crate::lattice::pair_digits;
    use crate::mat::HalfVec;

    fn hat() -> LaurentPoly {
        LaurentPoly::monomial(vec![-1], GaussRat::real(rat(1, 4)))
            .add(&LaurentPoly::monomial(vec![0], GaussRat::real(rat(1, 2))))
            .unwrap()
            .add(&LaurentPoly::monomial(vec![1], GaussRat::real(rat(1, 4))))
            .unwrap()
    }

    fn hat_bank() -> FilterBank {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::zero(1)).unwrap();
        let orbits = orbits_from_point(&part);
        bank_from_masks(
            &ctx2,
            &hat(),
            &LaurentPoly::one(1),
            &orbits,
            BankSymmetryKind::PointA,
            HalfVec::zero(1),
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn exact_round_trip_delta() {
        let bank = hat_bank();
        let delta = LaurentPoly::one(1);
        let pyr = analyze_exact(&bank, &delta, 1, &Boundary::ZeroExtend).unwrap();
        let back = synthesize_exact(&bank, &pyr, &Boundary::ZeroExtend).unwrap();
        assert_eq!(back, delta);
    }

    #[test]
    fn exact_round_trip_multi_level() {
        let bank = hat_bank();
        let mut data = LaurentPoly::zero(1);
        for (k, v) in [(0i64, 3i64), (1, -2), (2, 7), (5, 1), (-3, 4)] {
            data = data
                .add(&LaurentPoly::monomial(vec![k], GaussRat::from_i64(v)))
                .unwrap();
        }
        let pyr = analyze_exact(&bank, &data, 3, &Boundary::ZeroExtend).unwrap();
        let back = synthesize_exact(&bank, &pyr, &Boundary::ZeroExtend).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn float_round_trip() {
        let bank = hat_bank();
        let mut data = FloatGrid::new();
        for k in -8..8i64 {
            data.insert(vec![k], (k as f64 * 0.7).sin());
        }
        let pyr = analyze_f64(&bank, &data, 2, &Boundary::ZeroExtend).unwrap();
        let back = synthesize_f64(&bank, &pyr, &Boundary::ZeroExtend).unwrap();
        for (k, v) in &data {
            assert!((back.get(k).unwrap() - v).abs() < 1e-12);
        }
        for (k, v) in &back {
            if data.get(k).is_none() {
                assert!(v.abs() < 1e-12, "spurious {v} at {k:?}");
            }
        }
    }

    #[test]
    fn cascade_hat_values() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let c = cascade_exact(&hat(), &ctx, 3);
        // value 1 at 0, 1/2 at +-1/2 (index +-4 at depth 3), 1/4 at +-3/4
        assert_eq!(c.coeff(&[0]), GaussRat::one());
        assert_eq!(c.coeff(&[4]), GaussRat::real(rat(1, 2)));
        assert_eq!(c.coeff(&[-4]), GaussRat::real(rat(1, 2)));
        assert_eq!(c.coeff(&[6]), GaussRat::real(rat(1, 4)));
        // mass: sum * m^{-3} = 1
        let total = c.value_at_zero();
        assert_eq!(
            total,
            crate::gauss::Scaled::rational(GaussRat::from_i64(8))
        );
    }

    #[test]
    fn cascade_haar_indicator() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let haar = LaurentPoly::monomial(vec![0], GaussRat::real(rat(1, 2)))
            .add(&LaurentPoly::monomial(vec![1], GaussRat::real(rat(1, 2))))
            .unwrap();
        let c = cascade_exact(&haar, &ctx, 4);
        for (_, v) in c.iter() {
            assert_eq!(*v, GaussRat::one());
        }
    }

    #[test]
    fn hat_approximation_order_two() {
        let bank = hat_bank();
        let f = |x: &[f64]| (2.0 * std::f64::consts::PI * x[0]).sin();
        let cfg = ApproxExperimentCfg {
            levels: vec![1, 2, 3, 4, 5],
            domain: vec![(-1.0, 1.0)],
            margin: 0.25,
            dual_quadrature_depth: 4,
        };
        let res = approx_order_experiment(&bank, &f, &cfg).unwrap();
        let target = -2.0 * (2.0f64).ln();
        assert!(
            (res.slope - target).abs() <= 0.15 * target.abs(),
            "slope {} vs {}",
            res.slope,
            target
        );
    }

    #[test]
    fn polynomial_reproduction_floor() {
        let bank = hat_bank();
        let f = |x: &[f64]| 3.0 * x[0] + 0.5;
        let cfg = ApproxExperimentCfg {
            levels: vec![1, 2, 3],
            domain: vec![(-1.0, 1.0)],
            margin: 0.25,
            dual_quadrature_depth: 4,
        };
        let res = approx_order_experiment(&bank, &f, &cfg).unwrap();
        for e in &res.errors {
            assert!(*e < 1e-10, "error {e}");
        }
    }
}
