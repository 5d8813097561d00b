//! Integer-lattice machinery: dilation matrices, coset digit sets, and the
//! digit partitions used by the symmetric mask constructions.

use num::One;

use crate::error::{Error, Result};
use crate::gauss::{rat_i64, Rat};
use crate::mat::{all_roots_outside_unit_disk, to_integer_vec, HalfVec, IMat, RMat};

/// A dilation matrix together with its digit set (one representative per
/// coset of Z^d modulo M Z^d).
#[derive(Clone, PartialEq, Debug)]
pub struct DilationContext {
    pub mat: IMat,
    pub m: usize,
    pub digits: Vec<Vec<i64>>,
    pub minv: RMat,
}

impl DilationContext {
    /// Build a context with the default digit set: the representatives with
    /// M^{-1} s in [0,1)^d, listed lexicographically.
    pub fn new(mat: IMat) -> Result<Self> {
        let (m, minv) = validate_dilation(&mat)?;
        let digits = default_digits(&mat, &minv, m);
        debug_assert_eq!(digits.len(), m);
        Ok(DilationContext {
            mat,
            m,
            digits,
            minv,
        })
    }

    /// Build a context with a caller-supplied digit set (must contain exactly
    /// one representative per coset).
    pub fn with_digits(mat: IMat, digits: Vec<Vec<i64>>) -> Result<Self> {
        let (m, minv) = validate_dilation(&mat)?;
        if digits.len() != m {
            return Err(Error::BadDigits(format!(
                "expected {m} digits, got {}",
                digits.len()
            )));
        }
        for (i, a) in digits.iter().enumerate() {
            if a.len() != mat.d {
                return Err(Error::BadDigits(format!("digit {i} has wrong dimension")));
            }
            for b in digits.iter().take(i) {
                let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                if is_in_lattice(&minv, &diff) {
                    return Err(Error::BadDigits(format!(
                        "digits {b:?} and {a:?} are congruent modulo M"
                    )));
                }
            }
        }
        Ok(DilationContext {
            mat,
            m,
            digits,
            minv,
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.d
    }

    /// Index k with v congruent to digit s_k modulo M. Total on Z^d.
    pub fn coset_index(&self, v: &[i64]) -> usize {
        for (k, s) in self.digits.iter().enumerate() {
            let diff: Vec<i64> = v.iter().zip(s).map(|(x, y)| x - y).collect();
            if is_in_lattice(&self.minv, &diff) {
                return k;
            }
        }
        unreachable!("digit set does not cover Z^d");
    }

    /// Solve M x = v exactly; Some(x) when v is in the sublattice M Z^d.
    pub fn preimage(&self, v: &[i64]) -> Option<Vec<i64>> {
        to_integer_vec(&self.minv.mul_ivec(v))
    }

    /// M^{-1} v as exact rationals.
    pub fn minv_vec(&self, v: &[i64]) -> Vec<Rat> {
        self.minv.mul_ivec(v)
    }

    /// M^{-1}(c - s_k) for a half-integer c, as exact rationals.
    pub fn minv_center_offset(&self, c: &HalfVec, k: usize) -> Vec<Rat> {
        let diff: Vec<Rat> = c
            .as_rats()
            .iter()
            .zip(&self.digits[k])
            .map(|(a, &b)| a - rat_i64(b))
            .collect();
        self.minv.mul_rvec(&diff)
    }
}

fn validate_dilation(mat: &IMat) -> Result<(usize, RMat)> {
    let det = mat.det();
    let m_abs = det.unsigned_abs();
    if m_abs <= 1 {
        return Err(Error::Unimodular(det));
    }
    if !all_roots_outside_unit_disk(&mat.char_poly()) {
        return Err(Error::NotExpanding);
    }
    let minv = mat.inverse().expect("nonzero determinant");
    Ok((m_abs as usize, minv))
}

fn is_in_lattice(minv: &RMat, v: &[i64]) -> bool {
    minv.mul_ivec(v).iter().all(|x| x.denom().is_one())
}

fn default_digits(mat: &IMat, minv: &RMat, m: usize) -> Vec<Vec<i64>> {
    // candidates live in the integer bounding box of M [0,1)^d
    let d = mat.d;
    let mut lo = vec![0i64; d];
    let mut hi = vec![0i64; d];
    for corner in 0..(1u32 << d) {
        let x: Vec<i64> = (0..d).map(|l| ((corner >> l) & 1) as i64).collect();
        let img = mat.mul_vec(&x);
        for l in 0..d {
            lo[l] = lo[l].min(img[l]);
            hi[l] = hi[l].max(img[l]);
        }
    }
    let mut out = Vec::with_capacity(m);
    let mut cursor = lo.clone();
    'outer: loop {
        let x = minv.mul_ivec(&cursor);
        if x.iter().all(|r| !num::Signed::is_negative(r) && *r < Rat::one()) {
            out.push(cursor.clone());
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
    out.sort();
    debug_assert_eq!(out.len(), m);
    out
}

/// Digit classification for point symmetry about a half-integer center c:
/// J holds the self-paired indices (M^{-1}(2c - 2 s_j) integral), the rest
/// split into pairs (i, i') with s_i + s_i' = 2c exactly after the digit
/// adjustment performed by [`pair_digits`].
#[derive(Clone, Debug)]
pub struct PointDigitPartition {
    pub center: HalfVec,
    pub j_set: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

impl PointDigitPartition {
    pub fn i1(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(i, _)| i).collect()
    }

    pub fn i2(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(_, i)| i).collect()
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        for &(a, b) in &self.pairs {
            if a == i {
                return Some(b);
            }
            if b == i {
                return Some(a);
            }
        }
        None
    }
}

/// Classify digits for point symmetry about `c` and adjust the paired
/// representatives so that s_i + s_i' = 2c holds exactly. Returns the
/// updated context and the partition.
pub fn pair_digits(
    ctx: &DilationContext,
    c: &HalfVec,
) -> Result<(DilationContext, PointDigitPartition)> {
    if c.dim() != ctx.dim() {
        return Err(Error::DimMismatch(c.dim(), ctx.dim()));
    }
    // 2c is integral by construction of HalfVec
    let twoc: Vec<i64> = c.twice.clone();
    let mut digits = ctx.digits.clone();
    let mut j_set = Vec::new();
    let mut pairs = Vec::new();
    let mut assigned = vec![false; ctx.m];
    for i in 0..ctx.m {
        if assigned[i] {
            continue;
        }
        // the unique partner l with M^{-1}(2c - s_i - s_l) integral
        let mut partner = None;
        for l in 0..ctx.m {
            let target: Vec<i64> = (0..ctx.dim())
                .map(|t| twoc[t] - digits[i][t] - digits[l][t])
                .collect();
            if let Some(w) = ctx.preimage(&target) {
                partner = Some((l, w));
                break;
            }
        }
        let (l, w) =
            partner.ok_or_else(|| Error::BadDigits("no partner digit found".into()))?;
        if l == i {
            j_set.push(i);
            assigned[i] = true;
        } else {
            // replace s_l by s_l + M w so the pair reflects exactly through c
            let mw = ctx.mat.mul_vec(&w);
            for t in 0..ctx.dim() {
                digits[l][t] += mw[t];
            }
            debug_assert!((0..ctx.dim())
                .all(|t| digits[i][t] + digits[l][t] == twoc[t]));
            pairs.push((i, l));
            assigned[i] = true;
            assigned[l] = true;
        }
    }
    let new_ctx = DilationContext::with_digits(ctx.mat.clone(), digits)?;
    Ok((
        new_ctx,
        PointDigitPartition {
            center: c.clone(),
            j_set,
            pairs,
        },
    ))
}

/// Which of the four parity cases a diagonal dilation falls into.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AxialParities {
    pub d1_even: bool,
    pub d2_even: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CenterKind {
    Integer,
    SemiInteger,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PairFamily {
    R,
    Q,
    T,
    U,
}

/// One orbit of digit indices under the axial group action. Quads list the
/// roles (k, k', k'', k''') in order; pairs list (leader, follower).
#[derive(Clone, Debug)]
pub enum AxialOrbit {
    Single { idx: usize },
    Pair { family: PairFamily, lead: usize, follow: usize },
    Quad { k: usize, k1: usize, k2: usize, k3: usize },
}

/// Digit families for the axial constructions on diagonal 2x2 dilations.
#[derive(Clone, Debug)]
pub struct AxialDigitPartition {
    pub center_kind: CenterKind,
    pub parities: AxialParities,
    pub orbits: Vec<AxialOrbit>,
    /// Swapped-coordinate handling for antidiagonal dilations.
    pub swapped: bool,
}

impl AxialDigitPartition {
    pub fn center(&self, _d: usize) -> HalfVec {
        match self.center_kind {
            CenterKind::Integer => HalfVec::from_twice(vec![0, 0]),
            CenterKind::SemiInteger => HalfVec::from_twice(vec![1, 1]),
        }
    }

    pub fn family_indices(&self, family: PairFamily, lead: bool) -> Vec<usize> {
        self.orbits
            .iter()
            .filter_map(|o| match o {
                AxialOrbit::Pair { family: f, lead: a, follow: b } if *f == family => {
                    Some(if lead { *a } else { *b })
                }
                _ => None,
            })
            .collect()
    }

    pub fn singles(&self) -> Vec<usize> {
        self.orbits
            .iter()
            .filter_map(|o| match o {
                AxialOrbit::Single { idx } => Some(*idx),
                _ => None,
            })
            .collect()
    }
}

/// Detect the axial shape of M: Some((gamma1, gamma2, antidiagonal)).
pub fn axial_shape(mat: &IMat) -> Option<(i64, i64, bool)> {
    if mat.d != 2 {
        return None;
    }
    if mat.at(0, 1) == 0 && mat.at(1, 0) == 0 {
        Some((mat.at(0, 0), mat.at(1, 1), false))
    } else if mat.at(0, 0) == 0 && mat.at(1, 1) == 0 {
        Some((mat.at(0, 1), mat.at(1, 0), true))
    } else {
        None
    }
}

/// Build the rectangular digit set and family partition of a diagonal (or
/// antidiagonal, via coordinate swap) dilation for the axial construction.
/// Replaces the context digit set.
pub fn axial_partition(
    ctx: &DilationContext,
    center_kind: CenterKind,
) -> Result<(DilationContext, AxialDigitPartition)> {
    let (g1, g2, swapped) = axial_shape(&ctx.mat).ok_or(Error::NotAxialAdmissible)?;
    if swapped {
        // conjugate by the coordinate swap: P M P is diagonal with the same
        // digit rectangle; the partition is built in swapped coordinates
        // and digits are swapped back at the end.
        let diag = IMat::diag(&[g2, g1]);
        let dctx = DilationContext::new(diag)?;
        let (dctx2, mut part) = axial_partition(&dctx, center_kind)?;
        let digits: Vec<Vec<i64>> = dctx2
            .digits
            .iter()
            .map(|s| vec![s[1], s[0]])
            .collect();
        let new_ctx = DilationContext::with_digits(ctx.mat.clone(), digits)?;
        part.swapped = true;
        part.parities = AxialParities {
            d1_even: part.parities.d2_even,
            d2_even: part.parities.d1_even,
        };
        return Ok((new_ctx, part));
    }
    let d1 = g1.unsigned_abs() as i64;
    let d2 = g2.unsigned_abs() as i64;
    let lo = |dl: i64| -((dl - 1) / 2);
    let hi = |dl: i64| dl / 2;
    let mut digits = Vec::new();
    for v1 in lo(d1)..=hi(d1) {
        for v2 in lo(d2)..=hi(d2) {
            digits.push(vec![v1, v2]);
        }
    }
    digits.sort();
    let new_ctx = DilationContext::with_digits(ctx.mat.clone(), digits.clone())?;
    let idx_of = |v: &[i64]| -> usize {
        digits
            .iter()
            .position(|s| s[0] == v[0] && s[1] == v[1])
            .expect("digit in rectangle")
    };
    let parities = AxialParities {
        d1_even: d1 % 2 == 0,
        d2_even: d2 % 2 == 0,
    };
    let mut orbits = Vec::new();
    match center_kind {
        CenterKind::Integer => {
            orbits.push(AxialOrbit::Single { idx: idx_of(&[0, 0]) });
            if parities.d1_even {
                orbits.push(AxialOrbit::Single { idx: idx_of(&[d1 / 2, 0]) });
            }
            if parities.d2_even {
                orbits.push(AxialOrbit::Single { idx: idx_of(&[0, d2 / 2]) });
            }
            if parities.d1_even && parities.d2_even {
                orbits.push(AxialOrbit::Single { idx: idx_of(&[d1 / 2, d2 / 2]) });
            }
            for v1 in 1..=(d1 - 1) / 2 {
                orbits.push(AxialOrbit::Pair {
                    family: PairFamily::R,
                    lead: idx_of(&[v1, 0]),
                    follow: idx_of(&[-v1, 0]),
                });
            }
            for v2 in 1..=(d2 - 1) / 2 {
                orbits.push(AxialOrbit::Pair {
                    family: PairFamily::Q,
                    lead: idx_of(&[0, v2]),
                    follow: idx_of(&[0, -v2]),
                });
            }
            if parities.d1_even {
                for v2 in 1..=(d2 - 1) / 2 {
                    orbits.push(AxialOrbit::Pair {
                        family: PairFamily::T,
                        lead: idx_of(&[d1 / 2, v2]),
                        follow: idx_of(&[d1 / 2, -v2]),
                    });
                }
            }
            if parities.d2_even {
                for v1 in 1..=(d1 - 1) / 2 {
                    orbits.push(AxialOrbit::Pair {
                        family: PairFamily::U,
                        lead: idx_of(&[v1, d2 / 2]),
                        follow: idx_of(&[-v1, d2 / 2]),
                    });
                }
            }
            for v1 in 1..=(d1 - 1) / 2 {
                for v2 in 1..=(d2 - 1) / 2 {
                    orbits.push(AxialOrbit::Quad {
                        k: idx_of(&[v1, v2]),
                        k1: idx_of(&[v1, -v2]),
                        k2: idx_of(&[-v1, v2]),
                        k3: idx_of(&[-v1, -v2]),
                    });
                }
            }
        }
        CenterKind::SemiInteger => {
            if !parities.d1_even && !parities.d2_even {
                orbits.push(AxialOrbit::Single {
                    idx: idx_of(&[-(d1 - 1) / 2, -(d2 - 1) / 2]),
                });
            }
            if !parities.d1_even {
                for v2 in 1..=d2 / 2 {
                    orbits.push(AxialOrbit::Pair {
                        family: PairFamily::T,
                        lead: idx_of(&[-(d1 - 1) / 2, v2]),
                        follow: idx_of(&[-(d1 - 1) / 2, 1 - v2]),
                    });
                }
            }
            if !parities.d2_even {
                for v1 in 1..=d1 / 2 {
                    orbits.push(AxialOrbit::Pair {
                        family: PairFamily::U,
                        lead: idx_of(&[v1, -(d2 - 1) / 2]),
                        follow: idx_of(&[1 - v1, -(d2 - 1) / 2]),
                    });
                }
            }
            for v1 in 1..=d1 / 2 {
                for v2 in 1..=d2 / 2 {
                    orbits.push(AxialOrbit::Quad {
                        k: idx_of(&[v1, v2]),
                        k1: idx_of(&[v1, 1 - v2]),
                        k2: idx_of(&[1 - v1, v2]),
                        k3: idx_of(&[1 - v1, 1 - v2]),
                    });
                }
            }
        }
    }
    // the families must cover every digit exactly once
    let mut seen = vec![false; new_ctx.m];
    for o in &orbits {
        let idxs: Vec<usize> = match o {
            AxialOrbit::Single { idx } => vec![*idx],
            AxialOrbit::Pair { lead, follow, .. } => vec![*lead, *follow],
            AxialOrbit::Quad { k, k1, k2, k3 } => vec![*k, *k1, *k2, *k3],
        };
        for i in idxs {
            assert!(!seen[i], "digit families overlap");
            seen[i] = true;
        }
    }
    assert!(seen.iter().all(|&b| b), "digit families do not cover");
    Ok((
        new_ctx,
        AxialDigitPartition {
            center_kind,
            parities,
            orbits,
            swapped: false,
        },
    ))
}

/// A finite unimodular integer matrix group compatible with M, together
/// with the digit-stability residues r_j^E with E s_j = M r_j^E + s_j.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    pub elements: Vec<IMat>,
    /// residues[e][j] = r_j^E for element e and digit j
    pub residues: Vec<Vec<Vec<i64>>>,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// The axial group {+-I, +-diag(-1,1)} on Z^2.
pub fn axial_group_elements() -> Vec<IMat> {
    let i2 = IMat::identity(2);
    let y = IMat::new(2, vec![-1, 0, 0, 1]);
    vec![i2.clone(), i2.neg(), y.clone(), y.neg()]
}

/// The 4-fold group of order 8 on Z^2.
pub fn fourfold_group_elements() -> Vec<IMat> {
    let i2 = IMat::identity(2);
    let y = IMat::new(2, vec![-1, 0, 0, 1]);
    let r = IMat::new(2, vec![0, 1, -1, 0]);
    let s = IMat::new(2, vec![0, 1, 1, 0]);
    vec![
        i2.clone(),
        i2.neg(),
        y.clone(),
        y.neg(),
        r.clone(),
        r.neg(),
        s.clone(),
        s.neg(),
    ]
}

/// The full axis group {diag(+-1,...,+-1)} on Z^d.
pub fn axis_group_elements(d: usize) -> Vec<IMat> {
    (0..(1u32 << d))
        .map(|mask| {
            let entries: Vec<i64> = (0..d)
                .map(|l| if (mask >> l) & 1 == 1 { -1 } else { 1 })
                .collect();
            IMat::diag(&entries)
        })
        .collect()
}

/// Validate a symmetry group against a dilation context: closure, identity,
/// M-compatibility, and digit stability. Computes all residues exactly.
pub fn validate_group(ctx: &DilationContext, elements: &[IMat]) -> Result<SymmetryGroup> {
    let d = ctx.dim();
    for (i, e) in elements.iter().enumerate() {
        if e.d != d {
            return Err(Error::NotAGroup(format!("element {i} has wrong dimension")));
        }
        let det = e.det();
        if det != 1 && det != -1 {
            return Err(Error::NotAGroup(format!(
                "element {i} has determinant {det}, not +-1"
            )));
        }
    }
    let contains = |m: &IMat| elements.iter().any(|e| e == m);
    if !contains(&IMat::identity(d)) {
        return Err(Error::NotAGroup("missing identity".into()));
    }
    for a in elements {
        for b in elements {
            if !contains(&a.mul(b)) {
                return Err(Error::NotAGroup("not closed under multiplication".into()));
            }
        }
    }
    // M E M^{-1} must be an integer matrix in the group
    for e in elements {
        let me = RMat::from_int(&ctx.mat.mul(e));
        let conj = me.mul(&ctx.minv);
        let ints: Option<Vec<i64>> = conj
            .a
            .iter()
            .map(|x| {
                if x.denom().is_one() {
                    i64::try_from(x.numer()).ok()
                } else {
                    None
                }
            })
            .collect();
        match ints {
            Some(a) if contains(&IMat::new(d, a.clone())) => {}
            _ => return Err(Error::NotCompatibleWithM),
        }
    }
    let mut residues = Vec::with_capacity(elements.len());
    for (ei, e) in elements.iter().enumerate() {
        let mut per_digit = Vec::with_capacity(ctx.m);
        for (j, s) in ctx.digits.iter().enumerate() {
            let es = e.mul_vec(s);
            let diff: Vec<i64> = es.iter().zip(s).map(|(a, b)| a - b).collect();
            match ctx.preimage(&diff) {
                Some(r) => per_digit.push(r),
                None => return Err(Error::DigitNotStable { element: ei, digit: j }),
            }
        }
        residues.push(per_digit);
    }
    Ok(SymmetryGroup {
        elements: elements.to_vec(),
        residues,
    })
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_digits_examples() {
        // 2I: unit square digits
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        assert_eq!(ctx.m, 4);
        assert_eq!(
            ctx.digits,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        // quincunx
        let ctx = DilationContext::new(IMat::new(2, vec![1, 1, 1, -1])).unwrap();
        assert_eq!(ctx.m, 2);
        assert_eq!(ctx.digits, vec![vec![0, 0], vec![1, 0]]);
        // m = 3 shear-like matrix
        let ctx = DilationContext::new(IMat::new(2, vec![1, -2, 2, -1])).unwrap();
        assert_eq!(ctx.m, 3);
        assert_eq!(ctx.digits, vec![vec![-1, 0], vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn rejects_bad_dilations() {
        assert!(matches!(
            DilationContext::new(IMat::new(2, vec![1, 0, 0, 1])),
            Err(Error::Unimodular(_))
        ));
        assert!(matches!(
            DilationContext::new(IMat::new(2, vec![1, 1, 0, 2])),
            Err(Error::NotExpanding)
        ));
    }

    #[test]
    fn coset_index_parity() {
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        assert_eq!(ctx.digits[ctx.coset_index(&[3, 5])], vec![1, 1]);
        assert_eq!(ctx.digits[ctx.coset_index(&[0, 0])], vec![0, 0]);
        let ctx = DilationContext::with_digits(
            IMat::new(2, vec![1, -2, 2, -1]),
            vec![vec![0, 0], vec![0, -1], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(ctx.digits[ctx.coset_index(&[0, 2])], vec![0, -1]);
    }

    #[test]
    fn pair_digits_examples() {
        // paper-style digit set for the m=3 matrix: J = {0}, pair (1,2)
        let ctx = DilationContext::with_digits(
            IMat::new(2, vec![1, -2, 2, -1]),
            vec![vec![0, 0], vec![0, -1], vec![0, 1]],
        )
        .unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::zero(2)).unwrap();
        assert_eq!(part.j_set, vec![0]);
        assert_eq!(part.pairs, vec![(1, 2)]);
        assert_eq!(ctx2.digits, ctx.digits);
        // d=1, M=2, c=0: both digits self-paired
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (_, part) = pair_digits(&ctx, &HalfVec::zero(1)).unwrap();
        assert_eq!(part.j_set, vec![0, 1]);
        assert!(part.pairs.is_empty());
        // d=1, M=2, c=1/2: the two digits pair up
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::from_twice(vec![1])).unwrap();
        assert_eq!(part.pairs, vec![(0, 1)]);
        assert_eq!(ctx2.digits[0][0] + ctx2.digits[1][0], 1);
        // 2I with semi-integer center: all four digits in pairs
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::from_twice(vec![1, 1])).unwrap();
        assert!(part.j_set.is_empty());
        assert_eq!(part.pairs.len(), 2);
        for &(i, ip) in &part.pairs {
            for t in 0..2 {
                assert_eq!(ctx2.digits[i][t] + ctx2.digits[ip][t], 1);
            }
        }
    }

    #[test]
    fn pairing_is_involutive_and_partitions() {
        let ctx = DilationContext::new(IMat::new(2, vec![1, -2, 2, -1])).unwrap();
        let (_, part) = pair_digits(&ctx, &HalfVec::zero(2)).unwrap();
        let mut all: Vec<usize> = part.j_set.clone();
        all.extend(part.i1());
        all.extend(part.i2());
        all.sort();
        assert_eq!(all, vec![0, 1, 2]);
        for &(i, ip) in &part.pairs {
            assert_eq!(part.partner(i), Some(ip));
            assert_eq!(part.partner(ip), Some(i));
        }
    }

    #[test]
    fn axial_partition_cases() {
        // 2I, integer center: case IV, four singles
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        let (ctx2, part) = axial_partition(&ctx, CenterKind::Integer).unwrap();
        assert_eq!(part.singles().len(), 4);
        assert_eq!(ctx2.digits.len(), 4);
        // 2I, semi-integer center: a single K-quadruple
        let (_, part) = axial_partition(&ctx, CenterKind::SemiInteger).unwrap();
        assert_eq!(part.orbits.len(), 1);
        assert!(matches!(part.orbits[0], AxialOrbit::Quad { .. }));
        // diag(3,3): case I, J single + R + Q pairs + K quad
        let ctx = DilationContext::new(IMat::diag(&[3, 3])).unwrap();
        let (_, part) = axial_partition(&ctx, CenterKind::Integer).unwrap();
        assert_eq!(part.singles().len(), 1);
        assert_eq!(part.family_indices(PairFamily::R, true).len(), 1);
        assert_eq!(part.family_indices(PairFamily::Q, true).len(), 1);
        assert_eq!(
            part.orbits
                .iter()
                .filter(|o| matches!(o, AxialOrbit::Quad { .. }))
                .count(),
            1
        );
        // diag(3,2): case III, U pair present
        let ctx = DilationContext::new(IMat::diag(&[3, 2])).unwrap();
        let (_, part) = axial_partition(&ctx, CenterKind::Integer).unwrap();
        assert_eq!(part.family_indices(PairFamily::U, true).len(), 1);
        // non-axial matrix
        let ctx = DilationContext::new(IMat::new(2, vec![1, -2, 2, -1])).unwrap();
        assert!(matches!(
            axial_partition(&ctx, CenterKind::Integer),
            Err(Error::NotAxialAdmissible)
        ));
    }

    #[test]
    fn group_validation() {
        // quincunx with the 4-fold group: valid
        let ctx = DilationContext::new(IMat::new(2, vec![1, 1, 1, -1])).unwrap();
        let g = validate_group(&ctx, &fourfold_group_elements()).unwrap();
        assert_eq!(g.order(), 8);
        for (e, per_digit) in g.elements.iter().zip(&g.residues) {
            for (j, r) in per_digit.iter().enumerate() {
                let lhs = e.mul_vec(&ctx.digits[j]);
                let rhs: Vec<i64> = ctx
                    .mat
                    .mul_vec(r)
                    .iter()
                    .zip(&ctx.digits[j])
                    .map(|(a, b)| a + b)
                    .collect();
                assert_eq!(lhs, rhs);
            }
        }
        // 2I with the axis group on the unit cube digits: valid
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        assert!(validate_group(&ctx, &axis_group_elements(2)).is_ok());
        // m=3 matrix with the 4-fold group: fails
        let ctx = DilationContext::new(IMat::new(2, vec![1, -2, 2, -1])).unwrap();
        assert!(validate_group(&ctx, &fourfold_group_elements()).is_err());
        // not a group: missing inverses/closure
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        let broken = vec![IMat::identity(2), IMat::new(2, vec![0, 1, -1, 0])];
        assert!(matches!(
            validate_group(&ctx, &broken),
            Err(Error::NotAGroup(_))
        ));
    }

    #[test]
    fn cosets_tile_a_box() {
        for mat in [
            IMat::diag(&[2, 2]),
            IMat::new(2, vec![1, 1, 1, -1]),
            IMat::new(2, vec![1, -2, 2, -1]),
        ] {
            let ctx = DilationContext::new(mat).unwrap();
            let mut counts = vec![0usize; ctx.m];
            for x in -5..=5i64 {
                for y in -5..=5i64 {
                    counts[ctx.coset_index(&[x, y])] += 1;
                }
            }
            let total: usize = counts.iter().sum();
            assert_eq!(total, 121);
            assert!(counts.iter().all(|&c| c > 0));
        }
    }
}
