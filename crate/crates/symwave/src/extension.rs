//! Polyphase matrix extension: complete the component rows of (m0, dual m0)
//! to square matrices N, Nt with Nt* N = I, mix rows to make the wavelet
//! masks symmetric, and extract the filter bank.

use crate::error::{Error, Result};
use crate::gauss::{GaussRat, Rat, Scaled};
use crate::lattice::{
    AxialDigitPartition, AxialOrbit, DilationContext, PointDigitPartition, SymmetryGroup,
};
use crate::laurent::LaurentPoly;
use crate::mat::{HalfVec, IMat};
use crate::polyphase::{decompose, recompose, PointSense, PolyphaseVector};
use crate::verify::{
    check_sum_rule_order, check_vanishing_moments, detect_axial_symmetry,
    detect_center_candidate, detect_point_symmetry, SymmetryDescriptor, DEFAULT_ORDER_CAP,
};

/// The (m+1) x (m+1) extension pair. Row 0 carries the refinable masks;
/// rows 1..m become the wavelet masks (columns 0..m-1 are their polyphase
/// components, the last column is auxiliary).
#[derive(Clone, Debug)]
pub struct ExtensionMatrices {
    pub n_mat: Vec<Vec<LaurentPoly>>,
    pub nt_mat: Vec<Vec<LaurentPoly>>,
}

impl ExtensionMatrices {
    pub fn size(&self) -> usize {
        self.n_mat.len()
    }
}

/// Entrywise check of Nt* N = I_{m+1} (star = transpose with conj(entry)).
pub fn extension_identity_holds(ext: &ExtensionMatrices, dim: usize) -> bool {
    let s = ext.size();
    for i in 0..s {
        for j in 0..s {
            let mut acc = LaurentPoly::zero(dim);
            for k in 0..s {
                let term = match ext.nt_mat[k][i].conj_reflect().mul(&ext.n_mat[k][j]) {
                    Ok(t) => t,
                    Err(_) => return false,
                };
                acc = match acc.add(&term) {
                    Ok(t) => t,
                    Err(_) => return false,
                };
            }
            let want = if i == j {
                LaurentPoly::one(dim)
            } else {
                LaurentPoly::zero(dim)
            };
            if acc != want {
                return false;
            }
        }
    }
    true
}

/// Build the extension from the polyphase vectors of the refinable pair.
/// The identity Nt* N = I is verified exactly before returning.
pub fn build_extension(
    pv0: &PolyphaseVector,
    pvt0: &PolyphaseVector,
    ctx: &DilationContext,
) -> Result<ExtensionMatrices> {
    let m = ctx.m;
    if pv0.comps.len() != m || pvt0.comps.len() != m {
        return Err(Error::ContextMismatch);
    }
    let d = ctx.dim();
    let zero = LaurentPoly::zero(d);
    let one = LaurentPoly::one(d);
    // mu_{0,m} = 1 - sum_k mu_{0k} conj(dual mu_{0k})
    let mut last = one.clone();
    for k in 0..m {
        let prod = pv0.comps[k].mul(&pvt0.comps[k].conj_reflect())?;
        last = last.sub(&prod)?;
    }
    let mut n_mat = Vec::with_capacity(m + 1);
    let mut row0 = pv0.comps.clone();
    row0.push(last);
    n_mat.push(row0);
    for k in 0..m {
        let mut row = vec![zero.clone(); m + 1];
        row[k] = one.clone();
        row[m] = pvt0.comps[k].conj_reflect().neg();
        n_mat.push(row);
    }
    let mut nt_mat = Vec::with_capacity(m + 1);
    let mut row0t = pvt0.comps.clone();
    row0t.push(one.clone());
    nt_mat.push(row0t);
    for k in 0..m {
        let mut row = Vec::with_capacity(m + 1);
        let conj_mu = pv0.comps[k].conj_reflect();
        for l in 0..m {
            let mut entry = pvt0.comps[l].mul(&conj_mu)?.neg();
            if l == k {
                entry = entry.add(&one)?;
            }
            row.push(entry);
        }
        row.push(conj_mu.neg());
        nt_mat.push(row);
    }
    let ext = ExtensionMatrices { n_mat, nt_mat };
    if !extension_identity_holds(&ext, d) {
        return Err(Error::BankInvalid);
    }
    Ok(ext)
}

/// How the wavelet rows are grouped for the symmetrizing transforms. Quad
/// members are listed in role order (k, k', k'', k''').
#[derive(Clone, Debug)]
pub enum RowOrbit {
    Single(usize),
    Pair(usize, usize),
    Quad(usize, usize, usize, usize),
}

pub fn orbits_from_point(part: &PointDigitPartition) -> Vec<RowOrbit> {
    let mut orbits: Vec<RowOrbit> = part.j_set.iter().map(|&j| RowOrbit::Single(j)).collect();
    orbits.extend(part.pairs.iter().map(|&(i, ip)| RowOrbit::Pair(i, ip)));
    orbits
}

pub fn orbits_from_axial(part: &AxialDigitPartition) -> Vec<RowOrbit> {
    part.orbits
        .iter()
        .map(|o| match o {
            AxialOrbit::Single { idx } => RowOrbit::Single(*idx),
            AxialOrbit::Pair { lead, follow, .. } => RowOrbit::Pair(*lead, *follow),
            AxialOrbit::Quad { k, k1, k2, k3 } => RowOrbit::Quad(*k, *k1, *k2, *k3),
        })
        .collect()
}

pub fn orbits_trivial(m: usize) -> Vec<RowOrbit> {
    (0..m).map(RowOrbit::Single).collect()
}

/// Mix the wavelet rows inside each orbit: the dual rows by the averaged
/// sign patterns, the primal rows by the unnormalized ones, so the two
/// transforms stay mutually adjoint and Nt* N = I survives (re-verified).
pub fn symmetrize_rows(
    ext: &ExtensionMatrices,
    orbits: &[RowOrbit],
    dim: usize,
) -> Result<ExtensionMatrices> {
    let mut n_mat = ext.n_mat.clone();
    let mut nt_mat = ext.nt_mat.clone();
    let width = ext.size();
    let combine = |mat: &Vec<Vec<LaurentPoly>>,
                   rows: &[usize],
                   signs: &[&[i8]],
                   scale: Option<Rat>|
     -> Result<Vec<Vec<LaurentPoly>>> {
        let mut out = Vec::with_capacity(rows.len());
        for sign_row in signs {
            let mut new_row = Vec::with_capacity(width);
            for col in 0..width {
                let mut acc = LaurentPoly::zero(dim);
                for (pos, &r) in rows.iter().enumerate() {
                    let term = if sign_row[pos] >= 0 {
                        mat[r + 1][col].clone()
                    } else {
                        mat[r + 1][col].neg()
                    };
                    acc = acc.add(&term)?;
                }
                if let Some(s) = &scale {
                    acc = acc.scalar_mul(&GaussRat::real(s.clone()));
                }
                new_row.push(acc);
            }
            out.push(new_row);
        }
        Ok(out)
    };
    for orbit in orbits {
        match orbit {
            RowOrbit::Single(_) => {}
            RowOrbit::Pair(i, ip) => {
                let rows = [*i, *ip];
                let signs: [&[i8]; 2] = [&[1, 1], &[1, -1]];
                let primal = combine(&n_mat, &rows, &signs, None)?;
                let dual = combine(&nt_mat, &rows, &signs, Some(Rat::new(1.into(), 2.into())))?;
                n_mat[i + 1] = primal[0].clone();
                n_mat[ip + 1] = primal[1].clone();
                nt_mat[i + 1] = dual[0].clone();
                nt_mat[ip + 1] = dual[1].clone();
            }
            RowOrbit::Quad(k, k1, k2, k3) => {
                let rows = [*k, *k1, *k2, *k3];
                let signs: [&[i8]; 4] = [
                    &[1, 1, 1, 1],
                    &[1, -1, -1, 1],
                    &[1, 1, -1, -1],
                    &[1, -1, 1, -1],
                ];
                let primal = combine(&n_mat, &rows, &signs, None)?;
                let dual = combine(&nt_mat, &rows, &signs, Some(Rat::new(1.into(), 4.into())))?;
                for (pos, &r) in rows.iter().enumerate() {
                    n_mat[r + 1] = primal[pos].clone();
                    nt_mat[r + 1] = dual[pos].clone();
                }
            }
        }
    }
    let out = ExtensionMatrices { n_mat, nt_mat };
    if !extension_identity_holds(&out, dim) {
        return Err(Error::BankInvalid);
    }
    Ok(out)
}

/// The symmetry family a bank belongs to, for metadata detection.
#[derive(Clone, Debug)]
pub enum BankSymmetryKind {
    PointA,
    PointB,
    Axial,
    Group(Vec<IMat>),
}

#[derive(Clone, Debug)]
pub struct MaskMeta {
    pub sum_rule: usize,
    pub vanishing_moments: usize,
    pub symmetry: Option<SymmetryDescriptor>,
}

#[derive(Clone, Debug)]
pub struct BankMask {
    pub poly: LaurentPoly,
    pub meta: MaskMeta,
}

#[derive(Clone, Debug)]
pub struct MaskPair {
    pub primal: BankMask,
    pub dual: BankMask,
}

/// A full filter bank: the refinable pair and m wavelet pairs in digit
/// order, with verified metadata.
#[derive(Clone, Debug)]
pub struct FilterBank {
    pub ctx: DilationContext,
    pub kind: BankSymmetryKind,
    pub center: HalfVec,
    pub refinable: MaskPair,
    pub wavelets: Vec<MaskPair>,
    pub provenance: String,
}

fn detect_symmetry_meta(t: &LaurentPoly, kind: &BankSymmetryKind) -> Option<SymmetryDescriptor> {
    match kind {
        BankSymmetryKind::PointA => detect_point_symmetry(t, PointSense::A).map(|(c, sign)| {
            SymmetryDescriptor::PointA {
                center: c.as_rats().iter().map(crate::gauss::format_rat).collect(),
                sign,
            }
        }),
        BankSymmetryKind::PointB => detect_point_symmetry(t, PointSense::B).map(|(c, sign)| {
            SymmetryDescriptor::PointB {
                center: c.as_rats().iter().map(crate::gauss::format_rat).collect(),
                sign,
            }
        }),
        BankSymmetryKind::Axial => {
            detect_axial_symmetry(t).map(|(c, sr, sa)| SymmetryDescriptor::Axial {
                center: c.as_rats().iter().map(crate::gauss::format_rat).collect(),
                sign_reflect: sr,
                sign_axis: sa,
            })
        }
        BankSymmetryKind::Group(elements) => {
            let c = detect_center_candidate(t)?;
            let spec = crate::verify::SymmetrySpec::Group {
                elements: elements.clone(),
                center: c,
            };
            crate::verify::check_symmetry(t, &spec)
        }
    }
}

fn mask_meta(t: &LaurentPoly, ctx: &DilationContext, kind: &BankSymmetryKind) -> MaskMeta {
    MaskMeta {
        sum_rule: check_sum_rule_order(t, ctx, DEFAULT_ORDER_CAP),
        vanishing_moments: check_vanishing_moments(t, DEFAULT_ORDER_CAP),
        symmetry: detect_symmetry_meta(t, kind),
    }
}

/// The polyphase identity of the extracted bank: the (m+1) x m component
/// matrices satisfy calM^T conj(calMt) = I_m entrywise.
pub fn bank_identity_holds(bank: &FilterBank) -> bool {
    let ctx = &bank.ctx;
    let d = ctx.dim();
    let collect = |dual: bool| -> Option<Vec<PolyphaseVector>> {
        let mut rows = Vec::with_capacity(ctx.m + 1);
        let first = if dual {
            &bank.refinable.dual.poly
        } else {
            &bank.refinable.primal.poly
        };
        rows.push(decompose(first, ctx).ok()?);
        for w in &bank.wavelets {
            let t = if dual { &w.dual.poly } else { &w.primal.poly };
            rows.push(decompose(t, ctx).ok()?);
        }
        Some(rows)
    };
    let (primal, dual) = match (collect(false), collect(true)) {
        (Some(p), Some(dl)) => (p, dl),
        _ => return false,
    };
    for k in 0..ctx.m {
        for l in 0..ctx.m {
            let mut acc = LaurentPoly::zero(d);
            for nu in 0..=ctx.m {
                let term = match primal[nu].comps[k].mul(&dual[nu].comps[l].conj_reflect()) {
                    Ok(t) => t,
                    Err(_) => return false,
                };
                acc = match acc.add(&term) {
                    Ok(t) => t,
                    Err(_) => return false,
                };
            }
            let want = if k == l {
                LaurentPoly::one(d)
            } else {
                LaurentPoly::zero(d)
            };
            if acc != want {
                return false;
            }
        }
    }
    true
}

/// Recompose the wavelet masks from rows 1..m (columns 0..m-1), populate
/// verified metadata, and re-check the polyphase identity on the bank.
pub fn extract_filterbank(
    ext: &ExtensionMatrices,
    ctx: &DilationContext,
    kind: BankSymmetryKind,
    center: HalfVec,
    provenance: String,
) -> Result<FilterBank> {
    let m = ctx.m;
    let take = |mat: &Vec<Vec<LaurentPoly>>, row: usize| -> PolyphaseVector {
        PolyphaseVector {
            comps: mat[row][0..m].to_vec(),
        }
    };
    let m0 = recompose(&take(&ext.n_mat, 0), ctx)?;
    let mt0 = recompose(&take(&ext.nt_mat, 0), ctx)?;
    let mut wavelets = Vec::with_capacity(m);
    for nu in 1..=m {
        let w = recompose(&take(&ext.n_mat, nu), ctx)?;
        let wt = recompose(&take(&ext.nt_mat, nu), ctx)?;
        wavelets.push(MaskPair {
            primal: BankMask {
                meta: mask_meta(&w, ctx, &kind),
                poly: w,
            },
            dual: BankMask {
                meta: mask_meta(&wt, ctx, &kind),
                poly: wt,
            },
        });
    }
    let bank = FilterBank {
        ctx: ctx.clone(),
        refinable: MaskPair {
            primal: BankMask {
                meta: mask_meta(&m0, ctx, &kind),
                poly: m0,
            },
            dual: BankMask {
                meta: mask_meta(&mt0, ctx, &kind),
                poly: mt0,
            },
        },
        kind,
        center,
        wavelets,
        provenance,
    };
    if !bank_identity_holds(&bank) {
        return Err(Error::BankInvalid);
    }
    Ok(bank)
}

/// Orbit layout for a group-symmetric bank (no row mixing needed).
pub fn orbits_from_group(_group: &SymmetryGroup, m: usize) -> Vec<RowOrbit> {
    orbits_trivial(m)
}

/// Full pipeline: decompose the refinable pair, extend, symmetrize, extract.
pub fn bank_from_masks(
    ctx: &DilationContext,
    m0: &LaurentPoly,
    mt0: &LaurentPoly,
    orbits: &[RowOrbit],
    kind: BankSymmetryKind,
    center: HalfVec,
    provenance: String,
) -> Result<FilterBank> {
    let pv0 = decompose(m0, ctx)?;
    let pvt0 = decompose(mt0, ctx)?;
    let ext = build_extension(&pv0, &pvt0, ctx)?;
    let ext = symmetrize_rows(&ext, orbits, ctx.dim())?;
    extract_filterbank(&ext, ctx, kind, center, provenance)
}

/// Dual wavelet masks inherit vanishing moments of order n whenever m0 has
/// sum rule n and the dual pair satisfies the moment condition to order n.
pub fn check_dual_vanishing_moments(bank: &FilterBank, n: usize) -> bool {
    bank.wavelets
        .iter()
        .all(|w| check_vanishing_moments(&w.dual.poly, n.max(1)) >= n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;
    use crate::lattice::pair_digits;

    fn hat() -> LaurentPoly {
        LaurentPoly::monomial(vec![-1], GaussRat::real(rat(1, 4)))
            .add(&LaurentPoly::monomial(vec![0], GaussRat::real(rat(1, 2))))
            .unwrap()
            .add(&LaurentPoly::monomial(vec![1], GaussRat::real(rat(1, 4))))
            .unwrap()
    }

    #[test]
    fn hat_extension_matrices() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let pv0 = decompose(&hat(), &ctx).unwrap();
        let pvt0 = decompose(&LaurentPoly::one(1), &ctx).unwrap();
        let ext = build_extension(&pv0, &pvt0, &ctx).unwrap();
        assert_eq!(ext.size(), 3);
        // the auxiliary entry vanishes: 1 - mu_00 sqrt(2) = 0
        assert!(ext.n_mat[0][2].is_zero());
    }

    #[test]
    fn degenerate_identity_extension() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let one = LaurentPoly::one(1);
        let pv = decompose(&one, &ctx).unwrap();
        let ext = build_extension(&pv, &pv, &ctx).unwrap();
        assert!(extension_identity_holds(&ext, 1));
    }

    #[test]
    fn hat_bank_with_symmetrized_rows() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let (ctx2, part) = pair_digits(&ctx, &HalfVec::zero(1)).unwrap();
        let orbits = orbits_from_point(&part);
        let bank = bank_from_masks(
            &ctx2,
            &hat(),
            &LaurentPoly::one(1),
            &orbits,
            BankSymmetryKind::PointA,
            HalfVec::zero(1),
            "test".into(),
        )
        .unwrap();
        assert_eq!(bank.wavelets.len(), 2);
        // dual wavelets carry vanishing moments of order >= 2
        assert!(check_dual_vanishing_moments(&bank, 2));
        // every mask got a detected symmetry
        for w in &bank.wavelets {
            assert!(w.dual.meta.symmetry.is_some());
        }
    }
}
