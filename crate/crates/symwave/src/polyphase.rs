//! Polyphase splitting of trigonometric polynomials along the cosets of a
//! dilation matrix.
//!
//! The convention used throughout: components tau_k(xi) = sqrt(m) *
//! sum_p h_{Mp + s_k} e^{2 pi i (p, xi)}, so that
//! t(xi) = (1/sqrt m) sum_k e^{2 pi i (s_k, xi)} tau_k(M* xi) holds as an
//! exact identity. The sqrt(m) factors stay symbolic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gauss::GaussRat;
use crate::lattice::DilationContext;
use crate::laurent::{Key, LaurentPoly};
use crate::mat::{to_integer_vec, HalfVec, IMat};

#[derive(Clone, Debug)]
pub struct PolyphaseVector {
    pub comps: Vec<LaurentPoly>,
}

impl PolyphaseVector {
    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

/// Split an integer-degree polynomial into its polyphase components.
pub fn decompose(t: &LaurentPoly, ctx: &DilationContext) -> Result<PolyphaseVector> {
    if t.dim() != ctx.dim() {
        return Err(Error::DimMismatch(t.dim(), ctx.dim()));
    }
    if !t.sigma_is_zero() {
        return Err(Error::NonIntegerOffset);
    }
    let dim = ctx.dim();
    let mut maps: Vec<BTreeMap<Key, GaussRat>> = vec![BTreeMap::new(); ctx.m];
    for (k, c) in t.iter() {
        let idx = ctx.coset_index(k);
        let shifted: Vec<i64> = k.iter().zip(&ctx.digits[idx]).map(|(a, b)| a - b).collect();
        let p = to_integer_vec(&ctx.minv.mul_ivec(&shifted)).expect("coset arithmetic");
        maps[idx].insert(p, c.clone());
    }
    let comps = maps
        .into_iter()
        .map(|m| {
            LaurentPoly::from_coeffs(dim, vec![false; dim], t.root(), m)
                .mul_sqrt(ctx.m as u64, 1)
        })
        .collect();
    Ok(PolyphaseVector { comps })
}

/// Reassemble a polynomial from polyphase components:
/// (1/sqrt m) sum_k e^{2 pi i (s_k, xi)} comps[k](M* xi).
pub fn recompose(pv: &PolyphaseVector, ctx: &DilationContext) -> Result<LaurentPoly> {
    if pv.comps.len() != ctx.m {
        return Err(Error::DimMismatch(pv.comps.len(), ctx.m));
    }
    let dim = ctx.dim();
    let m_star = ctx.mat.transpose();
    let mut acc = LaurentPoly::zero(dim);
    for (k, comp) in pv.comps.iter().enumerate() {
        if comp.is_zero() {
            continue;
        }
        if comp.dim() != dim {
            return Err(Error::DimMismatch(comp.dim(), dim));
        }
        let piece = comp
            .substitute(&m_star)
            .modulate(&HalfVec::from_int(&ctx.digits[k]));
        acc = acc.add(&piece)?;
    }
    Ok(acc.mul_sqrt(ctx.m as u64, -1))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PointSense {
    /// h_k = h_{2c-k}
    A,
    /// h_k = conj(h_{2c-k})
    B,
}

/// Check the polyphase form of point symmetry about c: every component k
/// must match its reflection partner l (the unique index with
/// M^{-1}(2c - s_k - s_l) integral) up to the exact monomial phase.
pub fn check_polyphase_symmetry(
    pv: &PolyphaseVector,
    ctx: &DilationContext,
    c: &HalfVec,
    sense: PointSense,
) -> bool {
    let neg = IMat::identity(ctx.dim()).neg();
    for k in 0..ctx.m {
        let mut found = false;
        for l in 0..ctx.m {
            let target: Vec<i64> = (0..ctx.dim())
                .map(|t| c.twice[t] - ctx.digits[k][t] - ctx.digits[l][t])
                .collect();
            if let Some(w) = ctx.preimage(&target) {
                let partner = match sense {
                    PointSense::A => pv.comps[l].substitute(&neg),
                    PointSense::B => pv.comps[l].conj_reflect(),
                };
                let expect = partner.modulate(&HalfVec::from_int(&w));
                if pv.comps[k] != expect {
                    return false;
                }
                found = true;
                break;
            }
        }
        if !found {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::{rat, Scaled};
    use crate::lattice::DilationContext;

    fn hat() -> LaurentPoly {
        let q = GaussRat::real(rat(1, 4));
        let h = GaussRat::real(rat(1, 2));
        LaurentPoly::monomial(vec![-1], q.clone())
            .add(&LaurentPoly::monomial(vec![0], h))
            .unwrap()
            .add(&LaurentPoly::monomial(vec![1], q))
            .unwrap()
    }

    #[test]
    fn decompose_constant_quincunx() {
        let ctx = DilationContext::new(IMat::new(2, vec![1, 1, 1, -1])).unwrap();
        let pv = decompose(&LaurentPoly::one(2), &ctx).unwrap();
        assert_eq!(
            pv.comps[0],
            LaurentPoly::one(2).mul_sqrt(2, 1)
        );
        assert!(pv.comps[1].is_zero());
        assert_eq!(recompose(&pv, &ctx).unwrap(), LaurentPoly::one(2));
    }

    #[test]
    fn hat_components() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let pv = decompose(&hat(), &ctx).unwrap();
        // coset 0 holds the single coefficient 1/2 at the origin
        assert_eq!(
            pv.comps[0].coeff_scaled(&[0]),
            Scaled::with_root(GaussRat::real(rat(1, 2)), 2)
        );
        // coset 1 holds 1/4 at p = 0 and p = -1
        assert_eq!(
            pv.comps[1].coeff_scaled(&[-1]),
            Scaled::with_root(GaussRat::real(rat(1, 4)), 2)
        );
        assert_eq!(recompose(&pv, &ctx).unwrap(), hat());
    }

    #[test]
    fn symmetric_mask_passes_check() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        let pv = decompose(&hat(), &ctx).unwrap();
        assert!(check_polyphase_symmetry(
            &pv,
            &ctx,
            &HalfVec::zero(1),
            PointSense::A
        ));
        // Haar-like asymmetric mask fails about c = 0
        let haar = LaurentPoly::one(1)
            .add(&LaurentPoly::monomial(vec![1], GaussRat::one()))
            .unwrap()
            .scalar_mul(&GaussRat::real(rat(1, 2)));
        let pv = decompose(&haar, &ctx).unwrap();
        assert!(!check_polyphase_symmetry(
            &pv,
            &ctx,
            &HalfVec::zero(1),
            PointSense::A
        ));
        // but it is symmetric about c = 1/2
        assert!(check_polyphase_symmetry(
            &pv,
            &ctx,
            &HalfVec::from_twice(vec![1]),
            PointSense::A
        ));
    }
}
