//! Dual refinable masks: solve the triangular moment system so that
//! d_beta(1 - m0 * conj(dual)) = 0 to the requested order, then realize the
//! moments with generators of the matching symmetry flavor.

use crate::error::{Error, Result};
use crate::gauss::{GaussRat, Scaled};
use crate::laurent::LaurentPoly;
use crate::mat::HalfVec;
use crate::multiindex::{below, binom, delta_n, odd_set, weight, MIdx};
use crate::polyphase::PointSense;
use crate::theta::{
    minimal_even_theta, minimal_support_theta, product_theta, symmetrize_theta, Flavor,
};
use crate::maskgen::GeneratorPolicy;
use crate::verify::{check_duality, check_symmetry, SymmetrySpec};

/// The moments rho_beta = d_beta of the demodulated dual mask.
#[derive(Clone, Debug)]
pub struct RhoTable {
    pub entries: Vec<(MIdx, GaussRat)>,
}

impl RhoTable {
    pub fn get(&self, beta: &MIdx) -> GaussRat {
        self.entries
            .iter()
            .find(|(a, _)| a == beta)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(GaussRat::zero)
    }
}

/// Solve for the dual moments: with a = e^{-2 pi i (c, xi)} m0 and
/// b the demodulated dual, the biorthogonality condition reads
/// sum_{alpha <= beta} C(beta, alpha) d_alpha(a) (-1)^{[beta-alpha]}
/// conj(rho_{beta-alpha}) = delta_{beta 0}, a triangular system in
/// graded-lex order.
pub fn solve_dual_moments(m0: &LaurentPoly, c: &HalfVec, n: usize) -> Result<RhoTable> {
    if m0.value_at_zero() != Scaled::one() {
        return Err(Error::NotNormalized);
    }
    if m0.root().is_some() {
        return Err(Error::ScaleMismatch);
    }
    let a = m0.modulate(&c.neg());
    let d = m0.dim();
    let mut entries: Vec<(MIdx, GaussRat)> = Vec::new();
    let rho_of = |entries: &[(MIdx, GaussRat)], idx: &MIdx| -> GaussRat {
        entries
            .iter()
            .find(|(x, _)| x == idx)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(GaussRat::zero)
    };
    for beta in delta_n(d, n as u32) {
        // split off the alpha = 0 term, which carries the unknown
        let mut rest = GaussRat::zero();
        for alpha in below(&beta) {
            if weight(&alpha) == 0 {
                continue;
            }
            let da = a.normalized_derivative(&alpha);
            debug_assert!(da.root.is_none());
            let gamma = crate::multiindex::sub(&beta, &alpha);
            let sign = if weight(&gamma) % 2 == 0 { 1 } else { -1 };
            let mut term = da.v.clone();
            term = &term * &rho_of(&entries, &gamma).conj();
            term = term.scale(&binom(&beta, &alpha));
            if sign < 0 {
                term = -term;
            }
            rest += &term;
        }
        let delta = if weight(&beta) == 0 {
            GaussRat::one()
        } else {
            GaussRat::zero()
        };
        // (-1)^{[beta]} conj(rho_beta) = delta - rest
        let signed = delta - rest;
        let rho = if weight(&beta) % 2 == 0 {
            signed.conj()
        } else {
            (-signed).conj()
        };
        entries.push((beta, rho));
    }
    Ok(RhoTable { entries })
}

/// Symmetry flavor of the dual to construct.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DualFlavor {
    PointA,
    PointB,
    Axial,
    /// The constant mask 1; valid only when the mask moments collapse to a
    /// delta (linear-phase moments with phase zero).
    Trivial,
}

/// Build a dual mask carrying the requested symmetry and satisfying the
/// biorthogonality moment condition with m0 to order n; both verified.
pub fn build_dual_mask(
    m0: &LaurentPoly,
    c: &HalfVec,
    n: usize,
    flavor: DualFlavor,
    policy: GeneratorPolicy,
) -> Result<LaurentPoly> {
    let d = m0.dim();
    if matches!(flavor, DualFlavor::Trivial) {
        let dual = LaurentPoly::one(d);
        if !check_duality(m0, &dual, n) {
            return Err(Error::TrivialDualInvalid);
        }
        return Ok(dual);
    }
    let rho = solve_dual_moments(m0, c, n)?;
    let sigma = c.frac();
    let mut acc = LaurentPoly::zero(d);
    for (beta, r) in &rho.entries {
        if r.is_zero() {
            continue;
        }
        let g = match flavor {
            DualFlavor::PointA => {
                if weight(beta) % 2 == 1 {
                    return Err(Error::ParityViolation(format!(
                        "dual moment at odd weight {beta:?} must vanish for a \
                         reflection-symmetric mask"
                    )));
                }
                match policy {
                    GeneratorPolicy::ProductDefault => symmetrize_theta(
                        &product_theta(beta, n, &sigma),
                        Flavor::A,
                        beta,
                        n,
                        None,
                    )?,
                    GeneratorPolicy::Minimal => minimal_even_theta(beta, n, &sigma)?,
                }
            }
            DualFlavor::PointB => match policy {
                GeneratorPolicy::ProductDefault => symmetrize_theta(
                    &product_theta(beta, n, &sigma),
                    Flavor::B,
                    beta,
                    n,
                    None,
                )?,
                GeneratorPolicy::Minimal => {
                    let g = minimal_support_theta(std::slice::from_ref(beta), n, &sigma, None)?
                        .pop()
                        .unwrap();
                    symmetrize_theta(&g, Flavor::B, beta, n, None)?
                }
            },
            DualFlavor::Axial => {
                if !odd_set(beta).is_empty() {
                    return Err(Error::ParityViolation(format!(
                        "dual moment at {beta:?} must vanish for an axial mask"
                    )));
                }
                let g0 = match policy {
                    GeneratorPolicy::ProductDefault => product_theta(beta, n, &sigma),
                    GeneratorPolicy::Minimal => {
                        minimal_support_theta(std::slice::from_ref(beta), n, &sigma, None)?
                            .pop()
                            .unwrap()
                    }
                };
                symmetrize_theta(&g0, Flavor::AxSym, beta, n, None)?
            }
            DualFlavor::Trivial => unreachable!(),
        };
        acc = acc.add(&g.scalar_mul(r))?;
    }
    let dual = acc.modulate(c);
    if !dual.sigma_is_zero() {
        return Err(Error::BuilderPostcondition(
            "dual mask has non-integer degrees".into(),
        ));
    }
    if !check_duality(m0, &dual, n) {
        return Err(Error::BuilderPostcondition(
            "dual moment condition failed".into(),
        ));
    }
    let spec = match flavor {
        DualFlavor::PointA => SymmetrySpec::Point {
            sense: PointSense::A,
            center: c.clone(),
        },
        DualFlavor::PointB => SymmetrySpec::Point {
            sense: PointSense::B,
            center: c.clone(),
        },
        DualFlavor::Axial => SymmetrySpec::Axial { center: c.clone() },
        DualFlavor::Trivial => unreachable!(),
    };
    if check_symmetry(&dual, &spec).is_none() {
        return Err(Error::BuilderPostcondition("dual symmetry failed".into()));
    }
    Ok(dual)
}

/// Default dual choice: the constant mask when the moments allow it,
/// otherwise the constructed symmetric dual.
pub fn build_default_dual(
    m0: &LaurentPoly,
    c: &HalfVec,
    n: usize,
    flavor: DualFlavor,
    policy: GeneratorPolicy,
) -> Result<LaurentPoly> {
    let trivial = LaurentPoly::one(m0.dim());
    if check_duality(m0, &trivial, n) {
        return Ok(trivial);
    }
    build_dual_mask(m0, c, n, flavor, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;
    use crate::laurent::LaurentPoly;

    fn hat() -> LaurentPoly {
        LaurentPoly::monomial(vec![-1], GaussRat::real(rat(1, 4)))
            .add(&LaurentPoly::monomial(vec![0], GaussRat::real(rat(1, 2))))
            .unwrap()
            .add(&LaurentPoly::monomial(vec![1], GaussRat::real(rat(1, 4))))
            .unwrap()
    }

    #[test]
    fn hat_rho_table() {
        let rho = solve_dual_moments(&hat(), &HalfVec::zero(1), 4).unwrap();
        assert_eq!(rho.get(&vec![0]), GaussRat::one());
        assert_eq!(rho.get(&vec![1]), GaussRat::zero());
        assert_eq!(rho.get(&vec![2]), GaussRat::real(rat(-1, 2)));
        assert_eq!(rho.get(&vec![3]), GaussRat::zero());
    }

    #[test]
    fn hat_dual_order_four() {
        let dual = build_dual_mask(
            &hat(),
            &HalfVec::zero(1),
            4,
            DualFlavor::PointA,
            GeneratorPolicy::Minimal,
        )
        .unwrap();
        assert!(check_duality(&hat(), &dual, 4));
        // symmetric about zero
        for (k, h) in dual.iter() {
            assert_eq!(*h, dual.coeff(&[-k[0]]));
        }
        // order 2 has the trivial dual (linear-phase moments of the hat)
        let d2 = build_default_dual(
            &hat(),
            &HalfVec::zero(1),
            2,
            DualFlavor::PointA,
            GeneratorPolicy::Minimal,
        )
        .unwrap();
        assert_eq!(d2, LaurentPoly::one(1));
        // but not order 4
        assert!(matches!(
            build_dual_mask(
                &hat(),
                &HalfVec::zero(1),
                4,
                DualFlavor::Trivial,
                GeneratorPolicy::Minimal
            ),
            Err(Error::TrivialDualInvalid)
        ));
    }

    #[test]
    fn rho_shift_invariance() {
        // shifting the mask and the center together leaves rho unchanged
        let rho0 = solve_dual_moments(&hat(), &HalfVec::zero(1), 4).unwrap();
        let shifted = hat().modulate(&HalfVec::from_int(&[2]));
        let rho2 = solve_dual_moments(&shifted, &HalfVec::from_int(&[2]), 4).unwrap();
        for (beta, v) in &rho0.entries {
            assert_eq!(*v, rho2.get(beta));
        }
    }
}
