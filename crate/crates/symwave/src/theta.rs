//! Generators with prescribed normalized derivatives at the origin.
//!
//! `Theta(beta, n)` is the class of trigonometric polynomials t with
//! d_alpha(t) = delta_{alpha beta} for all [alpha] < n. Everything the mask
//! builders assemble is a combination of such generators, in the plain,
//! reflection-even (A), conjugation (B), axial, or group-averaged flavor.

use std::collections::BTreeMap;

use num::One;

use crate::error::{Error, Result};
use crate::gauss::{GaussRat, Rat, Scaled};
use crate::lattice::SymmetryGroup;
use crate::laurent::{Key, LaurentPoly};
use crate::mat::IMat;
use crate::multiindex::{delta_e_n, delta_n, odd_set, weight, MIdx};

/// Solve the square interpolation system d_alpha(G) = delta_{alpha beta}
/// over the given support keys (shared offset sigma), one solve per beta.
/// Conditions and support are both taken in the order supplied.
fn solve_moment_system(
    conditions: &[MIdx],
    support: &[Key],
    sigma: &[bool],
    betas: &[MIdx],
) -> Result<Vec<LaurentPoly>> {
    let n_cond = conditions.len();
    if support.len() != n_cond {
        return Err(Error::SingularSupport);
    }
    let dim = sigma.len();
    let half = Rat::new(1.into(), 2.into());
    // V[a][k] = (k + sigma)^alpha_a
    let mut v: Vec<Vec<Rat>> = Vec::with_capacity(n_cond);
    for alpha in conditions {
        let mut row = Vec::with_capacity(n_cond);
        for key in support {
            let mut x = Rat::one();
            for l in 0..dim {
                let base = Rat::from_integer(key[l].into())
                    + if sigma[l] { half.clone() } else { Rat::from_integer(0.into()) };
                for _ in 0..alpha[l] {
                    x *= &base;
                }
            }
            row.push(x);
        }
        v.push(row);
    }
    // LU with partial pivoting on numerator*denominator magnitude
    let mut lu = v;
    let mut perm: Vec<usize> = (0..n_cond).collect();
    for col in 0..n_cond {
        let pivot = (col..n_cond)
            .filter(|&r| !num::Zero::is_zero(&lu[r][col]))
            .max_by_key(|&r| {
                let x = &lu[r][col];
                (x.numer().magnitude().clone(), x.denom().magnitude().clone())
            })
            .ok_or(Error::SingularSupport)?;
        lu.swap(col, pivot);
        perm.swap(col, pivot);
        let p = lu[col][col].clone();
        for r in col + 1..n_cond {
            if num::Zero::is_zero(&lu[r][col]) {
                continue;
            }
            let f = &lu[r][col] / &p;
            for c in col..n_cond {
                let sub = &f * &lu[col][c];
                lu[r][c] = &lu[r][c] - &sub;
            }
            lu[r][col] = f;
        }
    }
    let mut out = Vec::with_capacity(betas.len());
    for beta in betas {
        // rhs = e_{position of beta among conditions}, permuted
        let pos = conditions
            .iter()
            .position(|a| a == beta)
            .expect("beta must be among the conditions");
        let mut y: Vec<Rat> = perm
            .iter()
            .map(|&p| if p == pos { Rat::one() } else { Rat::from_integer(0.into()) })
            .collect();
        for r in 1..n_cond {
            for c in 0..r {
                let sub = &lu[r][c] * &y[c];
                y[r] = &y[r] - &sub;
            }
        }
        let mut x = vec![Rat::from_integer(0.into()); n_cond];
        for r in (0..n_cond).rev() {
            let mut acc = y[r].clone();
            for c in r + 1..n_cond {
                let sub = &lu[r][c] * &x[c];
                acc = &acc - &sub;
            }
            x[r] = &acc / &lu[r][r];
        }
        let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
        for (key, val) in support.iter().zip(&x) {
            if !num::Zero::is_zero(val) {
                coeffs.insert(key.clone(), GaussRat::real(val.clone()));
            }
        }
        out.push(LaurentPoly::from_coeffs(dim, sigma.to_vec(), None, coeffs));
    }
    Ok(out)
}

/// Univariate generator g_k with d_j(g) = delta_{jk} for j < n, supported on
/// {0..n-1} (+ sigma). Solves the Vandermonde system exactly.
pub fn univariate_theta(k: usize, n: usize, half_offset: bool) -> LaurentPoly {
    assert!(k < n);
    let conditions: Vec<MIdx> = (0..n as u32).map(|j| vec![j]).collect();
    let support: Vec<Key> = (0..n as i64).map(|l| vec![l]).collect();
    let sigma = vec![half_offset];
    solve_moment_system(&conditions, &support, &sigma, &[vec![k as u32]])
        .expect("Vandermonde system is nonsingular")
        .pop()
        .unwrap()
}

/// Product generator: the tensor product of univariate generators, one per
/// coordinate, with semi-integer factors where sigma requests them.
pub fn product_theta(beta: &MIdx, n: usize, sigma: &[bool]) -> LaurentPoly {
    assert!((weight(beta) as usize) < n);
    let d = beta.len();
    let mut acc = LaurentPoly::one(d);
    for l in 0..d {
        let g = univariate_theta(beta[l] as usize, n, sigma[l]);
        // lift the univariate factor into coordinate l
        let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
        for (key, c) in g.iter() {
            let mut kk = vec![0i64; d];
            kk[l] = key[0];
            coeffs.insert(kk, c.clone());
        }
        let mut sig = vec![false; d];
        sig[l] = sigma[l];
        let factor = LaurentPoly::from_coeffs(d, sig, None, coeffs);
        acc = acc.mul(&factor).unwrap();
    }
    acc
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Flavor {
    Plain,
    /// Even under reflection: G(xi) = G(-xi). Requires even [beta].
    A,
    /// G(xi) = (-1)^[beta] conj(G(xi)).
    B,
    /// Invariant under the axial group on R^2. Requires all beta_l even.
    AxSym,
    /// Invariant under a full symmetry group. Requires beta = 0.
    Group,
}

/// Symmetrize a generator into the requested flavor; the result is verified
/// to still satisfy the moment conditions.
pub fn symmetrize_theta(
    g: &LaurentPoly,
    flavor: Flavor,
    beta: &MIdx,
    n: usize,
    group: Option<&SymmetryGroup>,
) -> Result<LaurentPoly> {
    let d = g.dim();
    let half = GaussRat::real(Rat::new(1.into(), 2.into()));
    let result = match flavor {
        Flavor::Plain => g.clone(),
        Flavor::A => {
            if weight(beta) % 2 != 0 {
                return Err(Error::FlavorParityViolation(
                    "reflection-even flavor needs even [beta]".into(),
                ));
            }
            let refl = g.substitute(&IMat::identity(d).neg());
            g.add(&refl)?.scalar_mul(&half)
        }
        Flavor::B => {
            let cr = g.conj_reflect();
            let signed = if weight(beta) % 2 == 0 { cr } else { cr.neg() };
            g.add(&signed)?.scalar_mul(&half)
        }
        Flavor::AxSym => {
            if !odd_set(beta).is_empty() {
                return Err(Error::FlavorParityViolation(
                    "axial flavor needs every beta_l even".into(),
                ));
            }
            if d != 2 {
                return Err(Error::DimMismatch(d, 2));
            }
            let y = IMat::new(2, vec![-1, 0, 0, 1]);
            let quarter = GaussRat::real(Rat::new(1.into(), 4.into()));
            let mut acc = g.clone();
            acc = acc.add(&g.substitute(&y.transpose()))?;
            acc = acc.add(&g.substitute(&y.transpose().neg()))?;
            acc = acc.add(&g.substitute(&IMat::identity(2).neg()))?;
            acc.scalar_mul(&quarter)
        }
        Flavor::Group => {
            if weight(beta) != 0 {
                return Err(Error::FlavorParityViolation(
                    "group flavor needs beta = 0".into(),
                ));
            }
            let h = group.ok_or_else(|| {
                Error::FlavorParityViolation("group flavor needs a validated group".into())
            })?;
            let mut acc = LaurentPoly::zero(d);
            for e in &h.elements {
                acc = acc.add(&g.substitute(&e.transpose()))?;
            }
            let inv = GaussRat::real(Rat::new(1.into(), (h.order() as i64).into()));
            acc.scalar_mul(&inv)
        }
    };
    verify_theta_membership(&result, beta, n)?;
    Ok(result)
}

/// Check d_alpha(t) = delta_{alpha beta} on [alpha] < n exactly.
pub fn verify_theta_membership(t: &LaurentPoly, beta: &MIdx, n: usize) -> Result<()> {
    for alpha in delta_n(t.dim(), n as u32) {
        let want = if alpha == *beta { Scaled::one() } else { Scaled::zero() };
        if t.normalized_derivative(&alpha) != want {
            return Err(Error::BuilderPostcondition(format!(
                "generator leaves the moment class at alpha = {alpha:?}"
            )));
        }
    }
    Ok(())
}

/// Minimal-support generators: one shared support with exactly as many
/// keys as interpolation conditions. The default support is the graded
/// enumeration of [alpha] < n itself, which is always nonsingular.
pub fn minimal_support_theta(
    betas: &[MIdx],
    n: usize,
    sigma: &[bool],
    support: Option<Vec<Key>>,
) -> Result<Vec<LaurentPoly>> {
    let d = sigma.len();
    let conditions = delta_n(d, n as u32);
    let support = support.unwrap_or_else(|| {
        conditions
            .iter()
            .map(|a| a.iter().map(|&x| x as i64).collect())
            .collect()
    });
    solve_moment_system(&conditions, &support, sigma, betas)
}

/// Minimal reflection-even generator: solve on the even-weight conditions
/// with a matching support size, then symmetrize. Used where the smallest
/// symmetric masks are wanted (this is what makes the hat filter appear for
/// d = 1, M = 2, n = 2).
pub fn minimal_even_theta(beta: &MIdx, n: usize, sigma: &[bool]) -> Result<LaurentPoly> {
    if weight(beta) % 2 != 0 {
        return Err(Error::FlavorParityViolation(
            "reflection-even flavor needs even [beta]".into(),
        ));
    }
    let d = sigma.len();
    let conditions = delta_e_n(d, n as u32);
    let support: Vec<Key> = conditions
        .iter()
        .map(|a| a.iter().map(|&x| x as i64).collect())
        .collect();
    let g = solve_moment_system(&conditions, &support, sigma, &[beta.clone()])?
        .pop()
        .unwrap();
    // even-symmetrize; the odd-grade conditions come along for free
    let refl = g.substitute(&IMat::identity(d).neg());
    let half = GaussRat::real(Rat::new(1.into(), 2.into()));
    let out = g.add(&refl)?.scalar_mul(&half);
    verify_theta_membership(&out, beta, n)?;
    Ok(out)
}

/// Determinant test for a prospective minimal support: Some(false) means the
/// moment matrix is singular.
pub fn support_is_invertible(n: usize, sigma: &[bool], support: &[Key]) -> bool {
    let d = sigma.len();
    let conditions = delta_n(d, n as u32);
    solve_moment_system(&conditions, support, sigma, &[vec![0; d]]).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;
    use crate::lattice::{fourfold_group_elements, validate_group, DilationContext};

    fn coeff(p: &LaurentPoly, k: &[i64]) -> Rat {
        let c = p.coeff(k);
        assert!(c.is_real());
        c.re
    }

    #[test]
    fn univariate_tables() {
        // n=2
        assert_eq!(univariate_theta(0, 2, false), LaurentPoly::one(1));
        let g1 = univariate_theta(1, 2, false);
        assert_eq!(coeff(&g1, &[0]), rat(-1, 1));
        assert_eq!(coeff(&g1, &[1]), rat(1, 1));
        // n=3
        let g1 = univariate_theta(1, 3, false);
        assert_eq!(coeff(&g1, &[0]), rat(-3, 2));
        assert_eq!(coeff(&g1, &[1]), rat(2, 1));
        assert_eq!(coeff(&g1, &[2]), rat(-1, 2));
        let g2 = univariate_theta(2, 3, false);
        assert_eq!(coeff(&g2, &[0]), rat(1, 2));
        assert_eq!(coeff(&g2, &[1]), rat(-1, 1));
        assert_eq!(coeff(&g2, &[2]), rat(1, 2));
        // n=4
        let g1 = univariate_theta(1, 4, false);
        assert_eq!(coeff(&g1, &[0]), rat(-11, 6));
        assert_eq!(coeff(&g1, &[1]), rat(3, 1));
        assert_eq!(coeff(&g1, &[2]), rat(-3, 2));
        assert_eq!(coeff(&g1, &[3]), rat(1, 3));
        let g3 = univariate_theta(3, 4, false);
        assert_eq!(coeff(&g3, &[0]), rat(-1, 6));
        assert_eq!(coeff(&g3, &[1]), rat(1, 2));
        assert_eq!(coeff(&g3, &[2]), rat(-1, 2));
        assert_eq!(coeff(&g3, &[3]), rat(1, 6));
        // semi-integer, single condition
        let g = univariate_theta(0, 1, true);
        assert_eq!(g.sigma(), &[true]);
        assert_eq!(coeff(&g, &[0]), rat(1, 1));
    }

    #[test]
    fn product_membership() {
        let g = product_theta(&vec![1, 1], 3, &[false, false]);
        verify_theta_membership(&g, &vec![1, 1], 3).unwrap();
        let g = product_theta(&vec![0, 0], 2, &[true, true]);
        verify_theta_membership(&g, &vec![0, 0], 2).unwrap();
        assert_eq!(g.sigma(), &[true, true]);
    }

    #[test]
    fn flavors() {
        // A-flavor on e^{pi i u}: (e^{pi i u} + e^{-pi i u})/2
        let g = univariate_theta(0, 1, true);
        let a = symmetrize_theta(&g, Flavor::A, &vec![0], 1, None).unwrap();
        assert_eq!(coeff(&a, &[0]), rat(1, 2));
        assert_eq!(coeff(&a, &[-1]), rat(1, 2));
        assert!(a.is_even());
        // B-flavor keeps membership, with the sign rule on odd weights
        let g1 = univariate_theta(1, 2, false);
        let b = symmetrize_theta(&g1, Flavor::B, &vec![1], 2, None).unwrap();
        assert_eq!(coeff(&b, &[1]), rat(1, 2));
        assert_eq!(coeff(&b, &[-1]), rat(-1, 2));
        assert_eq!(b.conj_reflect(), b.neg());
        // group flavor: 4-fold average keeps the zero-th moment class
        let ctx = DilationContext::new(IMat::new(2, vec![1, 1, 1, -1])).unwrap();
        let h = validate_group(&ctx, &fourfold_group_elements()).unwrap();
        let g0 = product_theta(&vec![0, 0], 2, &[true, true]);
        let gh = symmetrize_theta(&g0, Flavor::Group, &vec![0, 0], 2, Some(&h)).unwrap();
        for e in &h.elements {
            assert_eq!(gh.substitute(&e.transpose()), gh);
        }
        // parity violations are rejected
        assert!(symmetrize_theta(&g1, Flavor::A, &vec![1], 2, None).is_err());
    }

    #[test]
    fn minimal_support_reproduces_univariate() {
        let gs = minimal_support_theta(
            &[vec![0], vec![1], vec![2]],
            3,
            &[false],
            None,
        )
        .unwrap();
        assert_eq!(gs[1], univariate_theta(1, 3, false));
        assert_eq!(gs[2], univariate_theta(2, 3, false));
        // d=2, n=2 on the simplex support: three 3-coefficient generators
        let gs = minimal_support_theta(
            &[vec![0, 0], vec![1, 0], vec![0, 1]],
            2,
            &[false, false],
            None,
        )
        .unwrap();
        for (g, beta) in gs.iter().zip([vec![0u32, 0], vec![1, 0], vec![0, 1]]) {
            verify_theta_membership(g, &beta, 2).unwrap();
            assert!(g.num_terms() <= 3);
        }
        // a singular support is rejected
        let sing = minimal_support_theta(
            &[vec![0, 0]],
            2,
            &[false, false],
            Some(vec![vec![0, 0], vec![2, 0], vec![0, 2]]),
        );
        let _ = sing; // the simplex has 3 conditions; support sizes match
        let bad = minimal_support_theta(
            &[vec![0, 0]],
            2,
            &[false, false],
            Some(vec![vec![0, 0], vec![1, 0], vec![2, 0]]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn minimal_even_gives_cosine() {
        let g = minimal_even_theta(&vec![0], 2, &[true]).unwrap();
        assert_eq!(coeff(&g, &[0]), rat(1, 2));
        assert_eq!(coeff(&g, &[-1]), rat(1, 2));
    }
}
