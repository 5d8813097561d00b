//! Exact property checkers: sum rules, vanishing and linear-phase moments,
//! coefficient-level symmetry, and the biorthogonality moment condition.
//! Builders call these before returning; the CLI exposes them directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{format_rat, GaussRat, Rat, Scaled};
use crate::lattice::DilationContext;
use crate::laurent::LaurentPoly;
use crate::mat::{HalfVec, IMat};
use crate::multiindex::{below, binom, delta_n, pow_rat, sub, weight, MIdx};
use crate::polyphase::{decompose, PointSense};

pub const DEFAULT_ORDER_CAP: usize = 8;

/// The moment table lambda_alpha = d_alpha of t(M*^{-1} xi) at the origin,
/// i.e. sum_k h_k (M^{-1}(k + sigma))^alpha, for all [alpha] < n.
pub fn lambda_table(t: &LaurentPoly, ctx: &DilationContext, n: usize) -> Vec<(MIdx, Scaled)> {
    let alphas = delta_n(t.dim(), n as u32);
    let half = Rat::new(1.into(), 2.into());
    alphas
        .into_iter()
        .map(|alpha| {
            let mut acc = GaussRat::zero();
            for (k, c) in t.iter() {
                let freq: Vec<Rat> = k
                    .iter()
                    .zip(t.sigma())
                    .map(|(&ki, &s)| {
                        Rat::from_integer(ki.into())
                            + if s { half.clone() } else { Rat::from_integer(0.into()) }
                    })
                    .collect();
                let w = ctx.minv.mul_rvec(&freq);
                acc += &c.scale(&pow_rat(&w, &alpha));
            }
            let val = match t.root() {
                None => Scaled::rational(acc),
                Some(b) => Scaled::with_root(acc, b),
            };
            (alpha, val)
        })
        .collect()
}

/// Largest n <= cap such that the polyphase moment condition holds for all
/// [beta] < n with the lambda table of the mask itself: for every digit k,
/// d_beta(tau_k) = (1/sqrt m) sum_{alpha <= beta} lambda_alpha
/// C(beta, alpha) (-M^{-1} s_k)^{beta - alpha}.
pub fn check_sum_rule_order(t: &LaurentPoly, ctx: &DilationContext, cap: usize) -> usize {
    let pv = match decompose(t, ctx) {
        Ok(pv) => pv,
        Err(_) => return 0,
    };
    let lambdas = lambda_table(t, ctx, cap);
    let inv_sqrt_m = Scaled::sqrt_pow(ctx.m as u64, -1);
    let minus_minv_s: Vec<Vec<Rat>> = (0..ctx.m)
        .map(|k| ctx.minv.mul_ivec(&ctx.digits[k]).iter().map(|x| -x).collect())
        .collect();
    for n in 1..=cap {
        for beta in delta_n(t.dim(), n as u32) {
            if (weight(&beta) as usize) < n - 1 {
                continue; // lower grades were checked at smaller n
            }
            for k in 0..ctx.m {
                let mut rhs = Scaled::zero();
                for alpha in below(&beta) {
                    let lam = lambdas
                        .iter()
                        .find(|(a, _)| *a == alpha)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_else(Scaled::zero);
                    let factor = binom(&beta, &alpha) * pow_rat(&minus_minv_s[k], &sub(&beta, &alpha));
                    let term = lam.mul(&Scaled::rational(GaussRat::real(factor)));
                    rhs = match rhs.add(&term) {
                        Ok(v) => v,
                        Err(_) => return n - 1,
                    };
                }
                rhs = rhs.mul(&inv_sqrt_m);
                let lhs = pv.comps[k].normalized_derivative(&beta);
                if lhs != rhs {
                    return n - 1;
                }
            }
        }
    }
    cap
}

/// Largest n <= cap with d_beta(t) = 0 for all [beta] < n.
pub fn check_vanishing_moments(t: &LaurentPoly, cap: usize) -> usize {
    for n in 1..=cap {
        for beta in delta_n(t.dim(), n as u32) {
            if (weight(&beta) as usize) != n - 1 {
                continue;
            }
            if !t.normalized_derivative(&beta).is_zero() {
                return n - 1;
            }
        }
    }
    cap
}

/// Check d_beta(t) = c^beta for all [beta] < n, solving for the phase c from
/// the first-order moments. Fails when the phase is not real.
pub fn check_linear_phase_moments(t: &LaurentPoly, n: usize) -> (bool, Vec<Rat>) {
    let d = t.dim();
    if t.value_at_zero() != Scaled::one() {
        return (false, vec![Rat::from_integer(0.into()); d]);
    }
    let mut phase = Vec::with_capacity(d);
    let mut real_phase = true;
    for l in 0..d {
        let mut e = vec![0u32; d];
        e[l] = 1;
        let m = t.normalized_derivative(&e);
        if m.root.is_some() || !m.v.is_real() {
            real_phase = false;
        }
        phase.push(m.v.re.clone());
    }
    if !real_phase {
        return (false, phase);
    }
    for beta in delta_n(d, n as u32) {
        let want = Scaled::rational(GaussRat::real(pow_rat(&phase, &beta)));
        if t.normalized_derivative(&beta) != want {
            return (false, phase);
        }
    }
    (true, phase)
}

/// What kind of symmetry to check.
#[derive(Clone, Debug)]
pub enum SymmetrySpec {
    Point { sense: PointSense, center: HalfVec },
    Axial { center: HalfVec },
    Group { elements: Vec<IMat>, center: HalfVec },
}

/// The symmetry actually found, with its sign(s).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SymmetryDescriptor {
    PointA { center: Vec<String>, sign: i8 },
    PointB { center: Vec<String>, sign: i8 },
    Axial { center: Vec<String>, sign_reflect: i8, sign_axis: i8 },
    Group { center: Vec<String> },
}

fn center_strings(c: &HalfVec) -> Vec<String> {
    c.as_rats().iter().map(format_rat).collect()
}

/// Coefficient-level check h_x = sign * h_{E(x-c)+c} (or its conjugate) for a
/// single affine map. Frequencies are handled in doubled coordinates so
/// half-integer centers stay exact.
fn check_affine(
    t: &LaurentPoly,
    e: &IMat,
    c: &HalfVec,
    sign: i8,
    conjugate: bool,
) -> bool {
    if t.is_zero() {
        return true;
    }
    let d = t.dim();
    for (k, h) in t.iter() {
        let twice_x: Vec<i64> = (0..d)
            .map(|l| 2 * k[l] + if t.sigma()[l] { 1 } else { 0 })
            .collect();
        let shifted: Vec<i64> = twice_x.iter().zip(&c.twice).map(|(x, cc)| x - cc).collect();
        let mapped = e.mul_vec(&shifted);
        let image_twice: Vec<i64> = mapped.iter().zip(&c.twice).map(|(x, cc)| x + cc).collect();
        // the image must live in the same offset class
        let mut key = Vec::with_capacity(d);
        let mut ok = true;
        for l in 0..d {
            let s = if t.sigma()[l] { 1 } else { 0 };
            if (image_twice[l] - s).rem_euclid(2) != 0 {
                ok = false;
                break;
            }
            key.push((image_twice[l] - s) / 2);
        }
        if !ok {
            return false;
        }
        let mut other = t.coeff(&key);
        if conjugate {
            other = other.conj();
        }
        if sign < 0 {
            other = -other;
        }
        if *h != other {
            return false;
        }
    }
    true
}

/// Candidate reflection center from the support hull; None for the zero
/// polynomial or when the hull midpoint is not a half-integer vector.
pub fn detect_center_candidate(t: &LaurentPoly) -> Option<HalfVec> {
    let (lo, hi) = t.support_box_twice()?;
    let twice: Option<Vec<i64>> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| {
            let s = a + b;
            if s.rem_euclid(2) == 0 {
                Some(s / 2)
            } else {
                None
            }
        })
        .collect();
    twice.map(HalfVec::from_twice)
}

/// Detect point symmetry (given sense) about the hull-centered candidate.
pub fn detect_point_symmetry(t: &LaurentPoly, sense: PointSense) -> Option<(HalfVec, i8)> {
    let c = detect_center_candidate(t)?;
    let neg = IMat::identity(t.dim()).neg();
    let conj = matches!(sense, PointSense::B);
    for sign in [1i8, -1] {
        if check_affine(t, &neg, &c, sign, conj) {
            return Some((c, sign));
        }
    }
    None
}

/// Detect axial symmetry (d = 2): reflection and axis-flip signs about the
/// hull-centered candidate.
pub fn detect_axial_symmetry(t: &LaurentPoly) -> Option<(HalfVec, i8, i8)> {
    if t.dim() != 2 {
        return None;
    }
    let c = detect_center_candidate(t)?;
    let neg = IMat::identity(2).neg();
    let y = IMat::new(2, vec![-1, 0, 0, 1]);
    let sr = [1i8, -1]
        .into_iter()
        .find(|&s| check_affine(t, &neg, &c, s, false))?;
    let sa = [1i8, -1]
        .into_iter()
        .find(|&s| check_affine(t, &y, &c, s, false))?;
    Some((c, sr, sa))
}

/// Verify a symmetry spec at the coefficient level; on success the returned
/// descriptor records the detected sign pattern.
pub fn check_symmetry(t: &LaurentPoly, spec: &SymmetrySpec) -> Option<SymmetryDescriptor> {
    match spec {
        SymmetrySpec::Point { sense, center } => {
            let neg = IMat::identity(t.dim()).neg();
            let conj = matches!(sense, PointSense::B);
            for sign in [1i8, -1] {
                if check_affine(t, &neg, center, sign, conj) {
                    return Some(match sense {
                        PointSense::A => SymmetryDescriptor::PointA {
                            center: center_strings(center),
                            sign,
                        },
                        PointSense::B => SymmetryDescriptor::PointB {
                            center: center_strings(center),
                            sign,
                        },
                    });
                }
            }
            None
        }
        SymmetrySpec::Axial { center } => {
            let neg = IMat::identity(2).neg();
            let y = IMat::new(2, vec![-1, 0, 0, 1]);
            let sr = [1i8, -1]
                .into_iter()
                .find(|&s| check_affine(t, &neg, center, s, false))?;
            let sa = [1i8, -1]
                .into_iter()
                .find(|&s| check_affine(t, &y, center, s, false))?;
            Some(SymmetryDescriptor::Axial {
                center: center_strings(center),
                sign_reflect: sr,
                sign_axis: sa,
            })
        }
        SymmetrySpec::Group { elements, center } => {
            if elements
                .iter()
                .all(|e| check_affine(t, e, center, 1, false))
            {
                Some(SymmetryDescriptor::Group {
                    center: center_strings(center),
                })
            } else {
                None
            }
        }
    }
}

/// The biorthogonality moment condition to order n:
/// d_beta(1 - t * conj(td)) = 0 for all [beta] < n.
pub fn check_duality(t: &LaurentPoly, td: &LaurentPoly, n: usize) -> bool {
    let prod = match t.mul(&td.conj_reflect()) {
        Ok(p) => p,
        Err(_) => return false,
    };
    for beta in delta_n(t.dim(), n as u32) {
        let want = if weight(&beta) == 0 {
            Scaled::one()
        } else {
            Scaled::zero()
        };
        if prod.normalized_derivative(&beta) != want {
            return false;
        }
    }
    true
}

/// Where a mask symmetry center lands on the refinable function:
/// C = (M - I)^{-1} c, exact.
pub fn refinable_symmetry_center(ctx: &DilationContext, c: &HalfVec) -> Result<Vec<Rat>> {
    let d = ctx.dim();
    let mut mi = ctx.mat.clone();
    for i in 0..d {
        mi.a[i * d + i] -= 1;
    }
    let inv = mi.inverse().ok_or(Error::Singular)?;
    Ok(inv.mul_rvec(&c.as_rats()))
}

/// One named check in a report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detected_center: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryDescriptor>,
}

impl PropertyRecord {
    pub fn new(name: &str, holds: bool) -> Self {
        PropertyRecord {
            name: name.to_string(),
            holds,
            order: None,
            witness: None,
            detected_center: None,
            symmetry: None,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }

    pub fn with_witness(mut self, w: String) -> Self {
        self.witness = Some(w);
        self
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<PropertyRecord>,
}

impl VerificationReport {
    pub fn push(&mut self, r: PropertyRecord) {
        self.records.push(r);
    }

    pub fn all_hold(&self) -> bool {
        self.records.iter().all(|r| r.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Slow reference route for the sum rule, independent of the polyphase
/// check: evaluates the dilated mask derivatives at the nonzero digit points
/// of M* using exact cyclotomic arithmetic. Used by the test suite to
/// cross-check `check_sum_rule_order`.
pub mod oracle {
    use super::*;
    use num::{Integer, One, Zero};

    /// Cyclotomic polynomial Phi_n as integer coefficients (ascending).
    fn cyclotomic(n: u64) -> Vec<Rat> {
        // x^n - 1 divided by the product of Phi_d over proper divisors d | n
        let mut num = vec![Rat::from_integer((-1).into())];
        num.extend(std::iter::repeat(Rat::from_integer(0.into())).take(n as usize - 1));
        num.push(Rat::one());
        let mut result = num;
        for d in 1..n {
            if n % d == 0 {
                let phi_d = cyclotomic(d);
                result = poly_div_exact(&result, &phi_d);
            }
        }
        result
    }

    fn poly_div_exact(num: &[Rat], den: &[Rat]) -> Vec<Rat> {
        let mut rem: Vec<Rat> = num.to_vec();
        let dn = den.len() - 1;
        let lead = den[dn].clone();
        let mut q = vec![Rat::from_integer(0.into()); rem.len() - dn];
        for i in (dn..rem.len()).rev() {
            let c = &rem[i] / &lead;
            if c.is_zero() {
                continue;
            }
            q[i - dn] = c.clone();
            for j in 0..=dn {
                let sub = &c * &den[j];
                rem[i - dn + j] = &rem[i - dn + j] - &sub;
            }
        }
        debug_assert!(rem.iter().all(|x| x.is_zero()));
        q
    }

    /// Is sum_j coeffs[j] * zeta_N^j zero, with Gaussian rational weights?
    fn is_zero_in_cyclotomic_field(coeffs: &[GaussRat], n: u64) -> bool {
        let phi = cyclotomic(n);
        let dn = phi.len() - 1;
        let mut rem: Vec<GaussRat> = coeffs.to_vec();
        while rem.len() > dn {
            let i = rem.len() - 1;
            let c = rem[i].clone();
            if !c.is_zero() {
                for j in 0..=dn {
                    let sub = &c * &GaussRat::real(phi[j].clone());
                    rem[i - dn + j] -= &sub;
                }
            }
            rem.pop();
        }
        rem.iter().all(|c| c.is_zero())
    }

    /// Direct sum-rule test of order n: all normalized derivatives of
    /// t(M*^{-1} xi) vanish at every nonzero digit of M*.
    pub fn sum_rule_holds(t: &LaurentPoly, ctx: &DilationContext, n: usize) -> bool {
        assert!(t.sigma_is_zero() && t.root().is_none());
        let mt = ctx.mat.transpose();
        let star_ctx = DilationContext::new(mt).expect("M* is a dilation");
        for s in &star_ctx.digits {
            if s.iter().all(|&x| x == 0) {
                continue;
            }
            // exponents (M^{-1} k, s) as rationals with a common denominator
            let mut denom: num::BigInt = 1.into();
            let mut terms: Vec<(Rat, Vec<Rat>)> = Vec::new();
            for (k, _) in t.iter() {
                let w = ctx.minv.mul_ivec(k);
                let r: Rat = w
                    .iter()
                    .zip(s)
                    .map(|(wi, &si)| wi * Rat::from_integer(si.into()))
                    .sum();
                denom = denom.lcm(r.denom());
                terms.push((r, w));
            }
            let nn = u64::try_from(denom.magnitude().clone()).unwrap().max(1);
            for beta in delta_n(t.dim(), n as u32) {
                let mut acc = vec![GaussRat::zero(); nn as usize];
                for ((k, c), (r, w)) in t.iter().zip(&terms) {
                    let _ = k;
                    let scaled = r * Rat::from_integer(num::BigInt::from(nn));
                    debug_assert!(scaled.denom().is_one());
                    let mut j = i64::try_from(scaled.numer()).unwrap() % nn as i64;
                    if j.is_negative() {
                        j += nn as i64;
                    }
                    let factor = pow_rat(w, &beta);
                    acc[j as usize] += &c.scale(&factor);
                }
                if !is_zero_in_cyclotomic_field(&acc, nn) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;
    use crate::laurent::pi_alpha;

    fn poly_1d(pairs: &[(i64, Rat)]) -> LaurentPoly {
        let mut acc = LaurentPoly::zero(1);
        for (k, c) in pairs {
            acc = acc
                .add(&LaurentPoly::monomial(vec![*k], GaussRat::real(c.clone())))
                .unwrap();
        }
        acc
    }

    fn hat() -> LaurentPoly {
        poly_1d(&[(-1, rat(1, 4)), (0, rat(1, 2)), (1, rat(1, 4))])
    }

    fn haar() -> LaurentPoly {
        poly_1d(&[(0, rat(1, 2)), (1, rat(1, 2))])
    }

    #[test]
    fn sum_rule_classics() {
        let ctx = DilationContext::new(IMat::new(1, vec![2])).unwrap();
        assert_eq!(check_sum_rule_order(&haar(), &ctx, 8), 1);
        assert_eq!(check_sum_rule_order(&hat(), &ctx, 8), 2);
        assert!(oracle::sum_rule_holds(&haar(), &ctx, 1));
        assert!(!oracle::sum_rule_holds(&haar(), &ctx, 2));
        assert!(oracle::sum_rule_holds(&hat(), &ctx, 2));
        assert!(!oracle::sum_rule_holds(&hat(), &ctx, 3));
    }

    #[test]
    fn vanishing_moments() {
        let t = poly_1d(&[(0, rat(-1, 1)), (1, rat(1, 1))]);
        assert_eq!(check_vanishing_moments(&t, 8), 1);
        let p = pi_alpha(&vec![2, 0]);
        assert_eq!(check_vanishing_moments(&p, 8), 2);
    }

    #[test]
    fn linear_phase() {
        let (ok, c) = check_linear_phase_moments(&hat(), 2);
        assert!(ok);
        assert_eq!(c, vec![rat(0, 1)]);
        // shifted hat at {0,1,2}: phase 1
        let shifted = poly_1d(&[(0, rat(1, 4)), (1, rat(1, 2)), (2, rat(1, 4))]);
        let (ok, c) = check_linear_phase_moments(&shifted, 2);
        assert!(ok);
        assert_eq!(c, vec![rat(1, 1)]);
        // Haar fails at order 2: d_2 = 1/2 != (1/2)^2
        let (ok, c) = check_linear_phase_moments(&haar(), 2);
        assert!(ok);
        assert_eq!(c, vec![rat(1, 2)]);
        let (ok2, _) = check_linear_phase_moments(&haar(), 3);
        assert!(!ok2);
    }

    #[test]
    fn symmetry_detection() {
        let (c, sign) = detect_point_symmetry(&hat(), PointSense::A).unwrap();
        assert_eq!(c.twice, vec![0]);
        assert_eq!(sign, 1);
        let (c, sign) = detect_point_symmetry(&haar(), PointSense::A).unwrap();
        assert_eq!(c.twice, vec![1]);
        assert_eq!(sign, 1);
        // antisymmetric example
        let odd = poly_1d(&[(-1, rat(-1, 1)), (1, rat(1, 1))]);
        let (c, sign) = detect_point_symmetry(&odd, PointSense::A).unwrap();
        assert_eq!(c.twice, vec![0]);
        assert_eq!(sign, -1);
    }

    #[test]
    fn duality_moments() {
        // hat vs 1 at n = 2
        assert!(check_duality(&hat(), &LaurentPoly::one(1), 2));
        assert!(!check_duality(&haar(), &LaurentPoly::one(1), 2));
    }

    #[test]
    fn refinable_center() {
        let ctx = DilationContext::new(IMat::diag(&[2, 2])).unwrap();
        let c = refinable_symmetry_center(&ctx, &HalfVec::from_int(&[1, 1])).unwrap();
        assert_eq!(c, vec![rat(1, 1), rat(1, 1)]);
        let ctx1 = DilationContext::new(IMat::new(1, vec![3])).unwrap();
        let c = refinable_symmetry_center(&ctx1, &HalfVec::from_int(&[1])).unwrap();
        assert_eq!(c, vec![rat(1, 2)]);
    }
}
