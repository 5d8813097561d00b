//! Exact multivariate Laurent polynomials with half-integer frequency offsets.
//!
//! A value represents `t(xi) = s * sum_k h_k exp(2 pi i (k + sigma, xi))`
//! where `sigma` is an offset in {0, 1/2}^d, the coefficients `h_k` are
//! Gaussian rationals, and `s` is an optional symbolic factor sqrt(root).
//! All masks, polyphase components and generators use this representation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gauss::{GaussRat, Rat, Scaled};
use crate::mat::{HalfVec, IMat};
use crate::multiindex::{weight, MIdx};

pub type Key = Vec<i64>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LaurentPoly {
    dim: usize,
    sigma: Vec<bool>,
    root: Option<u64>,
    coeffs: BTreeMap<Key, GaussRat>,
}

impl LaurentPoly {
    pub fn zero(dim: usize) -> Self {
        LaurentPoly {
            dim,
            sigma: vec![false; dim],
            root: None,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(vec![0; dim], GaussRat::one())
    }

    pub fn constant(dim: usize, c: GaussRat) -> Self {
        Self::monomial(vec![0; dim], c)
    }

    pub fn monomial(key: Key, c: GaussRat) -> Self {
        let dim = key.len();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(key, c);
        }
        LaurentPoly {
            dim,
            sigma: vec![false; dim],
            root: None,
            coeffs,
        }
    }

    pub fn from_coeffs(
        dim: usize,
        sigma: Vec<bool>,
        root: Option<u64>,
        coeffs: BTreeMap<Key, GaussRat>,
    ) -> Self {
        let mut p = LaurentPoly {
            dim,
            sigma,
            root,
            coeffs,
        };
        p.canonicalize();
        p
    }

    fn canonicalize(&mut self) {
        self.coeffs.retain(|_, c| !c.is_zero());
        if self.coeffs.is_empty() {
            self.sigma = vec![false; self.dim];
            self.root = None;
            return;
        }
        if let Some(b) = self.root {
            if b == 1 {
                self.root = None;
            } else if let Some(s) = exact_sqrt(b) {
                let f = Rat::from_integer(s.into());
                for c in self.coeffs.values_mut() {
                    *c = c.scale(&f);
                }
                self.root = None;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma(&self) -> &[bool] {
        &self.sigma
    }

    pub fn sigma_is_zero(&self) -> bool {
        self.sigma.iter().all(|&b| !b)
    }

    pub fn root(&self) -> Option<u64> {
        self.root
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, key: &[i64]) -> GaussRat {
        self.coeffs.get(key).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Coefficient including the symbolic scale factor.
    pub fn coeff_scaled(&self, key: &[i64]) -> Scaled {
        match self.root {
            None => Scaled::rational(self.coeff(key)),
            Some(b) => Scaled::with_root(self.coeff(key), b),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &GaussRat)> {
        self.coeffs.iter()
    }

    /// Keys sorted in graded-lex order, the canonical serialization order.
    pub fn keys_graded_lex(&self) -> Vec<Key> {
        let mut keys: Vec<Key> = self.coeffs.keys().cloned().collect();
        keys.sort_by(|a, b| {
            let wa: i64 = a.iter().map(|x| x.abs()).sum();
            let wb: i64 = b.iter().map(|x| x.abs()).sum();
            wa.cmp(&wb).then_with(|| a.cmp(b))
        });
        keys
    }

    pub fn with_sigma(mut self, sigma: Vec<bool>) -> Self {
        assert_eq!(sigma.len(), self.dim);
        if !self.coeffs.is_empty() {
            self.sigma = sigma;
        }
        self
    }

    fn compatible_for_add(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(());
        }
        if self.sigma != other.sigma {
            return Err(Error::OffsetMismatch);
        }
        if self.root != other.root {
            return Err(Error::ScaleMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible_for_add(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let mut coeffs = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            let entry = coeffs.entry(k.clone()).or_insert_with(GaussRat::zero);
            *entry += c;
        }
        Ok(Self::from_coeffs(
            self.dim,
            self.sigma.clone(),
            self.root,
            coeffs,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|(k, c)| (k.clone(), -c)).collect();
        LaurentPoly {
            dim: self.dim,
            sigma: self.sigma.clone(),
            root: self.root,
            coeffs,
        }
    }

    pub fn scalar_mul(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, v)| (k.clone(), v * c))
            .collect();
        LaurentPoly {
            dim: self.dim,
            sigma: self.sigma.clone(),
            root: self.root,
            coeffs,
        }
    }

    pub fn scaled_mul(&self, s: &Scaled) -> Self {
        let base = self.scalar_mul(&s.v);
        match s.root {
            None => base,
            Some(b) => base.mul_sqrt(b, 1),
        }
    }

    /// Multiply by sqrt(base)^pow exactly.
    pub fn mul_sqrt(&self, base: u64, pow: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let s = Scaled::sqrt_pow(base, pow);
        let mut out = self.scalar_mul(&s.v);
        match (out.root, s.root) {
            (_, None) => {}
            (None, Some(b)) => {
                out.root = Some(b);
            }
            (Some(a), Some(b)) => {
                if a == b {
                    let f = Rat::from_integer(a.into());
                    for c in out.coeffs.values_mut() {
                        *c = c.scale(&f);
                    }
                    out.root = None;
                } else {
                    out.root = Some(a * b);
                }
            }
        }
        out.canonicalize();
        out
    }

    /// Exact product; offsets add with carry into the integer keys.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let dim = self.dim;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(dim));
        }
        // per coordinate: sigma_a + sigma_b in {0, 1/2, 1}; both halves carry +1
        let mut sigma = vec![false; dim];
        let mut carry = vec![0i64; dim];
        for l in 0..dim {
            match (self.sigma[l], other.sigma[l]) {
                (false, false) => {}
                (true, false) | (false, true) => sigma[l] = true,
                (true, true) => carry[l] = 1,
            }
        }
        let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
        for (ka, ca) in &self.coeffs {
            for (kb, cb) in &other.coeffs {
                let key: Key = (0..dim).map(|l| ka[l] + kb[l] + carry[l]).collect();
                let prod = ca * cb;
                let entry = coeffs.entry(key).or_insert_with(GaussRat::zero);
                *entry += &prod;
            }
        }
        let root = match (self.root, other.root) {
            (None, None) => None,
            (Some(b), None) | (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => {
                let combined = if a == b { None } else { Some(a * b) };
                if a == b {
                    let f = Rat::from_integer(a.into());
                    for c in coeffs.values_mut() {
                        *c = c.scale(&f);
                    }
                }
                combined
            }
        };
        Ok(Self::from_coeffs(dim, sigma, root, coeffs))
    }

    /// `t(A xi)` for an integer matrix A: frequency v = k + sigma moves to
    /// A^T v. Collisions (singular A) accumulate.
    pub fn substitute(&self, a: &IMat) -> Self {
        assert_eq!(a.d, self.dim);
        let dim = self.dim;
        let at = a.transpose();
        let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
        let mut sigma_out: Option<Vec<bool>> = None;
        for (k, c) in &self.coeffs {
            // twice the frequency, an integer vector
            let twice: Vec<i64> = (0..dim)
                .map(|l| 2 * k[l] + if self.sigma[l] { 1 } else { 0 })
                .collect();
            let image = at.mul_vec(&twice);
            let key: Key = image.iter().map(|t| t.div_euclid(2)).collect();
            let sig: Vec<bool> = image.iter().map(|t| t.rem_euclid(2) == 1).collect();
            match &sigma_out {
                None => sigma_out = Some(sig),
                Some(s) => debug_assert_eq!(s, &sig),
            }
            let entry = coeffs.entry(key).or_insert_with(GaussRat::zero);
            *entry += c;
        }
        Self::from_coeffs(
            dim,
            sigma_out.unwrap_or_else(|| vec![false; dim]),
            self.root,
            coeffs,
        )
    }

    /// Reflection composed with coefficient conjugation: the map
    /// `t(xi) -> conj(t(xi))` on trigonometric polynomials.
    pub fn conj_reflect(&self) -> Self {
        let dim = self.dim;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                let key: Key = (0..dim)
                    .map(|l| -k[l] - if self.sigma[l] { 1 } else { 0 })
                    .collect();
                (key, c.conj())
            })
            .collect();
        LaurentPoly {
            dim,
            sigma: self.sigma.clone(),
            root: self.root,
            coeffs,
        }
    }

    /// Coefficient conjugation without reflection: `t -> conj(t(-xi))`.
    pub fn conj_coeffs(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(k, c)| (k.clone(), c.conj()))
            .collect();
        LaurentPoly {
            dim: self.dim,
            sigma: self.sigma.clone(),
            root: self.root,
            coeffs,
        }
    }

    /// Multiply by `exp(2 pi i (a, xi))` for a half-integer vector a.
    pub fn modulate(&self, a: &HalfVec) -> Self {
        assert_eq!(a.dim(), self.dim);
        let dim = self.dim;
        let mut coeffs: BTreeMap<Key, GaussRat> = BTreeMap::new();
        let mut sigma_out = vec![false; dim];
        for (l, &t) in a.twice.iter().enumerate() {
            let s = if self.sigma[l] { 1 } else { 0 };
            sigma_out[l] = (t + s).rem_euclid(2) == 1;
        }
        for (k, c) in &self.coeffs {
            let key: Key = (0..dim)
                .map(|l| {
                    let s = if self.sigma[l] { 1 } else { 0 };
                    (2 * k[l] + s + a.twice[l]).div_euclid(2)
                })
                .collect();
            coeffs.insert(key, c.clone());
        }
        Self::from_coeffs(dim, sigma_out, self.root, coeffs)
    }

    /// Normalized derivative d_beta(t) = D^beta t(0) / (2 pi i)^[beta]
    /// = sum_k h_k (k + sigma)^beta, an exact scaled Gaussian rational.
    pub fn normalized_derivative(&self, beta: &MIdx) -> Scaled {
        assert_eq!(beta.len(), self.dim);
        let w = weight(beta);
        let mut acc = GaussRat::zero();
        let half = Rat::new(1.into(), 2.into());
        for (k, c) in &self.coeffs {
            let mut factor = Rat::from_integer(1.into());
            for l in 0..self.dim {
                let base = Rat::from_integer(k[l].into())
                    + if self.sigma[l] { half.clone() } else { Rat::from_integer(0.into()) };
                for _ in 0..beta[l] {
                    factor *= &base;
                }
            }
            acc += &c.scale(&factor);
        }
        let _ = w;
        match self.root {
            None => Scaled::rational(acc),
            Some(b) => Scaled::with_root(acc, b),
        }
    }

    /// Value at xi = 0, i.e. the coefficient sum.
    pub fn value_at_zero(&self) -> Scaled {
        self.normalized_derivative(&vec![0; self.dim])
    }

    /// True when every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.coeffs.values().all(|c| c.is_real())
    }

    /// True when `t(-xi) = t(xi)` exactly.
    pub fn is_even(&self) -> bool {
        *self == self.substitute(&IMat::identity(self.dim).neg())
    }

    /// True when `t(-xi) = -t(xi)` exactly.
    pub fn is_odd(&self) -> bool {
        self.substitute(&IMat::identity(self.dim).neg()) == self.neg()
    }

    /// Componentwise min/max of the support frequencies, doubled
    /// (so half-integer offsets stay integral). None when zero.
    pub fn support_box_twice(&self) -> Option<(Vec<i64>, Vec<i64>)> {
        if self.is_zero() {
            return None;
        }
        let dim = self.dim;
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for k in self.coeffs.keys() {
            for l in 0..dim {
                let t = 2 * k[l] + if self.sigma[l] { 1 } else { 0 };
                lo[l] = lo[l].min(t);
                hi[l] = hi[l].max(t);
            }
        }
        Some((lo, hi))
    }

    /// Lower the coefficients to f64, multiplying in the symbolic scale.
    /// Errors when a coefficient has a nonzero imaginary part.
    pub fn to_real_f64(&self) -> Result<Vec<(Key, f64)>> {
        let factor = self.root.map(|b| (b as f64).sqrt()).unwrap_or(1.0);
        self.coeffs
            .iter()
            .map(|(k, c)| {
                if !c.is_real() {
                    return Err(Error::Parse(
                        "complex coefficients cannot be lowered to a real filter".into(),
                    ));
                }
                let (re, _) = c.to_f64_pair();
                Ok((k.clone(), re * factor))
            })
            .collect()
    }

    /// Ratio other/self of the first (graded-lex) nonzero coefficients,
    /// then exact equality of `self * ratio` and `other`.
    /// Returns the scalar when the polynomials agree up to one global factor.
    pub fn global_scalar_to(&self, other: &Self) -> Option<Scaled> {
        if self.is_zero() || other.is_zero() {
            return if self.is_zero() && other.is_zero() {
                Some(Scaled::one())
            } else {
                None
            };
        }
        let ka = self.keys_graded_lex().into_iter().next().unwrap();
        let a = self.coeff_scaled(&ka);
        let b = other.coeff_scaled(&ka);
        let ratio = b.div(&a)?;
        if self.scaled_mul(&ratio) == *other {
            Some(ratio)
        } else {
            None
        }
    }
}

fn exact_sqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    for c in r.saturating_sub(2)..=r + 2 {
        if c * c == n {
            return Some(c);
        }
    }
    None
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if let Some(b) = self.root {
            write!(f, "sqrt({b})*[")?;
        }
        let mut first = true;
        for key in self.keys_graded_lex() {
            let c = &self.coeffs[&key];
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let freq: Vec<String> = key
                .iter()
                .zip(&self.sigma)
                .map(|(k, &s)| {
                    if s {
                        format!("{}/2", 2 * k + 1)
                    } else {
                        format!("{k}")
                    }
                })
                .collect();
            write!(f, "({c})e[{}]", freq.join(","))?;
        }
        if self.root.is_some() {
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Build `Pi_alpha(xi) = prod_j (1 - e^{2 pi i xi_j})^{alpha_j}`.
pub fn pi_alpha(alpha: &MIdx) -> LaurentPoly {
    let d = alpha.len();
    let mut acc = LaurentPoly::one(d);
    for (j, &e) in alpha.iter().enumerate() {
        let mut key = vec![0i64; d];
        key[j] = 1;
        let factor = LaurentPoly::one(d)
            .sub(&LaurentPoly::monomial(key, GaussRat::one()))
            .unwrap();
        for _ in 0..e {
            acc = acc.mul(&factor).unwrap();
        }
    }
    acc
}

/// Even part under coefficient conjugation: (t + conj_reflect(t))/2,
/// the exact analogue of Re t(xi).
pub fn real_part(t: &LaurentPoly) -> LaurentPoly {
    let half = GaussRat::real(Rat::new(1.into(), 2.into()));
    t.add(&t.conj_reflect()).unwrap().scalar_mul(&half)
}

/// (t - conj_reflect(t))/(2i), the exact analogue of Im t(xi).
pub fn imag_part(t: &LaurentPoly) -> LaurentPoly {
    let half_over_i = GaussRat::imaginary(Rat::new((-1).into(), 2.into()));
    t.sub(&t.conj_reflect()).unwrap().scalar_mul(&half_over_i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::rat;

    fn e(k: i64) -> LaurentPoly {
        LaurentPoly::monomial(vec![k], GaussRat::one())
    }

    #[test]
    fn difference_of_squares() {
        let a = LaurentPoly::one(1).sub(&e(1)).unwrap();
        let b = LaurentPoly::one(1).add(&e(1)).unwrap();
        let prod = a.mul(&b).unwrap();
        let expect = LaurentPoly::one(1).sub(&e(2)).unwrap();
        assert_eq!(prod, expect);
    }

    #[test]
    fn offset_carry_on_multiply() {
        // e^{pi i u} * e^{pi i u} = e^{2 pi i u}
        let h = LaurentPoly::monomial(vec![0], GaussRat::one()).with_sigma(vec![true]);
        let prod = h.mul(&h).unwrap();
        assert_eq!(prod, e(1));
    }

    #[test]
    fn normalized_derivatives() {
        // g = -1 + e^{2 pi i u}: d_0 = 0, d_1 = 1
        let g = e(1).sub(&LaurentPoly::one(1)).unwrap();
        assert_eq!(g.normalized_derivative(&vec![0]), Scaled::zero());
        assert_eq!(g.normalized_derivative(&vec![1]), Scaled::one());
        // semi-integer: t = e^{pi i u}: d_1 = 1/2
        let h = LaurentPoly::monomial(vec![0], GaussRat::one()).with_sigma(vec![true]);
        assert_eq!(
            h.normalized_derivative(&vec![1]),
            Scaled::rational(GaussRat::real(rat(1, 2)))
        );
    }

    #[test]
    fn conj_reflect_involution_and_modulate() {
        let t = LaurentPoly::monomial(vec![1], GaussRat::i());
        let r = t.conj_reflect();
        assert_eq!(r, LaurentPoly::monomial(vec![-1], -GaussRat::i()));
        assert_eq!(r.conj_reflect(), t);
        // modulate(1, 1/2) = e^{pi i u}
        let m = LaurentPoly::one(1).modulate(&HalfVec::from_twice(vec![1]));
        assert_eq!(
            m,
            LaurentPoly::monomial(vec![0], GaussRat::one()).with_sigma(vec![true])
        );
        // offsets carry: e^{pi i u} * e^{pi i u} via modulate
        let m2 = m.modulate(&HalfVec::from_twice(vec![1]));
        assert_eq!(m2, e(1));
    }

    #[test]
    fn substitute_reindexes_by_transpose() {
        // t = e^{2 pi i xi_1}, A = M* with M = (1,-2;2,-1): key moves to M e_1 = (1,2)
        let m = IMat::new(2, vec![1, -2, 2, -1]);
        let t = LaurentPoly::monomial(vec![1, 0], GaussRat::one());
        let s = t.substitute(&m.transpose());
        assert_eq!(s, LaurentPoly::monomial(vec![1, 2], GaussRat::one()));
        // semi-integer: e^{pi i xi_1} under 2I -> key (1,0), offset 0
        let h = LaurentPoly::monomial(vec![0, 0], GaussRat::one())
            .with_sigma(vec![true, false]);
        let s2 = h.substitute(&IMat::diag(&[2, 2]));
        assert_eq!(s2, LaurentPoly::monomial(vec![1, 0], GaussRat::one()));
    }

    #[test]
    fn real_poly_conj_reflect_is_reflection() {
        let t = e(1).scalar_mul(&GaussRat::real(rat(1, 2)))
            .add(&LaurentPoly::one(1))
            .unwrap();
        let refl = t.substitute(&IMat::new(1, vec![-1]));
        assert_eq!(t.conj_reflect(), refl);
    }

    #[test]
    fn global_scalar_detection() {
        let t = e(1).add(&e(-1)).unwrap();
        let s = t.mul_sqrt(3, 1).scalar_mul(&GaussRat::real(rat(1, 3)));
        let ratio = t.global_scalar_to(&s).unwrap();
        assert_eq!(ratio, Scaled::with_root(GaussRat::real(rat(1, 3)), 3));
        assert!(t
            .global_scalar_to(&t.add(&e(2)).unwrap())
            .is_none());
    }
}
