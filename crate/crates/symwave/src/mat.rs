//! Small dense integer/rational matrices and half-integer vectors.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::gauss::{rat_i64, Int, Rat};

/// Row-major square integer matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IMat {
    pub d: usize,
    pub a: Vec<i64>,
}

impl IMat {
    pub fn new(d: usize, a: Vec<i64>) -> Self {
        assert_eq!(a.len(), d * d);
        IMat { d, a }
    }

    pub fn identity(d: usize) -> Self {
        let mut a = vec![0; d * d];
        for i in 0..d {
            a[i * d + i] = 1;
        }
        IMat { d, a }
    }

    pub fn diag(entries: &[i64]) -> Self {
        let d = entries.len();
        let mut m = IMat::new(d, vec![0; d * d]);
        for (i, &e) in entries.iter().enumerate() {
            m.a[i * d + i] = e;
        }
        m
    }

    pub fn at(&self, r: usize, c: usize) -> i64 {
        self.a[r * self.d + c]
    }

    pub fn neg(&self) -> Self {
        IMat {
            d: self.d,
            a: self.a.iter().map(|x| -x).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let d = self.d;
        let mut a = vec![0; d * d];
        for r in 0..d {
            for c in 0..d {
                a[c * d + r] = self.at(r, c);
            }
        }
        IMat { d, a }
    }

    pub fn mul(&self, other: &IMat) -> Self {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut a = vec![0i64; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut s: i64 = 0;
                for k in 0..d {
                    s += self.at(r, k) * other.at(k, c);
                }
                a[r * d + c] = s;
            }
        }
        IMat { d, a }
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|r| (0..self.d).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = IMat::identity(self.d);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Determinant by cofactor expansion over i128 (d is small).
    pub fn det(&self) -> i128 {
        fn det_rec(d: usize, a: &[i128]) -> i128 {
            if d == 1 {
                return a[0];
            }
            let mut acc: i128 = 0;
            let mut sign = 1i128;
            for c in 0..d {
                let minor: Vec<i128> = (1..d)
                    .flat_map(|r| (0..d).filter(|&cc| cc != c).map(move |cc| (r, cc)))
                    .map(|(r, cc)| a[r * d + cc])
                    .collect();
                acc += sign * a[c] * det_rec(d - 1, &minor);
                sign = -sign;
            }
            acc
        }
        let a: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        det_rec(self.d, &a)
    }

    /// Exact rational inverse; None if singular.
    pub fn inverse(&self) -> Option<RMat> {
        let d = self.d;
        let mut aug: Vec<Rat> = Vec::with_capacity(d * 2 * d);
        for r in 0..d {
            for c in 0..d {
                aug.push(rat_i64(self.at(r, c)));
            }
            for c in 0..d {
                aug.push(if r == c { Rat::one() } else { Rat::zero() });
            }
        }
        let w = 2 * d;
        for col in 0..d {
            let pivot = (col..d).find(|&r| !aug[r * w + col].is_zero())?;
            if pivot != col {
                for c in 0..w {
                    aug.swap(col * w + c, pivot * w + c);
                }
            }
            let p = aug[col * w + col].clone();
            for c in 0..w {
                aug[col * w + c] = &aug[col * w + c] / &p;
            }
            for r in 0..d {
                if r != col && !aug[r * w + col].is_zero() {
                    let f = aug[r * w + col].clone();
                    for c in 0..w {
                        let sub = &f * &aug[col * w + c];
                        aug[r * w + c] = &aug[r * w + c] - &sub;
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                inv.push(aug[r * w + d + c].clone());
            }
        }
        Some(RMat { d, a: inv })
    }

    /// Characteristic polynomial coefficients c_0..c_d of det(xI - M),
    /// monic, computed by Faddeev-LeVerrier over rationals.
    pub fn char_poly(&self) -> Vec<Int> {
        let d = self.d;
        let mut coeffs: Vec<Rat> = vec![Rat::zero(); d + 1];
        coeffs[d] = Rat::one();
        let mut mk = RMat::identity(d);
        let rm = RMat::from_int(self);
        for k in 1..=d {
            mk = rm.mul(&mk);
            let c = -mk.trace() / rat_i64(k as i64);
            coeffs[d - k] = c.clone();
            for i in 0..d {
                mk.a[i * d + i] = &mk.a[i * d + i] + &c;
            }
        }
        coeffs
            .into_iter()
            .map(|c| {
                debug_assert!(c.denom().is_one());
                c.numer().clone()
            })
            .collect()
    }
}

/// Row-major square rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RMat {
    pub d: usize,
    pub a: Vec<Rat>,
}

impl RMat {
    pub fn identity(d: usize) -> Self {
        let mut a = vec![Rat::zero(); d * d];
        for i in 0..d {
            a[i * d + i] = Rat::one();
        }
        RMat { d, a }
    }

    pub fn from_int(m: &IMat) -> Self {
        RMat {
            d: m.d,
            a: m.a.iter().map(|&x| rat_i64(x)).collect(),
        }
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.a[r * self.d + c]
    }

    pub fn trace(&self) -> Rat {
        (0..self.d).map(|i| self.at(i, i).clone()).sum()
    }

    pub fn mul(&self, other: &RMat) -> RMat {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut a = vec![Rat::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                let mut s = Rat::zero();
                for k in 0..d {
                    s += self.at(r, k) * other.at(k, c);
                }
                a[r * d + c] = s;
            }
        }
        RMat { d, a }
    }

    pub fn mul_ivec(&self, v: &[i64]) -> Vec<Rat> {
        (0..self.d)
            .map(|r| (0..self.d).map(|c| self.at(r, c) * rat_i64(v[c])).sum())
            .collect()
    }

    pub fn mul_rvec(&self, v: &[Rat]) -> Vec<Rat> {
        (0..self.d)
            .map(|r| (0..self.d).map(|c| self.at(r, c) * &v[c]).sum())
            .collect()
    }
}

pub fn is_integer_vec(v: &[Rat]) -> bool {
    v.iter().all(|x| x.denom().is_one())
}

pub fn to_integer_vec(v: &[Rat]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| {
            if x.denom().is_one() {
                i64::try_from(x.numer()).ok()
            } else {
                None
            }
        })
        .collect()
}

/// A vector in (1/2)Z^d, stored as twice its value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HalfVec {
    pub twice: Vec<i64>,
}

impl HalfVec {
    pub fn zero(d: usize) -> Self {
        HalfVec {
            twice: vec![0; d],
        }
    }

    pub fn from_twice(twice: Vec<i64>) -> Self {
        HalfVec { twice }
    }

    pub fn from_int(v: &[i64]) -> Self {
        HalfVec {
            twice: v.iter().map(|x| 2 * x).collect(),
        }
    }

    /// Parse from exact rationals; errors unless every entry is a half-integer.
    pub fn from_rats(v: &[Rat]) -> Result<Self> {
        let twice = v
            .iter()
            .map(|x| {
                let t = x * rat_i64(2);
                if t.denom().is_one() {
                    i64::try_from(t.numer()).map_err(|_| Error::OffsetNotRepresentable)
                } else {
                    Err(Error::OffsetNotRepresentable)
                }
            })
            .collect::<Result<Vec<i64>>>()?;
        Ok(HalfVec { twice })
    }

    pub fn dim(&self) -> usize {
        self.twice.len()
    }

    pub fn as_rats(&self) -> Vec<Rat> {
        self.twice.iter().map(|&t| rat(t, 2)).collect()
    }

    pub fn is_integer(&self) -> bool {
        self.twice.iter().all(|t| t % 2 == 0)
    }

    /// Componentwise floor, an integer vector.
    pub fn floor(&self) -> Vec<i64> {
        self.twice.iter().map(|&t| t.div_euclid(2)).collect()
    }

    /// Fractional part as an offset bitmask (true = 1/2).
    pub fn frac(&self) -> Vec<bool> {
        self.twice.iter().map(|&t| t.rem_euclid(2) == 1).collect()
    }

    pub fn add(&self, other: &HalfVec) -> HalfVec {
        HalfVec {
            twice: self
                .twice
                .iter()
                .zip(&other.twice)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub_int(&self, v: &[i64]) -> HalfVec {
        HalfVec {
            twice: self
                .twice
                .iter()
                .zip(v)
                .map(|(a, b)| a - 2 * b)
                .collect(),
        }
    }

    pub fn neg(&self) -> HalfVec {
        HalfVec {
            twice: self.twice.iter().map(|t| -t).collect(),
        }
    }

    pub fn scale2(&self) -> Vec<i64> {
        self.twice.clone()
    }
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// True when every root of the monic integer polynomial lies strictly
/// outside the closed unit disk, decided with a numeric root finder and a
/// safety margin of 2^-40.
pub fn all_roots_outside_unit_disk(coeffs: &[Int]) -> bool {
    use num::ToPrimitive;
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return true;
    }
    // exact quick rejects for roots at +-1
    let eval_at = |x: i64| -> Int {
        let mut acc = Int::zero();
        for c in coeffs.iter().rev() {
            acc = acc * Int::from(x) + c;
        }
        acc
    };
    if eval_at(1).is_zero() || eval_at(-1).is_zero() {
        return false;
    }
    // Durand-Kerner iteration in f64 complex arithmetic
    let c: Vec<f64> = coeffs.iter().map(|x| x.to_f64().unwrap()).collect();
    let lead = c[deg];
    let p: Vec<f64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: (f64, f64)| -> (f64, f64) {
        let mut acc = (0.0f64, 0.0f64);
        for k in (0..=deg).rev() {
            let re = acc.0 * z.0 - acc.1 * z.1 + p[k];
            let im = acc.0 * z.1 + acc.1 * z.0;
            acc = (re, im);
        }
        acc
    };
    let mut roots: Vec<(f64, f64)> = (0..deg)
        .map(|k| {
            let ang = 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64;
            (1.5 * ang.cos(), 1.5 * ang.sin())
        })
        .collect();
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let zi = roots[i];
            let mut den = (1.0f64, 0.0f64);
            for j in 0..deg {
                if j != i {
                    let diff = (zi.0 - roots[j].0, zi.1 - roots[j].1);
                    den = (
                        den.0 * diff.0 - den.1 * diff.1,
                        den.0 * diff.1 + den.1 * diff.0,
                    );
                }
            }
            let val = eval(zi);
            let n2 = den.0 * den.0 + den.1 * den.1;
            if n2 == 0.0 {
                continue;
            }
            let q = (
                (val.0 * den.0 + val.1 * den.1) / n2,
                (val.1 * den.0 - val.0 * den.1) / n2,
            );
            roots[i] = (zi.0 - q.0, zi.1 - q.1);
            delta = delta.max(q.0.abs() + q.1.abs());
        }
        if delta < 1e-14 {
            break;
        }
    }
    let margin = 1.0 + (2.0f64).powi(-40);
    roots
        .iter()
        .all(|z| (z.0 * z.0 + z.1 * z.1).sqrt() > margin)
}

pub fn parse_imatrix(s: &str) -> Result<IMat> {
    let rows: Vec<Vec<i64>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|e| {
                    e.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad matrix entry {e:?}")))
                })
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse("matrix is not square".into()));
    }
    Ok(IMat::new(d, rows.into_iter().flatten().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = IMat::new(2, vec![1, -2, 2, -1]);
        assert_eq!(m.det(), 3);
        let inv = m.inverse().unwrap();
        let prod = RMat::from_int(&m).mul(&inv);
        assert_eq!(prod, RMat::identity(2));
    }

    #[test]
    fn char_poly_quincunx() {
        let m = IMat::new(2, vec![1, 1, 1, -1]);
        // x^2 - 2 (trace 0, det -2)
        assert_eq!(
            m.char_poly(),
            vec![Int::from(-2), Int::from(0), Int::from(1)]
        );
        assert!(all_roots_outside_unit_disk(&m.char_poly()));
    }

    #[test]
    fn rejects_non_expanding() {
        // eigenvalues 1 and 2
        let m = IMat::new(2, vec![1, 1, 0, 2]);
        assert!(!all_roots_outside_unit_disk(&m.char_poly()));
    }

    #[test]
    fn half_vectors() {
        let h = HalfVec::from_rats(&[rat(1, 2), rat(-3, 2)]).unwrap();
        assert_eq!(h.twice, vec![1, -3]);
        assert_eq!(h.floor(), vec![0, -2]);
        assert_eq!(h.frac(), vec![true, true]);
        assert!(!h.is_integer());
    }
}
