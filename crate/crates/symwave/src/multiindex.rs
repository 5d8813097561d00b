//! Multi-index helpers: graded sets, binomials, componentwise order.

use crate::gauss::{rat_i64, GaussRat, Rat};

pub type MIdx = Vec<u32>;

pub fn weight(a: &[u32]) -> u32 {
    a.iter().sum()
}

pub fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Indices of odd coordinates.
pub fn odd_set(a: &[u32]) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, &x)| x % 2 == 1)
        .map(|(i, _)| i)
        .collect()
}

fn compositions(d: usize, w: u32, out: &mut Vec<MIdx>, prefix: &mut MIdx) {
    if d == 1 {
        prefix.push(w);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=w).rev() {
        prefix.push(first);
        compositions(d - 1, w - first, out, prefix);
        prefix.pop();
    }
}

/// All alpha in Z_+^d with [alpha] < n, in graded lexicographic order
/// (by weight, then lex descending on the first coordinate to match the
/// usual 1, x, y, x^2, xy, y^2 listing).
pub fn delta_n(d: usize, n: u32) -> Vec<MIdx> {
    let mut out = Vec::new();
    for w in 0..n {
        compositions(d, w, &mut out, &mut Vec::new());
    }
    out
}

/// The even-weight subset of `delta_n`.
pub fn delta_e_n(d: usize, n: u32) -> Vec<MIdx> {
    delta_n(d, n)
        .into_iter()
        .filter(|a| weight(a) % 2 == 0)
        .collect()
}

/// All alpha with [alpha] == n exactly.
pub fn grade_n(d: usize, n: u32) -> Vec<MIdx> {
    let mut out = Vec::new();
    compositions(d, n, &mut out, &mut Vec::new());
    out
}

fn binom_u64(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Product of componentwise binomial coefficients C(b, a).
pub fn binom(b: &[u32], a: &[u32]) -> Rat {
    let mut acc: u64 = 1;
    for (x, y) in b.iter().zip(a) {
        acc *= binom_u64(*x, *y);
    }
    rat_i64(acc as i64)
}

/// a^beta for a rational vector, with 0^0 = 1.
pub fn pow_rat(a: &[Rat], beta: &[u32]) -> Rat {
    let mut acc = Rat::from_integer(1.into());
    for (base, &e) in a.iter().zip(beta) {
        for _ in 0..e {
            acc *= base;
        }
    }
    acc
}

/// a^beta for a complex vector.
pub fn pow_gauss(a: &[GaussRat], beta: &[u32]) -> GaussRat {
    let mut acc = GaussRat::one();
    for (base, &e) in a.iter().zip(beta) {
        for _ in 0..e {
            acc = &acc * base;
        }
    }
    acc
}

/// All alpha with alpha <= b componentwise.
pub fn below(b: &[u32]) -> Vec<MIdx> {
    let mut out = vec![Vec::new()];
    for &bi in b {
        let mut next = Vec::new();
        for prefix in &out {
            for v in 0..=bi {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub fn sub(b: &[u32], a: &[u32]) -> MIdx {
    b.iter().zip(a).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_enumeration() {
        let d2 = delta_n(2, 3);
        assert_eq!(
            d2,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert_eq!(delta_e_n(2, 3).len(), 4);
        assert_eq!(grade_n(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(&[3, 2], &[1, 2]), rat_i64(3));
        assert_eq!(binom(&[2, 2], &[3, 0]), rat_i64(0));
    }
}
