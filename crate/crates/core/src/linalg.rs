//! Exact dense linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_f64(x: &Scalar) -> f64 {
    // Ratio of big integers can overflow f64 even when the quotient is modest.
    let (n, d) = (x.numer(), x.denom());
    let shift = n.bits().max(d.bits()) as i64 - 1000;
    if shift <= 0 {
        return big_to_f64(n) / big_to_f64(d);
    }
    let s = shift as u64;
    big_to_f64(&(n >> s)) / big_to_f64(&(d >> s))
}

fn big_to_f64(x: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Determinant by fraction-free elimination. Rows are scaled to integers first
/// so every intermediate division is exact in `BigInt`.
pub fn det_bareiss(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return Scalar::one();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in m {
        let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale *= &l;
        a.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return Scalar::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone() * sign;
    Scalar::new(d, scale)
}

/// Laplace expansion along the first row; the independent oracle for small sizes.
pub fn det_cofactor(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    match n {
        0 => Scalar::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Scalar::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let sub: Vec<Vec<Scalar>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = &m[0][c] * det_cofactor(&sub);
                if c % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
    }
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse(m: &[Vec<Scalar>]) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut a: Vec<Vec<Scalar>> = m.to_vec();
    let mut inv: Vec<Vec<Scalar>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] /= &piv;
            inv[c][j] /= &piv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                let t = &f * &a[c][j];
                a[r][j] -= t;
                let t = &f * &inv[c][j];
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![Scalar::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn is_identity(a: &[Vec<Scalar>]) -> bool {
    a.iter().enumerate().all(|(i, r)| {
        r.iter().enumerate().all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    })
}

pub fn abs(x: &Scalar) -> Scalar {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let a = m(&[&[0, 1, 1, 1], &[1, 0, 4, 4], &[1, 4, 0, 9], &[1, 4, 9, 0]]);
        assert_eq!(det_bareiss(&a), det_cofactor(&a));
        assert_eq!(det_bareiss(&a), int(-63));
    }

    #[test]
    fn bareiss_handles_zero_pivot_and_fractions() {
        let mut a = m(&[&[0, 2, 1], &[3, 0, 5], &[1, 1, 0]]);
        a[1][2] = frac(5, 7);
        assert_eq!(det_bareiss(&a), det_cofactor(&a));
        let s = m(&[&[1, 2], &[2, 4]]);
        assert!(det_bareiss(&s).is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&a).unwrap();
        assert!(is_identity(&mat_mul(&a, &inv)));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn to_f64_survives_huge_parts() {
        let big = Scalar::new(BigInt::from(3) << 2000u32, BigInt::from(2) << 2000u32);
        assert!((to_f64(&big) - 1.5).abs() < 1e-15);
    }
}
