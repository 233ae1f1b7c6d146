//! Seeded random rational arrangements for property tests and verification suites.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::Arrangement;
use crate::cohomology::LambdaPoint;
use crate::error::{Error, Result};
use crate::indices::IndexSet;
use crate::linalg::Scalar;

const MAX_TRIES: usize = 20_000;

fn rational(rng: &mut ChaCha8Rng, num: (i64, i64), den: (i64, i64)) -> Scalar {
    let p = rng.gen_range(num.0..=num.1);
    let q = rng.gen_range(den.0..=den.1);
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Draws one candidate: center coordinates `a/b` with `|a| ≤ 20`, `10 ≤ b ≤ 20`, and
/// squared radii `a/b` with `1 ≤ a ≤ 20`, `1 ≤ b ≤ 4`.
pub fn candidate(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Arrangement {
    let centers: Vec<Vec<Scalar>> =
        (0..m).map(|_| (0..n).map(|_| rational(rng, (-20, 20), (10, 20))).collect()).collect();
    let radii: Vec<Scalar> = (0..m).map(|_| rational(rng, (1, 20), (1, 4))).collect();
    Arrangement::from_centers(&centers, &radii).expect("well-formed candidate")
}

/// Whether an arrangement is usable by every exact routine: positive radii, H1, and
/// nonvanishing `B(0⋆J)` on the `(n+2)`-subsets that partial fractions divide by.
pub fn is_generic(arr: &Arrangement, require_h2: bool) -> bool {
    if (1..=arr.m()).any(|j| !arr.r2(j).is_positive()) {
        return false;
    }
    let rep = arr.check_hypotheses();
    if !rep.h1() || (require_h2 && !rep.h2()) {
        return false;
    }
    let n = arr.n();
    if arr.m() >= n + 2 {
        for j in IndexSet::range(arr.m()).subsets().filter(|s| s.len() == n + 2) {
            if arr.b0s(j).is_zero() {
                return false;
            }
        }
    }
    true
}

/// The first generic candidate drawn from a ChaCha stream seeded with `seed`.
pub fn random_arrangement(seed: u64, n: usize, m: usize, require_h2: bool) -> Result<Arrangement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_TRIES {
        let a = candidate(&mut rng, n, m);
        if is_generic(&a, require_h2) {
            return Ok(a);
        }
    }
    Err(Error::Invalid(format!("no generic arrangement found for seed {seed}, n={n}, m={m}")))
}

/// A rational in `[lo, hi]` with denominator at most 20, avoiding `avoid`.
pub fn random_rational_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64, avoid: &[Scalar]) -> Scalar {
    loop {
        let q = rng.gen_range(2..=20i64);
        let p = rng.gen_range(lo * q..=hi * q);
        let x = Scalar::new(BigInt::from(p), BigInt::from(q));
        if !avoid.contains(&x) && !x.is_zero() {
            return x;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonresonant exponents with components in `[-3, 3]`, never `0` or `1`.
pub fn random_lambda(rng: &mut ChaCha8Rng, m: usize) -> LambdaPoint {
    let avoid = [Scalar::zero(), Scalar::from_integer(1.into())];
    loop {
        let lam = LambdaPoint::new((0..m).map(|_| random_rational_in(rng, -3, 3, &avoid)).collect());
        if lam.check_nonresonant().is_ok() {
            return lam;
        }
    }
}

/// Exponents `p/q` with `q ≤ 20` inside `(lo, hi)` (bounds given as multiples of 1/20),
/// never equal to 1; used where chamber integrals must converge.
pub fn random_lambda_between(rng: &mut ChaCha8Rng, m: usize, lo: i64, hi: i64) -> LambdaPoint {
    let one = Scalar::from_integer(1.into());
    let pick = |rng: &mut ChaCha8Rng| loop {
        let q = rng.gen_range(2..=20i64);
        let p = rng.gen_range((lo * q).div_euclid(20) + 1..=(hi * q - 1).div_euclid(20));
        let x = Scalar::new(BigInt::from(p), BigInt::from(q));
        if x != one && x > Scalar::new(lo.into(), 20.into()) && x < Scalar::new(hi.into(), 20.into()) {
            return x;
        }
    };
    LambdaPoint::new((0..m).map(|_| pick(rng)).collect())
}
