//! Sphere arrangements and their Cayley–Menger minors.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};

use crate::cohomology::CohomClass;
use crate::error::{Error, Result};
use crate::indices::IndexSet;
use crate::linalg::{det_bareiss, int, Scalar};

/// A row or column label of the Cayley–Menger matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Zero,
    Star,
    /// Sphere index, 1-based.
    S(usize),
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Zero => write!(f, "0"),
            Sym::Star => write!(f, "*"),
            Sym::S(j) => write!(f, "{j}"),
        }
    }
}

impl std::str::FromStr for Sym {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(Sym::Zero),
            "*" => Ok(Sym::Star),
            t => t
                .parse::<usize>()
                .map(Sym::S)
                .map_err(|_| Error::Invalid(format!("bad minor symbol '{t}'"))),
        }
    }
}

/// `head` followed by the elements of `set` in increasing order.
pub fn syms(head: &[Sym], set: IndexSet) -> Vec<Sym> {
    let mut v = head.to_vec();
    v.extend(set.iter().map(Sym::S));
    v
}

/// `head` followed by `tail` in the given order.
pub fn seq(head: &[Sym], tail: &[usize]) -> Vec<Sym> {
    let mut v = head.to_vec();
    v.extend(tail.iter().map(|&j| Sym::S(j)));
    v
}

/// A row/column selection of the Cayley–Menger matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MinorSpec {
    pub rows: Vec<Sym>,
    pub cols: Vec<Sym>,
}

impl MinorSpec {
    pub fn new(rows: Vec<Sym>, cols: Vec<Sym>) -> Result<Self> {
        if rows.is_empty() || rows.len() != cols.len() {
            return Err(Error::Invalid(format!(
                "minor needs equal nonempty row and column lists, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        Ok(MinorSpec { rows, cols })
    }
}

/// Hypersphere arrangement `f_j(x) = Q(x) + 2 Σ α_{jν} x_ν + α_{j0}`.
pub struct Arrangement {
    n: usize,
    /// Row `j-1` holds `[α_{j1}, .., α_{jn}, α_{j0}]`.
    alpha: Vec<Vec<Scalar>>,
    r2: Vec<Scalar>,
    rho2: Vec<Vec<Scalar>>,
    cache: Mutex<HashMap<(Vec<Sym>, Vec<Sym>), Scalar>>,
    reduced: Mutex<HashMap<IndexSet, CohomClass>>,
}

impl Clone for Arrangement {
    fn clone(&self) -> Self {
        Arrangement::new(self.n, self.alpha.clone()).expect("already validated")
    }
}

impl fmt::Debug for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Arrangement").field("n", &self.n).field("alpha", &self.alpha).finish()
    }
}

impl PartialEq for Arrangement {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.alpha == o.alpha
    }
}

impl Arrangement {
    pub fn new(n: usize, alpha: Vec<Vec<Scalar>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("dimension n must be positive".into()));
        }
        if alpha.is_empty() || alpha.len() > crate::indices::MAX_INDEX {
            return Err(Error::Invalid(format!("sphere count {} out of range", alpha.len())));
        }
        if let Some((j, row)) = alpha.iter().enumerate().find(|(_, r)| r.len() != n + 1) {
            return Err(Error::Invalid(format!(
                "sphere {} has {} coefficients, expected {}",
                j + 1,
                row.len(),
                n + 1
            )));
        }
        let m = alpha.len();
        let r2 = alpha
            .iter()
            .map(|row| row[..n].iter().map(|a| a * a).sum::<Scalar>() - &row[n])
            .collect();
        let rho2 = (0..m)
            .map(|j| {
                (0..m)
                    .map(|k| {
                        (0..n)
                            .map(|v| {
                                let d = &alpha[j][v] - &alpha[k][v];
                                &d * &d
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(Arrangement {
            n,
            alpha,
            r2,
            rho2,
            cache: Mutex::new(HashMap::new()),
            reduced: Mutex::new(HashMap::new()),
        })
    }

    /// Spheres given by centers and squared radii: `α_{jν} = −c_{jν}`, `α_{j0} = |c_j|² − r_j²`.
    pub fn from_centers(centers: &[Vec<Scalar>], radius_sq: &[Scalar]) -> Result<Self> {
        if centers.len() != radius_sq.len() || centers.is_empty() {
            return Err(Error::Invalid("center and radius lists differ in length".into()));
        }
        let n = centers[0].len();
        let alpha = centers
            .iter()
            .zip(radius_sq)
            .map(|(c, r)| {
                let mut row: Vec<Scalar> = c.iter().map(|x| -x).collect();
                row.push(c.iter().map(|x| x * x).sum::<Scalar>() - r);
                row
            })
            .collect();
        Self::new(n, alpha)
    }

    /// Basis reductions of `F_J`, filled by the cohomology layer.
    pub(crate) fn reduction_cache(&self) -> &Mutex<HashMap<IndexSet, CohomClass>> {
        &self.reduced
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[Vec<Scalar>] {
        &self.alpha
    }

    /// Center of sphere `j` (1-based).
    pub fn center(&self, j: usize) -> Vec<Scalar> {
        self.alpha[j - 1][..self.n].iter().map(|a| -a).collect()
    }

    pub fn r2(&self, j: usize) -> &Scalar {
        &self.r2[j - 1]
    }

    pub fn rho2(&self, j: usize, k: usize) -> &Scalar {
        &self.rho2[j - 1][k - 1]
    }

    pub fn all_spheres(&self) -> IndexSet {
        IndexSet::range(self.m())
    }

    pub fn invariants(&self) -> Invariants {
        Invariants { n: self.n, r2: self.r2.clone(), rho2: self.rho2.clone() }
    }

    /// Entry `b(s, t)` of the Cayley–Menger matrix.
    pub fn entry(&self, s: Sym, t: Sym) -> Scalar {
        entry_of(&self.r2, &self.rho2, s, t)
    }

    /// The full matrix ordered `0, ⋆, 1, .., m`.
    pub fn cm_matrix(&self) -> Vec<Vec<Scalar>> {
        let labels = self.labels();
        labels.iter().map(|&s| labels.iter().map(|&t| self.entry(s, t)).collect()).collect()
    }

    pub fn labels(&self) -> Vec<Sym> {
        syms(&[Sym::Zero, Sym::Star], self.all_spheres())
    }

    /// Signed minor `B(rows / cols)`; zero when a symbol repeats.
    pub fn minor(&self, rows: &[Sym], cols: &[Sym]) -> Scalar {
        assert_eq!(rows.len(), cols.len(), "minor needs square selection");
        for s in rows.iter().chain(cols) {
            if let Sym::S(j) = s {
                assert!((1..=self.m()).contains(j), "sphere index {j} out of range");
            }
        }
        let (r, pr) = match sort_with_parity(rows) {
            Some(x) => x,
            None => return Scalar::zero(),
        };
        let (c, pc) = match sort_with_parity(cols) {
            Some(x) => x,
            None => return Scalar::zero(),
        };
        // The matrix is symmetric, so B(R/C) = B(C/R).
        let key = if r <= c { (r, c) } else { (c, r) };
        let cached = self.cache.lock().expect("minor cache poisoned").get(&key).cloned();
        let v = match cached {
            Some(v) => v,
            None => {
                let mat: Vec<Vec<Scalar>> = key
                    .0
                    .iter()
                    .map(|&s| key.1.iter().map(|&t| self.entry(s, t)).collect())
                    .collect();
                let v = det_bareiss(&mat);
                self.cache.lock().expect("minor cache poisoned").insert(key, v.clone());
                v
            }
        };
        if pr == pc {
            v
        } else {
            -v
        }
    }

    pub fn cm_minor(&self, spec: &MinorSpec) -> Scalar {
        self.minor(&spec.rows, &spec.cols)
    }

    /// Principal minor `B(0 ⋆ J)`.
    pub fn b0s(&self, j: IndexSet) -> Scalar {
        let s = syms(&[Sym::Zero, Sym::Star], j);
        self.minor(&s, &s)
    }

    /// Principal minor `B(0 J)`.
    pub fn b0(&self, j: IndexSet) -> Scalar {
        let s = syms(&[Sym::Zero], j);
        self.minor(&s, &s)
    }

    /// `B(rh common / ch common)` with the common tail in increasing order.
    pub fn bx(&self, rh: &[Sym], ch: &[Sym], common: IndexSet) -> Scalar {
        self.minor(&syms(rh, common), &syms(ch, common))
    }

    pub fn nonzero(&self, v: Scalar, what: impl FnOnce() -> String) -> Result<Scalar> {
        if v.is_zero() {
            Err(Error::SingularMinor(what()))
        } else {
            Ok(v)
        }
    }

    /// Principal minor of the Lorentz configuration matrix over sphere indices.
    pub fn a_principal_minor(&self, j: IndexSet) -> Result<Scalar> {
        if j.is_empty() {
            return Ok(Scalar::one());
        }
        let idx = j.to_vec();
        let mut denom = Scalar::one();
        for &a in &idx {
            if self.r2(a).is_zero() {
                return Err(Error::ZeroRadius(a));
            }
            denom *= int(2) * self.r2(a);
        }
        let mat: Vec<Vec<Scalar>> = idx
            .iter()
            .map(|&a| idx.iter().map(|&b| self.r2(a) + self.r2(b) - self.rho2(a, b)).collect())
            .collect();
        Ok(det_bareiss(&mat) / denom)
    }

    /// Principal minor of the Lorentz matrix over `J ∪ {m+1}`, where the extra row has
    /// `a_{j,m+1} = −1/r_j` and `a_{m+1,m+1} = 0`. Rescaling row and column `j` by `r_j`
    /// keeps every entry rational.
    pub fn a_principal_minor_with_infinity(&self, j: IndexSet) -> Result<Scalar> {
        let idx = j.to_vec();
        let p = idx.len();
        let mut denom = Scalar::one();
        for &a in &idx {
            if self.r2(a).is_zero() {
                return Err(Error::ZeroRadius(a));
            }
            denom *= self.r2(a);
        }
        let mut mat = vec![vec![Scalar::zero(); p + 1]; p + 1];
        for (x, &a) in idx.iter().enumerate() {
            for (y, &b) in idx.iter().enumerate() {
                mat[x][y] = (self.r2(a) + self.r2(b) - self.rho2(a, b)) / int(2);
            }
            mat[x][p] = -Scalar::one();
            mat[p][x] = -Scalar::one();
        }
        Ok(det_bareiss(&mat) / denom)
    }

    /// Evaluates both general-position hypotheses over every admissible subset.
    pub fn check_hypotheses(&self) -> HypothesisReport {
        let mut rep = HypothesisReport::default();
        for j in crate::indices::admissible_sets(self.m(), self.n) {
            let p = j.len();
            let bs = self.b0s(j);
            if bs.is_zero() || (p >= 2 && self.b0(j).is_zero()) {
                rep.h1_violations.push(j);
            }
            let signed = if p % 2 == 1 { bs } else { -bs };
            if !signed.is_positive() {
                rep.h2_violations.push(j);
            }
        }
        rep
    }

    /// The nondegeneracy assumed throughout the cohomology layer: H1 plus `B(0⋆J) ≠ 0`
    /// for the `(n+2)`-subsets used in partial fractions.
    pub fn ensure_h1(&self) -> Result<()> {
        let rep = self.check_hypotheses();
        if let Some(j) = rep.h1_violations.first() {
            return Err(Error::SingularMinor(format!("principal minor at {j} (H1 fails)")));
        }
        Ok(())
    }

    /// Exact value of `f_j` at a rational point.
    pub fn eval_f(&self, j: usize, x: &[Scalar]) -> Scalar {
        let a = &self.alpha[j - 1];
        let mut v = a[self.n].clone();
        for (nu, xv) in x.iter().enumerate() {
            v += xv * xv + int(2) * &a[nu] * xv;
        }
        v
    }
}

fn entry_of(r2: &[Scalar], rho2: &[Vec<Scalar>], s: Sym, t: Sym) -> Scalar {
    use Sym::*;
    match (s, t) {
        _ if s == t => Scalar::zero(),
        (Zero, _) | (_, Zero) => Scalar::one(),
        (Star, S(j)) | (S(j), Star) => r2[j - 1].clone(),
        (S(j), S(k)) => rho2[j - 1][k - 1].clone(),
        _ => unreachable!(),
    }
}

/// Sorts a symbol sequence and returns the permutation parity (`true` for odd);
/// `None` when a symbol repeats.
fn sort_with_parity(v: &[Sym]) -> Option<(Vec<Sym>, bool)> {
    let mut s = v.to_vec();
    let mut odd = false;
    for i in 1..s.len() {
        let mut k = i;
        while k > 0 && s[k - 1] > s[k] {
            s.swap(k - 1, k);
            odd = !odd;
            k -= 1;
        }
        if k > 0 && s[k - 1] == s[k] {
            return None;
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((s, odd))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HypothesisReport {
    pub h1_violations: Vec<IndexSet>,
    pub h2_violations: Vec<IndexSet>,
}

impl HypothesisReport {
    pub fn h1(&self) -> bool {
        self.h1_violations.is_empty()
    }
    pub fn h2(&self) -> bool {
        self.h2_violations.is_empty()
    }
}

/// Radii and center distances without the underlying coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Invariants {
    pub n: usize,
    pub r2: Vec<Scalar>,
    pub rho2: Vec<Vec<Scalar>>,
}

impl Invariants {
    pub fn m(&self) -> usize {
        self.r2.len()
    }

    fn b0_of(&self, set: &[usize]) -> Scalar {
        let s = seq(&[Sym::Zero], set);
        let mat: Vec<Vec<Scalar>> = s
            .iter()
            .map(|&a| s.iter().map(|&b| entry_of(&self.r2, &self.rho2, a, b)).collect())
            .collect();
        det_bareiss(&mat)
    }
}

/// Arithmetic needed by the normalized-coordinate reconstruction, so the same code
/// runs on plain floats and on forward-mode duals.
pub trait Real:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn constant(x: f64) -> Self;
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
}

impl Real for f64 {
    fn constant(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Coefficients in the triangular normal form: sphere `n+1` is centered at the origin,
/// sphere `j ≤ n` has nonzero linear coefficients only in components `1..=n+1−j`, and
/// the last of those is positive. Rows are `[α_{j1}, .., α_{jn}, α_{j0}]`.
pub fn normalized_alphas_generic<T: Real>(n: usize, r2: &[T], rho2: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let m = r2.len();
    if m != n + 1 {
        return Err(Error::Invalid(format!("normalized coordinates need m = n+1, got m={m}, n={n}")));
    }
    let h = n + 1;
    let zero = T::constant(0.0);
    let half = T::constant(0.5);
    let gram = |j: usize, k: usize| half * (rho2[j - 1][h - 1] + rho2[k - 1][h - 1] - rho2[j - 1][k - 1]);
    let mut a = vec![vec![zero; n + 1]; m];
    for j in (1..=n).rev() {
        let last = n + 1 - j;
        for k in (j + 1..=n).rev() {
            let col = n + 1 - k;
            let mut s = gram(j, k);
            for nu in 1..col {
                s = s - a[j - 1][nu - 1] * a[k - 1][nu - 1];
            }
            a[j - 1][col - 1] = s / a[k - 1][col - 1];
        }
        let mut rem = gram(j, j);
        for nu in 1..last {
            rem = rem - a[j - 1][nu - 1] * a[j - 1][nu - 1];
        }
        if !(rem.value() > 0.0) {
            return Err(Error::NegativeDiscriminant(j));
        }
        a[j - 1][last - 1] = rem.sqrt();
        a[j - 1][n] = gram(j, j) - r2[j - 1];
    }
    a[h - 1][n] = -r2[h - 1];
    Ok(a)
}

/// Floating-point normalized coordinates reconstructed from exact invariants.
pub fn derive_normalized_alphas(inv: &Invariants) -> Result<Vec<Vec<f64>>> {
    let n = inv.n;
    if inv.m() != n + 1 {
        return Err(Error::Invalid(format!("normalized coordinates need m = n+1, got m={}", inv.m())));
    }
    // The diagonal pivots are ratios of nested minors B(0 j..n+1); check their sign exactly.
    for j in 1..=n {
        let top: Vec<usize> = (j..=n + 1).collect();
        let below: Vec<usize> = (j + 1..=n + 1).collect();
        let ratio = inv.b0_of(&top) / (int(-2) * inv.b0_of(&below));
        if !ratio.is_positive() {
            return Err(Error::NegativeDiscriminant(j));
        }
    }
    let r2: Vec<f64> = inv.r2.iter().map(crate::linalg::to_f64).collect();
    let rho2: Vec<Vec<f64>> =
        inv.rho2.iter().map(|r| r.iter().map(crate::linalg::to_f64).collect()).collect();
    normalized_alphas_generic(n, &r2, &rho2)
}

/// `r_j²` and `ρ_{jk}²` recomputed from float coefficients.
pub fn invariants_f64(n: usize, alpha: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let r2 = alpha.iter().map(|a| a[..n].iter().map(|x| x * x).sum::<f64>() - a[n]).collect();
    let rho2 = alpha
        .iter()
        .map(|a| {
            alpha
                .iter()
                .map(|b| (0..n).map(|v| (a[v] - b[v]) * (a[v] - b[v])).sum())
                .collect()
        })
        .collect();
    (r2, rho2)
}
