//! Seeded verification suites. Each check compares two independently computed routes
//! and returns the number of comparisons made, or [`Error::IdentityFailed`] naming the
//! first mismatch.

use num_traits::{One, Zero};

use crate::arrangement::{Arrangement, Sym};
use crate::cohomology::{
    beta, beta_closed, f_in_w0, reduce_to_nbc, standard_form, w0_class_in_f, w0_in_f, w0_relation, CohomClass,
    Kind, LambdaPoint, Reducer,
};
use crate::connection::{
    gm_matrix, one_dim_closed_column, pullback_class, pullback_to_alpha, two_sphere_closed, wronskian_trace,
    zeta_forms, GaussManin, Zeta,
};
use crate::contiguity::{
    eta, gamma_raw, gamma_tilde, gamma_tilde_recurrence, gamma_tilde_stokes, is_adjacent_support, mult_diff,
    mult_fj, mult_fj_inverse, mult_fj_w0, mult_fj_w0_chain,
};
use crate::error::{Error, Result};
use crate::indices::{admissible_sets, basis, dimension, nbc_basis, IndexSet};
use crate::linalg::{det_bareiss, det_cofactor, int, Scalar};
use crate::random::{random_arrangement, random_lambda, random_lambda_between, rng};
use crate::verify::{chambers_1d, verify_gauss_manin, verify_identity, Integrand, Tangent};

use Sym::{Star, Zero as O, S};

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::IdentityFailed(what()))
    }
}

fn with_head(head: &[Sym], set: IndexSet) -> Vec<Sym> {
    head.iter().copied().chain(set.iter().map(S)).collect()
}

/// Cofactor and principal-minor identities of the Cayley–Menger matrix:
/// `2^p Π r_j² A(J) = (−1)^{p−1} B(0⋆J)`, both row expansions of `B(0 J)` and
/// `B(0⋆J)`, the vanishing of `B(0 J)` and the Sylvester identity at `|J| = n+2`,
/// and Bareiss against cofactor expansion on the full matrix.
pub fn determinant_identities(arr: &Arrangement) -> Result<usize> {
    let (n, m) = (arr.n(), arr.m());
    let all = arr.all_spheres();
    let mut count = 0;
    for j in admissible_sets(m, n).into_iter().filter(|s| !s.is_empty()) {
        let p = j.len();
        let lhs = j.iter().fold(int(1 << p), |acc, i| acc * arr.r2(i)) * arr.a_principal_minor(j)?;
        let sign = if p % 2 == 1 { int(1) } else { int(-1) };
        ensure(lhs == sign * arr.b0s(j), || format!("principal-minor identity at J={j}"))?;
        count += 1;
    }
    for j in all.subsets().filter(|s| !s.is_empty() && s.len() <= n + 2) {
        let mut sum = Scalar::zero();
        for mu in j.iter() {
            let rest = j.without(mu);
            sum += arr.minor(&with_head(&[O, Star], rest), &with_head(&[O, S(mu)], rest));
        }
        ensure(sum == arr.b0(j), || format!("row expansion of B(0{j})"))?;
        for a in all.minus(j).iter() {
            let mut sum = arr.minor(&with_head(&[O, S(a)], j), &with_head(&[O, Star], j));
            for mu in j.iter() {
                let rest = j.without(mu);
                sum += arr.minor(&with_head(&[O, S(a), Star], rest), &with_head(&[O, S(mu), Star], rest));
            }
            ensure(sum == arr.b0s(j), || format!("row expansion of B(0*{j}) through sphere {a}"))?;
        }
        count += 1;
    }
    for j in all.subsets().filter(|s| s.len() == n + 2) {
        ensure(arr.b0(j).is_zero(), || format!("B(0{j}) should vanish for n+2 centers"))?;
        for mu in j.iter() {
            for nu in j.iter().filter(|&nu| nu > mu) {
                let (a, b) = (j.without(mu), j.without(nu));
                let off = arr.minor(&with_head(&[O], a), &with_head(&[O], b));
                ensure(arr.b0(a) * arr.b0(b) == &off * &off, || format!("Sylvester identity at J={j}, {mu},{nu}"))?;
                count += 1;
            }
        }
    }
    if m <= 5 {
        let b = arr.cm_matrix();
        ensure(det_bareiss(&b) == det_cofactor(&b), || "Bareiss against cofactor expansion".into())?;
        count += 1;
    }
    Ok(count)
}

/// `η_J = 1` for every nonempty `J ⊆ {1..n+1}`.
pub fn eta_identities(arr: &Arrangement) -> Result<usize> {
    let mut count = 0;
    for j in IndexSet::range(arr.n() + 1).subsets().filter(|s| !s.is_empty()) {
        ensure(eta(arr, j)?.is_one(), || format!("η at J={j}"))?;
        count += 1;
    }
    Ok(count)
}

/// `β` by recurrence against the chain sum, and the `F ↔ W₀` transition inverting
/// exactly in both directions.
pub fn beta_round_trip(arr: &Arrangement) -> Result<usize> {
    let mut count = 0;
    for j in admissible_sets(arr.m(), arr.n()).into_iter().filter(|s| !s.is_empty()) {
        for k in j.subsets() {
            ensure(beta(arr, k, j)? == beta_closed(arr, k, j)?, || format!("β at K={k}, J={j}"))?;
            count += 1;
        }
        ensure(w0_class_in_f(arr, &f_in_w0(arr, j)?) == CohomClass::f(j), || format!("F→W₀→F at J={j}"))?;
        let mut back = CohomClass::zero(Kind::W0);
        for (k, c) in w0_in_f(arr, j).terms() {
            back.add_scaled(&f_in_w0(arr, *k)?, c);
        }
        ensure(back == CohomClass::w0(j), || format!("W₀→F→W₀ at J={j}"))?;
        count += 2;
    }
    Ok(count)
}

/// The three lowering routes agree for every admissible `(j, J)`, every raw lowering
/// is adjacent to `J`, and `γ̃` is affine in `λ` on the segment `λ, λ', (λ+λ')/2`.
pub fn lowering_routes(arr: &Arrangement, lam: &LambdaPoint, other: &LambdaPoint) -> Result<usize> {
    let m = arr.m();
    let half = Scalar::new(1.into(), 2.into());
    let mid = LambdaPoint::new(lam.values().iter().zip(other.values()).map(|(x, y)| (x + y) * &half).collect());
    let mut count = 0;
    for jset in admissible_sets(m, arr.n()) {
        for j in 1..=m {
            let t = gamma_tilde(arr, lam, j, jset)?;
            let r = gamma_tilde_recurrence(arr, lam, j, jset)?;
            let s = gamma_tilde_stokes(arr, lam, j, jset)?;
            ensure(t == r && r == s, || format!("lowering routes at j={j}, J={jset}"))?;
            if !jset.is_empty() {
                ensure(is_adjacent_support(jset, &gamma_raw(arr, lam, j, jset)?), || {
                    format!("lowering support at j={j}, J={jset}")
                })?;
            }
            let mut avg = t.scaled(&half);
            avg.add_scaled(&gamma_tilde(arr, other, j, jset)?, &half);
            ensure(gamma_tilde(arr, &mid, j, jset)? == avg, || format!("λ-linearity at j={j}, J={jset}"))?;
            count += 1;
        }
    }
    Ok(count)
}

/// Raising by the recursion against the inverted lowering matrix, the difference
/// relation against raising, and (for `m = n+1`) the recursion against the chain form.
pub fn raising_routes(arr: &Arrangement, lam: &LambdaPoint) -> Result<usize> {
    let (n, m) = (arr.n(), arr.m());
    let red = Reducer::new(arr, Some(lam));
    let mut count = 0;
    for jset in basis(m, n) {
        for j in 1..=m {
            ensure(mult_fj(arr, lam, j, jset)? == mult_fj_inverse(arr, lam, j, jset)?, || {
                format!("raising at j={j}, J={jset}")
            })?;
            count += 1;
        }
    }
    let varpi = red.reduce(&CohomClass::f(IndexSet::EMPTY))?;
    for j in 1..=m {
        for k in (1..=m).filter(|&k| k != j) {
            let lhs = red.reduce(&mult_diff(arr, lam, j, k)?)?;
            let mut rhs = mult_fj(arr, lam, j, IndexSet::singleton(k))?;
            rhs.add_scaled(&varpi, &-Scalar::one());
            ensure(lhs == rhs, || format!("difference relation at j={j}, k={k}"))?;
            count += 1;
        }
    }
    if m == n + 1 {
        for jset in IndexSet::range(n + 1).subsets().filter(|s| s.len() <= n) {
            ensure(mult_fj_w0(arr, lam, jset)? == mult_fj_w0_chain(arr, lam, jset)?, || {
                format!("raising chain form at J={jset}")
            })?;
            count += 1;
        }
    }
    Ok(count)
}

/// Recursion-built connection against the closed forms: the two-sphere matrix, the
/// one-dimensional columns (compared after pullback to `α`), the Wronskian trace for
/// two spheres, and the vanishing of `ζ_{jkl}` on configuration space.
pub fn closed_form_connection(arr: &Arrangement, lam: &LambdaPoint) -> Result<usize> {
    let (n, m) = (arr.n(), arr.m());
    let mut count = 0;
    if m == 2 {
        let rec = gm_matrix(arr, lam)?;
        let closed = two_sphere_closed(arr, lam)?;
        for &k in &rec.basis {
            for &j in &rec.basis {
                ensure(rec.get(k, j) == closed.get(k, j), || format!("two-sphere connection at K={k}, J={j}"))?;
                count += 1;
            }
        }
        let (t, c) = wronskian_trace(arr, lam)?;
        ensure(t == c, || "Wronskian trace".into())?;
        count += 1;
    }
    if n == 1 && m >= 3 {
        let red = Reducer::new(arr, Some(lam));
        let mut gm = GaussManin::new(arr);
        for j in basis(m, 1) {
            let closed = red.reduce(&one_dim_closed_column(arr, lam, j)?)?;
            let rec = gm.column(lam, j, None)?;
            ensure(pullback_class(arr, &closed) == pullback_class(arr, &rec), || {
                format!("one-dimensional connection column J={j}")
            })?;
            count += 1;
        }
        for (a, b, c) in [(1, 2, 3), (3, 1, 2), (2, 3, 1)] {
            ensure(pullback_to_alpha(arr, &zeta_forms(arr, Zeta::Triple(a, b, c))?).is_empty(), || {
                format!("ζ_{a}{b}{c} on configuration space")
            })?;
            count += 1;
        }
    }
    Ok(count)
}

/// NBC cardinality against the dimension formula, idempotent reduction, and (for
/// `n = 1`) the chamber count.
pub fn structure(arr: &Arrangement) -> Result<usize> {
    let (n, m) = (arr.n(), arr.m());
    let nbc = nbc_basis(m, n)?;
    ensure(nbc.len() == dimension(m, n), || format!("NBC size at m={m}, n={n}"))?;
    let mut count = 1;
    for j in admissible_sets(m, n).into_iter().filter(|s| !s.is_empty()) {
        let once = reduce_to_nbc(arr, &CohomClass::f(j))?;
        ensure(once.keys().all(|k| nbc.contains(&k)), || format!("reduction of F_{j} leaves the basis"))?;
        ensure(reduce_to_nbc(arr, &once)? == once, || format!("reduction of F_{j} is not idempotent"))?;
        count += 1;
    }
    if n == 1 {
        ensure(chambers_1d(arr)?.len() == 2 * m - 1, || format!("chamber count at m={m}"))?;
        count += 1;
    }
    Ok(count)
}

/// One named quadrature comparison.
#[derive(Clone, Debug)]
pub struct QuadratureCase {
    pub name: String,
    pub worst: f64,
    pub chambers: usize,
}

/// Every `F`-class identity of the cohomology and contiguity layers, integrated on
/// every bounded chamber of a one-dimensional arrangement. `lam` must have components
/// in `(0, 2)`; lowering cases are included for directions with `λ_j > 1`.
pub fn quadrature_identities(arr: &Arrangement, lam: &LambdaPoint, tol: f64) -> Result<Vec<QuadratureCase>> {
    let m = arr.m();
    let chambers = chambers_1d(arr)?;
    let lf = lam.to_f64();
    let mut cases = Vec::new();
    let mut run = |name: String, lhs: Integrand, rhs: Integrand| -> Result<()> {
        let rep = verify_identity(arr, &lf, &lhs, &rhs, &chambers, tol)?;
        ensure(rep.passed(), || format!("{name}: residual {:e}", rep.worst()))?;
        cases.push(QuadratureCase { name, worst: rep.worst(), chambers: chambers.len() });
        Ok(())
    };
    let varpi = Integrand::f(m, IndexSet::EMPTY);
    let t = int(2) * lam.inf() + int(1);
    run("standard form".into(), varpi.scaled(&t), Integrand::from_class(arr, &standard_form(arr, lam)?))?;
    for jset in basis(m, 1) {
        for j in 1..=m {
            let lhs = Integrand::f(m, jset).times_f(j, 1);
            run(format!("raising j={j} J={jset}"), lhs, Integrand::from_class(arr, &mult_fj(arr, lam, j, jset)?))?;
        }
    }
    for j in 1..=m {
        for k in (1..=m).filter(|&k| k != j) {
            let fk = Integrand::f(m, IndexSet::singleton(k));
            let lhs = fk.times_f(j, 1).minus(&fk.times_f(k, 1));
            run(format!("difference j={j} k={k}"), lhs, Integrand::from_class(arr, &mult_diff(arr, lam, j, k)?))?;
        }
    }
    for j in (1..=m).filter(|&j| lf[j - 1] > 1.0) {
        for jset in basis(m, 1).into_iter().filter(|s| !s.contains(j)) {
            let lhs = Integrand::f(m, jset).times_f(j, -1).scaled(&(lam.get(j) - int(1)));
            let rhs = Integrand::from_class(arr, &gamma_tilde(arr, lam, j, jset)?);
            run(format!("lowering j={j} J={jset}"), lhs, rhs)?;
        }
    }
    if m >= 3 {
        for k in IndexSet::range(m).subsets_of_size(2) {
            for a in k.complement(m).iter() {
                let lhs = Integrand::from_class(arr, &CohomClass::w0(k));
                let rhs = Integrand::from_class(arr, &w0_relation(arr, k, a)?);
                run(format!("second-kind relation K={k} a={a}"), lhs, rhs)?;
            }
        }
    }
    Ok(cases)
}

/// Unit tangents in `α`: every center and every constant term.
pub fn coordinate_tangents(m: usize) -> Vec<(String, Tangent)> {
    let mut out = Vec::new();
    for j in 1..=m {
        out.push((format!("center of sphere {j}"), Tangent::from([((j, 1), 1.0)])));
        out.push((format!("constant term of sphere {j}"), Tangent::from([((j, 0), 1.0)])));
    }
    out
}

/// Finite-difference connection checks along the given tangents.
pub fn connection_by_differences(
    arr: &Arrangement,
    lam: &LambdaPoint,
    tangents: &[(String, Tangent)],
    tol: f64,
) -> Result<Vec<QuadratureCase>> {
    let mut cases = Vec::new();
    for (name, t) in tangents {
        let rep = verify_gauss_manin(arr, lam, t, 1e-3, tol)?;
        ensure(rep.passed(), || format!("connection along {name}: residual {:e}", rep.worst()))?;
        cases.push(QuadratureCase { name: name.clone(), worst: rep.worst(), chambers: rep.checks.len() });
    }
    Ok(cases)
}

/// Which suite to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Exact,
    Quadrature,
    GaussManin,
    All,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub lines: Vec<CheckLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    fn record(&mut self, name: String, r: Result<String>) {
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(e) => (false, e.to_string()),
        };
        self.lines.push(CheckLine { name, passed, detail });
    }
}

/// A generic arrangement and a second seed-derived stream for exponents.
fn arrangement_for(seed: u64, n: usize, m: usize, salt: u64) -> Result<Arrangement> {
    random_arrangement(seed.wrapping_mul(1_000_003).wrapping_add(salt), n, m, true)
}

/// Draws exponents in `[lo, hi]/20` until the connection matrix is defined.
pub fn connection_lambda(arr: &Arrangement, seed: u64, lo: i64, hi: i64) -> Result<LambdaPoint> {
    let mut r = rng(seed);
    for _ in 0..100 {
        let lam = random_lambda_between(&mut r, arr.m(), lo, hi);
        if gm_matrix(arr, &lam).is_ok() {
            return Ok(lam);
        }
    }
    Err(Error::Invalid(format!("no admissible exponents found for seed {seed}")))
}

/// Runs a suite at a fixed seed; identical seeds give identical reports.
pub fn run_suite(suite: Suite, seed: u64, tol: Option<f64>) -> SuiteReport {
    let mut rep = SuiteReport { seed, lines: Vec::new() };
    if matches!(suite, Suite::Exact | Suite::All) {
        exact_suite(seed, &mut rep);
    }
    if matches!(suite, Suite::Quadrature | Suite::All) {
        let tol = tol.unwrap_or(1e-6);
        for m in 2..=4 {
            let name = format!("quadrature identities, m={m}");
            let r = (|| {
                let a = arrangement_for(seed, 1, m, 300 + m as u64)?;
                let lam = random_lambda_between(&mut rng(seed ^ (m as u64) << 8), m, 21, 36);
                let cases = quadrature_identities(&a, &lam, tol)?;
                let worst = cases.iter().map(|c| c.worst).fold(0.0, f64::max);
                Ok(format!("{} identities, worst residual {worst:.2e}", cases.len()))
            })();
            rep.record(name, r);
        }
    }
    if matches!(suite, Suite::GaussManin | Suite::All) {
        let tol = tol.unwrap_or(1e-5);
        for m in 2..=3 {
            let name = format!("connection by finite differences, m={m}");
            let r = (|| {
                let a = arrangement_for(seed, 1, m, 400 + m as u64)?;
                let lam = connection_lambda(&a, seed.wrapping_add(m as u64), 4, 36)?;
                let tangents = coordinate_tangents(m);
                let cases = connection_by_differences(&a, &lam, &tangents, tol)?;
                let worst = cases.iter().map(|c| c.worst).fold(0.0, f64::max);
                Ok(format!("{} tangents, worst residual {worst:.2e}", cases.len()))
            })();
            rep.record(name, r);
        }
    }
    rep
}

fn exact_suite(seed: u64, rep: &mut SuiteReport) {
    let shapes = [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)];
    for (i, &(n, m)) in shapes.iter().enumerate() {
        let r = (|| {
            let a = arrangement_for(seed, n, m, i as u64)?;
            let mut r = rng(seed.wrapping_add(17 * i as u64));
            let (l1, l2) = (random_lambda(&mut r, m), random_lambda(&mut r, m));
            let mut total = determinant_identities(&a)?;
            total += beta_round_trip(&a)?;
            total += structure(&a)?;
            if m == n + 1 {
                total += eta_identities(&a)?;
            }
            total += lowering_routes(&a, &l1, &l2)?;
            total += raising_routes(&a, &l1)?;
            total += closed_form_connection(&a, &l1)?;
            Ok(format!("{total} exact comparisons"))
        })();
        rep.record(format!("exact identities, n={n}, m={m}"), r);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_suite_is_deterministic_and_passes() {
        let a = run_suite(Suite::Exact, 7, None);
        let b = run_suite(Suite::Exact, 7, None);
        assert_eq!(a, b);
        assert!(a.passed(), "{:#?}", a.lines);
    }

    #[test]
    fn quadrature_suite_passes() {
        let r = run_suite(Suite::Quadrature, 3, None);
        assert!(r.passed(), "{:#?}", r.lines);
    }

    #[test]
    fn finite_difference_suite_passes() {
        let r = run_suite(Suite::GaussManin, 3, None);
        assert!(r.passed(), "{:#?}", r.lines);
    }

    #[test]
    fn failing_identity_is_reported() {
        let e = ensure(false, || "x".into()).unwrap_err();
        assert_eq!(e.to_string(), "identity check failed: x");
    }
}
