//! Numerical oracle for `n = 1`: bounded chambers, tanh–sinh quadrature of the twisted
//! integrals `∫ Π|f_j|^{λ_j} φ dx`, and identity checks against those integrals.
//!
//! Integrands are evaluated in log space, with distances to the chamber endpoints taken
//! directly from the quadrature substitution, so endpoint singularities `|x − a|^e`
//! with `e > −1` are resolved to full precision.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arrangement::Arrangement;
use crate::cohomology::{w0_class_in_f, CohomClass, Kind, LambdaPoint};
use crate::connection::{gm_matrix, pullback_to_alpha};
use crate::error::{Error, Result};
use crate::indices::IndexSet;
use crate::linalg::{int, to_f64, Scalar};

/// A root of some `f_j` bounding a chamber.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Endpoint {
    pub sphere: usize,
    /// Whether this is the larger root of `f_sphere`.
    pub upper: bool,
    pub x: f64,
}

/// A bounded interval of `R − ∪ {f_j = 0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Chamber {
    pub left: Endpoint,
    pub right: Endpoint,
}

impl Chamber {
    pub fn a(&self) -> f64 {
        self.left.x
    }

    pub fn b(&self) -> f64 {
        self.right.x
    }

    /// Which sphere roots bound the chamber, ignoring positions.
    pub fn provenance(&self) -> ((usize, bool), (usize, bool)) {
        ((self.left.sphere, self.left.upper), (self.right.sphere, self.right.upper))
    }
}

/// A one-dimensional arrangement in floating point: `f_j = x² + 2a_j x + b_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineArrangement {
    coeffs: Vec<[f64; 2]>,
}

impl LineArrangement {
    pub fn new(coeffs: Vec<[f64; 2]>) -> Self {
        LineArrangement { coeffs }
    }

    pub fn from_exact(arr: &Arrangement) -> Result<Self> {
        if arr.n() != 1 {
            return Err(Error::Invalid(format!("quadrature needs n = 1, got n = {}", arr.n())));
        }
        Ok(LineArrangement::new(arr.alpha().iter().map(|a| [to_f64(&a[0]), to_f64(&a[1])]).collect()))
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    /// The arrangement at `α + h·t`, with tangent keys `(j, ν)` as in
    /// [`crate::connection::AlphaCovector`] (`ν = 0` is the constant term).
    pub fn perturbed(&self, tangent: &Tangent, h: f64) -> Self {
        let mut c = self.coeffs.clone();
        for (&(j, nu), &v) in tangent {
            let slot = if nu == 0 { 1 } else { 0 };
            c[j - 1][slot] += h * v;
        }
        LineArrangement::new(c)
    }

    /// Both roots of `f_j`, ascending.
    pub fn roots(&self, j: usize) -> Result<[f64; 2]> {
        let [a, b] = self.coeffs[j - 1];
        let disc = a * a - b;
        if disc <= 0.0 {
            return Err(Error::ZeroRadius(j));
        }
        let s = -a - a.signum() * disc.sqrt();
        let (r1, r2) = if s == 0.0 { (-disc.sqrt(), disc.sqrt()) } else { (s, b / s) };
        Ok(if r1 < r2 { [r1, r2] } else { [r2, r1] })
    }

    /// The `2m − 1` finite intervals between consecutive sorted roots.
    pub fn chambers(&self) -> Result<Vec<Chamber>> {
        let mut pts = Vec::with_capacity(2 * self.m());
        for j in 1..=self.m() {
            let [lo, hi] = self.roots(j)?;
            pts.push(Endpoint { sphere: j, upper: false, x: lo });
            pts.push(Endpoint { sphere: j, upper: true, x: hi });
        }
        pts.sort_by(|p, q| p.x.total_cmp(&q.x));
        for w in pts.windows(2) {
            if w[1].x - w[0].x <= 1e-12 * (1.0 + w[0].x.abs()) {
                return Err(Error::DegenerateRoots(w[0].x));
            }
        }
        Ok(pts.windows(2).map(|w| Chamber { left: w[0], right: w[1] }).collect())
    }
}

/// A direction in the raw coefficients `α`, keyed like an `AlphaCovector`.
pub type Tangent = BTreeMap<(usize, usize), f64>;

/// Bounded chambers of an exact one-dimensional arrangement. Coinciding roots are
/// detected exactly (a shared root makes the resultant of two quadrics vanish).
pub fn chambers_1d(arr: &Arrangement) -> Result<Vec<Chamber>> {
    if arr.n() != 1 {
        return Err(Error::Invalid(format!("chambers are enumerated for n = 1, got n = {}", arr.n())));
    }
    for j in 1..=arr.m() {
        if !arr.r2(j).is_positive() {
            return Err(Error::ZeroRadius(j));
        }
    }
    let al = arr.alpha();
    for j in 1..=arr.m() {
        for k in j + 1..=arr.m() {
            let (a, b) = (&al[j - 1][0], &al[j - 1][1]);
            let (c, d) = (&al[k - 1][0], &al[k - 1][1]);
            let db = b - d;
            let res = &db * &db + int(4) * (a - c) * (a * d - b * c);
            if res.is_zero() {
                let x = LineArrangement::from_exact(arr)?.roots(j)?;
                let other = LineArrangement::from_exact(arr)?.roots(k)?;
                let shared = x.iter().copied().min_by(|p, q| {
                    let dp = other.iter().map(|o| (p - o).abs()).fold(f64::INFINITY, f64::min);
                    let dq = other.iter().map(|o| (q - o).abs()).fold(f64::INFINITY, f64::min);
                    dp.total_cmp(&dq)
                });
                return Err(Error::DegenerateRoots(shared.unwrap_or(f64::NAN)));
            }
        }
    }
    LineArrangement::from_exact(arr)?.chambers()
}

/// A rational function `Σ c · Π f_k^{e_k}` multiplying the multivalued factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Integrand {
    m: usize,
    terms: BTreeMap<Vec<i32>, Scalar>,
}

impl Integrand {
    pub fn zero(m: usize) -> Self {
        Integrand { m, terms: BTreeMap::new() }
    }

    /// `c · Π f_k^{e_k}`.
    pub fn monomial(exps: Vec<i32>, c: Scalar) -> Self {
        let mut z = Integrand::zero(exps.len());
        z.add(exps, c);
        z
    }

    /// `F_J = 1/Π_{j∈J} f_j`.
    pub fn f(m: usize, jset: IndexSet) -> Self {
        let mut e = vec![0; m];
        for j in jset.iter() {
            e[j - 1] = -1;
        }
        Integrand::monomial(e, Scalar::one())
    }

    /// A class in either basis; `W₀` keys are expanded into `F` forms first.
    pub fn from_class(arr: &Arrangement, cls: &CohomClass) -> Self {
        let f = match cls.kind {
            Kind::F => cls.clone(),
            Kind::W0 => w0_class_in_f(arr, cls),
        };
        let mut z = Integrand::zero(arr.m());
        for (k, c) in f.terms() {
            z.add_scaled(&Integrand::f(arr.m(), *k), c);
        }
        z
    }

    fn add(&mut self, exps: Vec<i32>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(exps.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add_scaled(&mut self, other: &Integrand, s: &Scalar) {
        for (e, c) in &other.terms {
            self.add(e.clone(), c * s);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        let mut z = Integrand::zero(self.m);
        z.add_scaled(self, s);
        z
    }

    pub fn minus(&self, other: &Integrand) -> Self {
        let mut z = self.clone();
        z.add_scaled(other, &-Scalar::one());
        z
    }

    /// Multiplication by `f_j^power`.
    pub fn times_f(&self, j: usize, power: i32) -> Self {
        let mut z = Integrand::zero(self.m);
        for (e, c) in &self.terms {
            let mut e = e.clone();
            e[j - 1] += power;
            z.add(e, c.clone());
        }
        z
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Scalar)> {
        self.terms.iter()
    }

    /// Smallest power of `f_j` over the support.
    pub fn min_power(&self, j: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[j - 1]).min()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Difference between the last two refinement levels.
    pub error_estimate: f64,
    pub evaluations: usize,
    /// `∫ |integrand|`, the scale the error target is measured against.
    pub magnitude: f64,
}

/// Tanh–sinh settings: stop when halving the step changes the value by at most
/// `rel_tol · ∫|g|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub max_level: u32,
    pub t_max: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { rel_tol: 1e-10, max_level: 12, t_max: 6.5 }
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Exponent of `f_p` at an endpoint of sphere `p`, minimized over the support.
fn endpoint_exponent(lam: &[f64], phi: &Integrand, p: usize) -> f64 {
    lam[p - 1] + phi.min_power(p).unwrap_or(0) as f64
}

/// Rejects integrands that diverge at a chamber endpoint, before any evaluation.
pub fn check_convergence(lam: &[f64], phi: &Integrand, chamber: &Chamber) -> Result<()> {
    for e in [chamber.left, chamber.right] {
        let exponent = endpoint_exponent(lam, phi, e.sphere);
        if exponent <= -1.0 {
            return Err(Error::ConvergenceViolation { sphere: e.sphere, endpoint: e.x, exponent });
        }
    }
    Ok(())
}

struct Prepared {
    roots: Vec<[f64; 2]>,
    /// Per root: `Some(false)` for the left endpoint, `Some(true)` for the right.
    role: Vec<[Option<bool>; 2]>,
    terms: Vec<(f64, Vec<f64>, Vec<bool>)>,
}

impl Prepared {
    fn new(line: &LineArrangement, lam: &[f64], phi: &Integrand, ch: &Chamber) -> Result<Self> {
        let m = line.m();
        let mut roots = Vec::with_capacity(m);
        let mut role = Vec::with_capacity(m);
        for j in 1..=m {
            roots.push(line.roots(j)?);
            let mut r = [None, None];
            for (i, upper) in [false, true].into_iter().enumerate() {
                if ch.left.sphere == j && ch.left.upper == upper {
                    r[i] = Some(false);
                }
                if ch.right.sphere == j && ch.right.upper == upper {
                    r[i] = Some(true);
                }
            }
            role.push(r);
        }
        let terms = phi
            .terms()
            .map(|(e, c)| {
                let pw: Vec<f64> = e.iter().zip(lam).map(|(&k, &l)| l + k as f64).collect();
                let odd: Vec<bool> = e.iter().map(|k| k % 2 != 0).collect();
                (to_f64(c), pw, odd)
            })
            .collect();
        Ok(Prepared { roots, role, terms })
    }

    /// `(Σ w·g, Σ |w·g|)` at a node given `ln(x − a)`, `ln(b − x)` and `ln w`.
    fn eval(&self, ch: &Chamber, ln_da: f64, ln_db: f64, ln_w: f64) -> (f64, f64) {
        let (da, db) = (ln_da.exp(), ln_db.exp());
        let x = if da < db { ch.a() + da } else { ch.b() - db };
        let m = self.roots.len();
        let mut lnf = vec![0.0; m];
        let mut neg = vec![false; m];
        for k in 0..m {
            for i in 0..2 {
                let (ln_d, negative) = match self.role[k][i] {
                    Some(false) => (ln_da, false),
                    Some(true) => (ln_db, true),
                    None => {
                        let d = x - self.roots[k][i];
                        (d.abs().ln(), d < 0.0)
                    }
                };
                lnf[k] += ln_d;
                neg[k] ^= negative;
            }
        }
        let (mut sum, mut abs) = (0.0, 0.0);
        for (c, pw, odd) in &self.terms {
            let mut l = ln_w;
            let mut sign = c.signum();
            for k in 0..m {
                l += pw[k] * lnf[k];
                if odd[k] && neg[k] {
                    sign = -sign;
                }
            }
            let v = c.abs() * l.exp();
            sum += sign * v;
            abs += v;
        }
        (sum, abs)
    }
}

/// `∫_chamber Π|f_j|^{λ_j} φ dx` on a floating-point arrangement.
pub fn integrate_line(
    line: &LineArrangement,
    lam: &[f64],
    phi: &Integrand,
    ch: &Chamber,
    opts: &Quadrature,
) -> Result<QuadratureResult> {
    check_convergence(lam, phi, ch)?;
    if phi.is_zero() {
        return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 0, magnitude: 0.0 });
    }
    let prep = Prepared::new(line, lam, phi, ch)?;
    let width = ch.b() - ch.a();
    let ln_width = width.ln();
    let node = |t: f64| -> (f64, f64) {
        let u = FRAC_PI_2 * t.sinh();
        let ln_da = ln_width - softplus(-2.0 * u);
        let ln_db = ln_width - softplus(2.0 * u);
        let ln_sech2 = 2.0 * (std::f64::consts::LN_2 - u.abs() - (-2.0 * u.abs()).exp().ln_1p());
        let ln_w = (0.5 * width).ln() + (FRAC_PI_2 * t.cosh()).ln() + ln_sech2;
        prep.eval(ch, ln_da, ln_db, ln_w)
    };
    let h0 = 0.5;
    let mut evaluations = 0;
    let (mut sum, mut abs) = node(0.0);
    evaluations += 1;
    let n0 = (opts.t_max / h0).floor() as i64;
    for i in 1..=n0 {
        for t in [i as f64 * h0, -(i as f64) * h0] {
            let (s, a) = node(t);
            sum += s;
            abs += a;
            evaluations += 1;
        }
    }
    let mut prev = h0 * sum;
    let mut last_err = f64::INFINITY;
    for level in 1..=opts.max_level {
        let h = h0 / f64::from(1u32 << level);
        let count = (opts.t_max / h).floor() as i64;
        let mut i = 1;
        while i <= count {
            for t in [i as f64 * h, -(i as f64) * h] {
                let (s, a) = node(t);
                sum += s;
                abs += a;
                evaluations += 1;
            }
            i += 2;
        }
        let value = h * sum;
        let magnitude = h * abs;
        last_err = (value - prev).abs();
        if !value.is_finite() {
            return Err(Error::ToleranceNotMet { estimate: f64::INFINITY, target: opts.rel_tol });
        }
        if level >= 3 && last_err <= opts.rel_tol * magnitude {
            return Ok(QuadratureResult { value, error_estimate: last_err, evaluations, magnitude });
        }
        prev = value;
    }
    Err(Error::ToleranceNotMet { estimate: last_err, target: opts.rel_tol })
}

/// [`integrate_line`] on an exact arrangement with default settings.
pub fn integrate(arr: &Arrangement, lam: &[f64], phi: &Integrand, ch: &Chamber) -> Result<QuadratureResult> {
    integrate_line(&LineArrangement::from_exact(arr)?, lam, phi, ch, &Quadrature::default())
}

/// Per-chamber residuals `|∫lhs − ∫rhs| / max(1, |∫lhs|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub residuals: Vec<f64>,
    pub tol: f64,
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| *r <= self.tol)
    }
}

pub fn verify_identity(
    arr: &Arrangement,
    lam: &[f64],
    lhs: &Integrand,
    rhs: &Integrand,
    chambers: &[Chamber],
    tol: f64,
) -> Result<IdentityReport> {
    let line = LineArrangement::from_exact(arr)?;
    let opts = Quadrature::default();
    let pairs: Vec<(f64, f64)> = chambers
        .par_iter()
        .map(|ch| {
            let l = integrate_line(&line, lam, lhs, ch, &opts)?.value;
            let r = integrate_line(&line, lam, rhs, ch, &opts)?.value;
            Ok((l, r))
        })
        .collect::<Result<_>>()?;
    let residuals = pairs.iter().map(|(l, r)| (l - r).abs() / l.abs().max(1.0)).collect();
    Ok(IdentityReport {
        lhs: pairs.iter().map(|p| p.0).collect(),
        rhs: pairs.iter().map(|p| p.1).collect(),
        residuals,
        tol,
    })
}

/// One entry of a connection check: column `J` on one chamber.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionCheck {
    pub chamber: usize,
    pub column: IndexSet,
    /// Richardson-extrapolated derivative of `𝒥(F_J)` along the tangent.
    pub numeric: f64,
    /// `Σ_K 𝒥(F_K) Θ_{K,J}(tangent)`.
    pub predicted: f64,
    pub residual: f64,
    /// `|D(h/2) − D(h)| / 3`, relative to the same scale as `residual`.
    pub extrapolation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionReport {
    pub checks: Vec<ConnectionCheck>,
    pub tol: f64,
}

impl ConnectionReport {
    pub fn worst(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.residual <= self.tol)
    }
}

/// Compares centered differences of chamber integrals along `tangent` (step `h`, then
/// `h/2`, Richardson-combined) with the connection matrix pulled back to `α`.
pub fn verify_gauss_manin(
    arr: &Arrangement,
    lam: &LambdaPoint,
    tangent: &Tangent,
    h: f64,
    tol: f64,
) -> Result<ConnectionReport> {
    let base = LineArrangement::from_exact(arr)?;
    let chambers = chambers_1d(arr)?;
    let lam_f = lam.to_f64();
    let theta = gm_matrix(arr, lam)?;
    let basis = theta.basis.clone();
    let m = arr.m();
    let opts = Quadrature::default();

    let rate = |k: IndexSet, j: IndexSet| -> f64 {
        pullback_to_alpha(arr, &theta.get(k, j))
            .iter()
            .map(|(key, c)| to_f64(c) * tangent.get(key).copied().unwrap_or(0.0))
            .sum()
    };
    let rates: Vec<Vec<f64>> = basis.iter().map(|&k| basis.iter().map(|&j| rate(k, j)).collect()).collect();

    let shifts = [0.0, h, -h, h / 2.0, -h / 2.0];
    let lines: Vec<LineArrangement> = shifts.iter().map(|&s| base.perturbed(tangent, s)).collect();
    let mut line_chambers = Vec::with_capacity(lines.len());
    for l in &lines {
        let c = l.chambers()?;
        let same = c.len() == chambers.len()
            && c.iter().zip(&chambers).all(|(p, q)| p.provenance() == q.provenance());
        if !same {
            return Err(Error::StepTooLarge(h));
        }
        line_chambers.push(c);
    }

    let (nc, nb) = (chambers.len(), basis.len());
    let jobs: Vec<(usize, usize, usize)> = (0..shifts.len())
        .flat_map(|s| (0..nc).flat_map(move |c| (0..nb).map(move |b| (s, c, b))))
        .collect();
    let values: Vec<f64> = jobs
        .par_iter()
        .map(|&(s, c, b)| {
            let phi = Integrand::f(m, basis[b]);
            Ok(integrate_line(&lines[s], &lam_f, &phi, &line_chambers[s][c], &opts)?.value)
        })
        .collect::<Result<_>>()?;
    let at = |s: usize, c: usize, b: usize| values[(s * nc + c) * nb + b];

    let mut checks = Vec::new();
    for c in 0..chambers.len() {
        for (jb, &j) in basis.iter().enumerate() {
            let d1 = (at(1, c, jb) - at(2, c, jb)) / (2.0 * h);
            let d2 = (at(3, c, jb) - at(4, c, jb)) / h;
            let numeric = (4.0 * d2 - d1) / 3.0;
            let parts: Vec<f64> = (0..basis.len()).map(|kb| at(0, c, kb) * rates[kb][jb]).collect();
            let predicted: f64 = parts.iter().sum();
            let scale = parts.iter().map(|p| p.abs()).sum::<f64>() + numeric.abs();
            let rel = |x: f64| if scale == 0.0 { x.abs() } else { x.abs() / scale };
            let extrapolation = rel((d2 - d1) / 3.0);
            if extrapolation > tol {
                return Err(Error::StepTooLarge(extrapolation));
            }
            checks.push(ConnectionCheck {
                chamber: c,
                column: j,
                numeric,
                predicted,
                residual: rel(numeric - predicted),
                extrapolation,
            });
        }
    }
    Ok(ConnectionReport { checks, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::tests::standard;
    use crate::linalg::frac;

    #[test]
    fn standard_chambers() {
        let c = chambers_1d(&standard()).unwrap();
        let ends: Vec<(f64, f64)> = c.iter().map(|c| (c.a(), c.b())).collect();
        assert_eq!(ends, vec![(-2.0, 1.0), (1.0, 2.0), (2.0, 5.0)]);
        assert_eq!(c[0].provenance(), ((1, false), (2, false)));
        assert_eq!(c[2].provenance(), ((1, true), (2, true)));
    }

    #[test]
    fn single_sphere_has_one_chamber() {
        let a = Arrangement::from_centers(&[vec![frac(1, 2)]], &[int(9)]).unwrap();
        let c = chambers_1d(&a).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].a(), c[0].b()), (-2.5, 3.5));
    }

    #[test]
    fn shared_root_is_degenerate() {
        // Roots {-2, 2} and {2, 4}.
        let a = Arrangement::new(1, vec![vec![int(0), int(-4)], vec![int(-3), int(8)]]).unwrap();
        match chambers_1d(&a) {
            Err(Error::DegenerateRoots(x)) => assert!((x - 2.0).abs() < 1e-12),
            other => panic!("expected degenerate roots, got {other:?}"),
        }
    }

    #[test]
    fn beta_function_value() {
        // One sphere x² − 1: ∫_{-1}^{1} (1 − x²)^{1/2} dx = π/2.
        let a = Arrangement::new(1, vec![vec![int(0), int(-1)]]).unwrap();
        let ch = chambers_1d(&a).unwrap()[0];
        let r = integrate(&a, &[0.5], &Integrand::f(1, IndexSet::EMPTY), &ch).unwrap();
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-13, "{}", r.value);
        // ∫ (1 − x²)^{-1/2} dx = π, with an inverse square-root singularity at both ends.
        let r = integrate(&a, &[0.5], &Integrand::f(1, IndexSet::singleton(1)), &ch).unwrap();
        assert!((r.value + std::f64::consts::PI).abs() < 1e-12, "{}", r.value);
        assert!(r.error_estimate >= 0.0 && r.error_estimate <= 1e-10 * r.magnitude);
    }

    #[test]
    fn strong_endpoint_singularity() {
        // ∫_{-1}^{1} (1 − x²)^{-0.9} dx = √π Γ(0.1) / Γ(0.6).
        let a = Arrangement::new(1, vec![vec![int(0), int(-1)]]).unwrap();
        let ch = chambers_1d(&a).unwrap()[0];
        let r = integrate(&a, &[0.1], &Integrand::f(1, IndexSet::singleton(1)), &ch).unwrap();
        let want = 11.323_086_975_215_753;
        assert!((r.value.abs() - want).abs() < 1e-9 * want, "{}", r.value);
    }

    #[test]
    fn stable_across_levels() {
        let a = standard();
        let ch = chambers_1d(&a).unwrap()[1];
        let line = LineArrangement::from_exact(&a).unwrap();
        let phi = Integrand::f(2, IndexSet::EMPTY);
        let lam = [0.5, 0.5];
        let fine = integrate_line(&line, &lam, &phi, &ch, &Quadrature::default()).unwrap();
        let coarse =
            integrate_line(&line, &lam, &phi, &ch, &Quadrature { rel_tol: 1e-6, ..Quadrature::default() }).unwrap();
        assert!(fine.value > 0.0);
        assert!((fine.value - coarse.value).abs() <= 1e-6 * fine.value);
        assert!(fine.error_estimate <= 1e-10 * fine.value);
    }

    #[test]
    fn convergence_is_checked_per_endpoint() {
        let a = standard();
        let chs = chambers_1d(&a).unwrap();
        let lam = [0.5, 0.5];
        // F_1 at λ_1 = 1/2: exponent −1/2 at the roots of f_1, fine.
        assert!(integrate(&a, &lam, &Integrand::f(2, IndexSet::singleton(1)), &chs[1]).is_ok());
        // f_1^{-1} F_1: exponent −3/2 at a root of f_1.
        let bad = Integrand::f(2, IndexSet::singleton(1)).times_f(1, -1);
        match integrate(&a, &lam, &bad, &chs[1]) {
            Err(Error::ConvergenceViolation { sphere: 1, exponent, .. }) => assert_eq!(exponent, -1.5),
            other => panic!("expected a convergence violation, got {other:?}"),
        }
        // Chamber (1, 2) touches f_2 only at x = 1; the f_1 root x = 2 is the other end.
        let f2 = Integrand::f(2, IndexSet::singleton(2)).times_f(2, -1);
        assert!(matches!(
            integrate(&a, &lam, &f2, &chs[1]),
            Err(Error::ConvergenceViolation { sphere: 2, .. })
        ));
    }

    #[test]
    fn zero_class_has_zero_residual() {
        let a = standard();
        let chs = chambers_1d(&a).unwrap();
        let z = Integrand::zero(2);
        let rep = verify_identity(&a, &[0.5, 0.5], &z, &z, &chs, 1e-6).unwrap();
        assert_eq!(rep.residuals, vec![0.0; 3]);
        assert!(rep.passed());
    }

    #[test]
    fn zero_tangent_gives_zero_derivative() {
        let a = standard();
        let lam = LambdaPoint::new(vec![frac(3, 2), frac(5, 4)]);
        let rep = verify_gauss_manin(&a, &lam, &Tangent::new(), 1e-3, 1e-5).unwrap();
        assert_eq!(rep.checks.len(), 9);
        assert!(rep.checks.iter().all(|c| c.numeric == 0.0 && c.predicted == 0.0 && c.residual == 0.0));
    }
}
