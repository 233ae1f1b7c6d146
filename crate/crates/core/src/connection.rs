//! Invariant 1-forms and the Gauss–Manin connection on the basis forms `F_J`.
//!
//! Differentials are taken in the invariants `r_j²` and `ρ_jk²`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arrangement::{Arrangement, Sym};
use crate::cohomology::{nonresonant, w0_in_f, Class, CohomClass, Coeff, Kind, LambdaPoint, Reducer};
use crate::contiguity::{gamma, gamma_tilde};
use crate::error::{Error, Result};
use crate::indices::{admissible_sets, basis, IndexSet};
use crate::linalg::{det_bareiss, frac, int, Scalar};

use Sym::{Star, Zero as O, S};

/// A basis differential of the parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Differential {
    /// `d r_j²`
    R2(usize),
    /// `d ρ_jk²` with `j < k`
    Rho2(usize, usize),
}

impl Differential {
    pub fn rho2(j: usize, k: usize) -> Self {
        assert_ne!(j, k, "ρ² needs two distinct spheres");
        Differential::Rho2(j.min(k), j.max(k))
    }

    /// The same differential with sphere labels mapped through `perm`.
    pub fn relabel(self, perm: impl Fn(usize) -> usize) -> Self {
        match self {
            Differential::R2(j) => Differential::R2(perm(j)),
            Differential::Rho2(j, k) => Differential::rho2(perm(j), perm(k)),
        }
    }
}

impl fmt::Display for Differential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Differential::R2(j) => write!(f, "dr2_{j}"),
            Differential::Rho2(j, k) => write!(f, "drho2_{j}_{k}"),
        }
    }
}

/// A 1-form `Σ c_v dv` over the invariant differentials.
#[derive(Clone, Default, PartialEq)]
pub struct ParamOneForm {
    coeffs: BTreeMap<Differential, Scalar>,
}

impl ParamOneForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(key: Differential, c: Scalar) -> Self {
        let mut f = Self::zero();
        f.add_term(key, &c);
        f
    }

    pub fn add_term(&mut self, key: Differential, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(key).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// `[self : key]`.
    pub fn get(&self, key: Differential) -> Scalar {
        self.coeffs.get(&key).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Differential, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    /// Pairing with a tangent vector given as rates of the invariants.
    pub fn eval(&self, rate: impl Fn(Differential) -> Scalar) -> Scalar {
        self.coeffs.iter().map(|(k, c)| c * rate(*k)).sum()
    }

    pub fn eval_f64(&self, rate: impl Fn(Differential) -> f64) -> f64 {
        self.coeffs.iter().map(|(k, c)| crate::linalg::to_f64(c) * rate(*k)).sum()
    }

    pub fn relabel(&self, perm: impl Fn(usize) -> usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.coeffs {
            out.add_term(k.relabel(&perm), c);
        }
        out
    }
}

impl fmt::Debug for ParamOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ParamOneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) {k}")?;
        }
        Ok(())
    }
}

impl Coeff for ParamOneForm {
    fn empty() -> Self {
        Self::zero()
    }
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
    fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        if s.is_zero() {
            return;
        }
        for (k, c) in &other.coeffs {
            self.add_term(*k, &(c * s));
        }
    }
}

/// A value together with its differential; exact forward-mode differentiation.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub value: Scalar,
    pub diff: ParamOneForm,
}

impl Jet {
    pub fn constant(value: Scalar) -> Self {
        Jet { value, diff: ParamOneForm::zero() }
    }

    pub fn variable(value: Scalar, key: Differential) -> Self {
        Jet { value, diff: ParamOneForm::single(key, Scalar::one()) }
    }

    pub fn plus(&self, o: &Jet) -> Jet {
        Jet { value: &self.value + &o.value, diff: self.diff.plus(&o.diff) }
    }

    pub fn minus(&self, o: &Jet) -> Jet {
        Jet { value: &self.value - &o.value, diff: self.diff.minus(&o.diff) }
    }

    pub fn times(&self, o: &Jet) -> Jet {
        let mut diff = self.diff.scaled(&o.value);
        diff.add_scaled(&o.diff, &self.value);
        Jet { value: &self.value * &o.value, diff }
    }

    pub fn scaled(&self, s: &Scalar) -> Jet {
        Jet { value: &self.value * s, diff: self.diff.scaled(s) }
    }

    pub fn over(&self, o: &Jet) -> Jet {
        assert!(!o.value.is_zero(), "jet division by zero");
        let q = &self.value / &o.value;
        let mut diff = self.diff.clone();
        diff.add_scaled(&o.diff, &-&q);
        Jet { value: q, diff: diff.scaled(&(Scalar::one() / &o.value)) }
    }

    /// `d log` of the value.
    pub fn dlog(&self) -> ParamOneForm {
        self.diff.scaled(&(Scalar::one() / &self.value))
    }
}

/// The invariant carried by the Cayley–Menger entry `b(s, t)`, if any.
fn entry_variable(s: Sym, t: Sym) -> Option<Differential> {
    match (s, t) {
        (Star, S(j)) | (S(j), Star) => Some(Differential::R2(j)),
        (S(j), S(k)) if j != k => Some(Differential::rho2(j, k)),
        _ => None,
    }
}

fn entry_jet(arr: &Arrangement, s: Sym, t: Sym) -> Jet {
    let v = arr.entry(s, t);
    match entry_variable(s, t) {
        Some(k) => Jet::variable(v, k),
        None => Jet::constant(v),
    }
}

fn has_repeat(v: &[Sym]) -> bool {
    v.iter().enumerate().any(|(i, a)| v[..i].contains(a))
}

/// `dB(rows / cols)` by the cofactor rule: each entry is a single invariant or a constant.
pub fn d_minor(arr: &Arrangement, rows: &[Sym], cols: &[Sym]) -> ParamOneForm {
    assert_eq!(rows.len(), cols.len());
    let mut out = ParamOneForm::zero();
    if has_repeat(rows) || has_repeat(cols) {
        return out;
    }
    let k = rows.len();
    for a in 0..k {
        for b in 0..k {
            let Some(v) = entry_variable(rows[a], cols[b]) else { continue };
            let sub: Vec<Vec<Scalar>> = (0..k)
                .filter(|&i| i != a)
                .map(|i| (0..k).filter(|&j| j != b).map(|j| arr.entry(rows[i], cols[j])).collect())
                .collect();
            let mut c = if k == 1 { Scalar::one() } else { det_bareiss(&sub) };
            if (a + b) % 2 == 1 {
                c = -c;
            }
            out.add_term(v, &c);
        }
    }
    out
}

/// `B(rows / cols)` as a jet, by elimination over jets; an oracle for [`d_minor`].
pub fn minor_jet(arr: &Arrangement, rows: &[Sym], cols: &[Sym]) -> Jet {
    let k = rows.len();
    let mut m: Vec<Vec<Jet>> =
        rows.iter().map(|&s| cols.iter().map(|&t| entry_jet(arr, s, t)).collect()).collect();
    let mut det = Jet::constant(Scalar::one());
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !m[r][c].value.is_zero()) else {
            return Jet::constant(Scalar::zero()).plus(&singular_jet(arr, rows, cols));
        };
        if p != c {
            m.swap(p, c);
            det = det.scaled(&-Scalar::one());
        }
        det = det.times(&m[c][c]);
        for r in c + 1..k {
            let f = m[r][c].over(&m[c][c]);
            for j in c..k {
                let t = f.times(&m[c][j]);
                m[r][j] = m[r][j].minus(&t);
            }
        }
    }
    det
}

// A singular value still has a differential; fall back to the cofactor rule.
fn singular_jet(arr: &Arrangement, rows: &[Sym], cols: &[Sym]) -> Jet {
    Jet { value: Scalar::zero(), diff: d_minor(arr, rows, cols) }
}

/// `d log B(rows / cols)`.
pub fn dlog_minor(arr: &Arrangement, rows: &[Sym], cols: &[Sym]) -> Result<ParamOneForm> {
    let b = arr.minor(rows, cols);
    let b = arr.nonzero(b, || format!("{} in a logarithmic differential", show(rows, cols)))?;
    Ok(d_minor(arr, rows, cols).scaled(&(Scalar::one() / b)))
}

fn show(rows: &[Sym], cols: &[Sym]) -> String {
    let r: String = rows.iter().map(|s| s.to_string()).collect();
    let c: String = cols.iter().map(|s| s.to_string()).collect();
    format!("B({r}/{c})")
}

fn half() -> Scalar {
    frac(1, 2)
}

/// The invariant form `θ_J` for a nonempty admissible `J`.
pub fn theta(arr: &Arrangement, jset: IndexSet) -> Result<ParamOneForm> {
    let p = jset.len();
    if p == 0 || p > arr.n() + 1 {
        return Err(Error::Invalid(format!("θ needs a nonempty admissible set, got {jset}")));
    }
    if p == 1 {
        let j = jset.min().unwrap();
        let s = [O, Star, S(j)];
        return Ok(dlog_minor(arr, &s, &s)?.scaled(&-half()));
    }
    let mut out = ParamOneForm::zero();
    let sign = if p % 2 == 0 { Scalar::one() } else { -Scalar::one() };
    let v = jset.to_vec();
    for (a, &j) in v.iter().enumerate() {
        for &k in &v[a + 1..] {
            let pair = IndexSet::from_slice(&[j, k]);
            let s = [O, S(j), S(k)];
            let dl = dlog_minor(arr, &s, &s)?;
            let rest = jset.minus(pair);
            let mut chain = Scalar::zero();
            for order in crate::indices::ordered_subsets(rest, rest.len()) {
                let mut prefix = pair;
                let mut term = Scalar::one();
                for &mu in &order {
                    let num = arr.bx(&[O, Star], &[O, S(mu)], prefix);
                    prefix = prefix.with(mu);
                    let d = arr.nonzero(arr.b0(prefix), || format!("B(0{prefix}) in θ_{jset}"))?;
                    term = term * num / d;
                }
                chain += term;
            }
            out.add_scaled(&dl, &(&sign * half() * chain));
        }
    }
    Ok(out)
}

/// The exact normalized-coordinate data behind `θ_k^j`: for each component `ν`
/// (pivot sphere `n+1−ν`), the pivot `d_ν` and the scaled coordinates `q_{iν}`
/// with `α_{iν} = ± q_{iν} / √d_ν`.
struct NormalJets {
    n: usize,
    pivot: Vec<Jet>,
    q: Vec<Vec<Option<Jet>>>,
}

impl NormalJets {
    fn new(arr: &Arrangement) -> Result<Self> {
        let n = arr.n();
        if arr.m() < n + 1 {
            return Err(Error::Invalid("the normalized frame needs at least n+1 spheres".into()));
        }
        let h = n + 1;
        let rho = |a: usize, b: usize| -> Jet {
            if a == b {
                Jet::constant(Scalar::zero())
            } else {
                Jet::variable(arr.rho2(a, b).clone(), Differential::rho2(a, b))
            }
        };
        // Gram matrix of the centers relative to sphere h.
        let gram = |a: usize, b: usize| -> Jet {
            rho(a, h).plus(&rho(b, h)).minus(&rho(a, b)).scaled(&half())
        };
        let mut pivot: Vec<Jet> = vec![Jet::constant(Scalar::zero()); n + 1];
        // ell[i][ν] for sphere i, component ν (1-based).
        let mut ell: Vec<Vec<Option<Jet>>> = vec![vec![None; n + 1]; n + 1];
        for nu in 1..=n {
            let pv = n + 1 - nu;
            let mut d = gram(pv, pv);
            for mu in 1..nu {
                let l = ell[pv][mu].as_ref().unwrap();
                d = d.minus(&l.times(l).times(&pivot[mu]));
            }
            if d.value.is_zero() {
                return Err(Error::SingularMinor(format!("degenerate normalized frame at sphere {pv}")));
            }
            ell[pv][nu] = Some(Jet::constant(Scalar::one()));
            for i in 1..pv {
                let mut num = gram(i, pv);
                for mu in 1..nu {
                    let a = ell[i][mu].as_ref().unwrap();
                    let b = ell[pv][mu].as_ref().unwrap();
                    num = num.minus(&a.times(b).times(&pivot[mu]));
                }
                ell[i][nu] = Some(num.over(&d));
            }
            pivot[nu] = d;
        }
        let q = ell
            .iter()
            .map(|row| row.iter().enumerate().map(|(nu, l)| l.as_ref().map(|l| l.times(&pivot[nu]))).collect())
            .collect();
        Ok(NormalJets { n, pivot, q })
    }

    /// `√d_ν · dα_{iν}` up to the common sign.
    fn scaled_dalpha(&self, i: usize, nu: usize) -> ParamOneForm {
        let q = self.q[i][nu].as_ref().unwrap();
        let mut out = q.diff.clone();
        out.add_scaled(&self.pivot[nu].dlog(), &-(&q.value * half()));
        out
    }

    fn q(&self, i: usize, nu: usize) -> Scalar {
        self.q[i][nu].as_ref().unwrap().value.clone()
    }

    /// All `θ_k^j`, `1 ≤ j ≤ k ≤ n`, indexed `[j][k]`.
    fn chain(&self) -> Vec<Vec<ParamOneForm>> {
        let n = self.n;
        let mut th = vec![vec![ParamOneForm::zero(); n + 1]; n + 1];
        for j in 1..=n {
            for k in j..=n {
                let nu = n + 1 - k;
                let mut num = self.scaled_dalpha(j, nu);
                for s in j..k {
                    let c = -self.q(s, nu);
                    let t = th[j][s].clone();
                    num.add_scaled(&t, &c);
                }
                th[j][k] = num.scaled(&(Scalar::one() / self.q(k, nu)));
            }
        }
        th
    }
}

/// The auxiliary form `θ_k^j` (`1 ≤ j ≤ k ≤ n`) defined by the triangular expansion of
/// `dα_{jν}` in the normalized frame where sphere `n+1` sits at the origin.
pub fn theta_chain(arr: &Arrangement, j: usize, k: usize) -> Result<ParamOneForm> {
    let n = arr.n();
    if !(1 <= j && j <= k && k <= n) {
        return Err(Error::Invalid(format!("θ_k^j needs 1 ≤ j ≤ k ≤ n, got j={j}, k={k}")));
    }
    Ok(NormalJets::new(arr)?.chain()[j][k].clone())
}

/// All `θ_k^j` at once, indexed `[j][k]` (entries with `k < j` are zero).
pub fn theta_chain_all(arr: &Arrangement) -> Result<Vec<Vec<ParamOneForm>>> {
    Ok(NormalJets::new(arr)?.chain())
}

/// A covector in the raw coefficients: key `(j, ν)` stands for `dα_{jν}`, with `ν = 0`
/// the constant term.
pub type AlphaCovector = BTreeMap<(usize, usize), Scalar>;

/// Pullback of an invariant 1-form to the raw coefficients `α`. When `m > n+1` (or
/// `n = 1`, `m ≥ 3`) the invariants are dependent and distinct forms can agree here.
pub fn pullback_to_alpha(arr: &Arrangement, form: &ParamOneForm) -> AlphaCovector {
    let n = arr.n();
    let a = arr.alpha();
    let mut out = AlphaCovector::new();
    let mut add = |key: (usize, usize), c: Scalar| {
        if c.is_zero() {
            return;
        }
        let e = out.entry(key).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            out.remove(&key);
        }
    };
    for (d, c) in form.terms() {
        match *d {
            Differential::R2(j) => {
                for nu in 1..=n {
                    add((j, nu), c * int(2) * &a[j - 1][nu - 1]);
                }
                add((j, 0), -c);
            }
            Differential::Rho2(j, k) => {
                for nu in 1..=n {
                    let diff = &a[j - 1][nu - 1] - &a[k - 1][nu - 1];
                    add((j, nu), c * int(2) * &diff);
                    add((k, nu), -(c * int(2) * diff));
                }
            }
        }
    }
    out
}

/// [`pullback_to_alpha`] applied to every coefficient of a class.
pub fn pullback_class(arr: &Arrangement, cls: &Class<ParamOneForm>) -> BTreeMap<IndexSet, AlphaCovector> {
    cls.terms()
        .map(|(k, f)| (*k, pullback_to_alpha(arr, f)))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

fn weight_denominator(lam_inf: &Scalar, n: usize, p: usize) -> Result<Scalar> {
    let mut den = Scalar::one();
    for s in 1..p {
        den *= nonresonant(lam_inf + int(n as i64 - s as i64), || format!("λ_∞ + {}", n as i64 - s as i64))?;
    }
    Ok(den)
}

/// Coefficients of `W₀(J)ϖ` in `∇_B ϖ`, over every nonempty admissible `J`.
pub fn nabla_b_varpi(arr: &Arrangement, lam: &LambdaPoint) -> Result<BTreeMap<IndexSet, ParamOneForm>> {
    let n = arr.n();
    let mut out = BTreeMap::new();
    for l in admissible_sets(arr.m(), n).into_iter().filter(|s| !s.is_empty()) {
        let c = lam.prod(l);
        if c.is_zero() {
            continue;
        }
        let c = c / weight_denominator(&lam.inf(), n, l.len())?;
        out.insert(l, theta(arr, l)?.scaled(&c));
    }
    Ok(out)
}

/// The connection matrix `Θ` on a basis: `∇_B F_J ~ Σ_K F_K Θ_{K,J}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionMatrix {
    pub basis: Vec<IndexSet>,
    pub entries: BTreeMap<(IndexSet, IndexSet), ParamOneForm>,
}

impl ConnectionMatrix {
    pub fn get(&self, k: IndexSet, j: IndexSet) -> ParamOneForm {
        self.entries.get(&(k, j)).cloned().unwrap_or_default()
    }

    pub fn column(&self, j: IndexSet) -> Class<ParamOneForm> {
        let mut c = Class::zero(Kind::F);
        for &k in &self.basis {
            c.add_term(k, &self.get(k, j), &Scalar::one());
        }
        c
    }

    pub fn trace(&self) -> ParamOneForm {
        let mut t = ParamOneForm::zero();
        for &k in &self.basis {
            t.add_scaled(&self.get(k, k), &Scalar::one());
        }
        t
    }
}

/// Column builder for `Θ`, memoized over the shifted exponent points it visits.
pub struct GaussManin<'a> {
    arr: &'a Arrangement,
    thetas: HashMap<IndexSet, ParamOneForm>,
    cols: HashMap<(LambdaPoint, IndexSet, usize), Class<ParamOneForm>>,
    lowering: HashMap<(LambdaPoint, usize, IndexSet), CohomClass>,
}

impl<'a> GaussManin<'a> {
    pub fn new(arr: &'a Arrangement) -> Self {
        GaussManin { arr, thetas: HashMap::new(), cols: HashMap::new(), lowering: HashMap::new() }
    }

    fn theta(&mut self, l: IndexSet) -> Result<ParamOneForm> {
        if let Some(t) = self.thetas.get(&l) {
            return Ok(t.clone());
        }
        let t = theta(self.arr, l)?;
        self.thetas.insert(l, t.clone());
        Ok(t)
    }

    fn lowering(&mut self, lam: &LambdaPoint, j: usize, l: IndexSet) -> Result<CohomClass> {
        let key = (lam.clone(), j, l);
        if let Some(c) = self.lowering.get(&key) {
            return Ok(c.clone());
        }
        let c = gamma_tilde(self.arr, lam, j, l)?;
        self.lowering.insert(key, c.clone());
        Ok(c)
    }

    /// The column `Θ_{·,j}` for a single sphere.
    fn single(&mut self, lam: &LambdaPoint, j: usize) -> Result<Class<ParamOneForm>> {
        let arr = self.arr;
        let n = arr.n();
        let shifted_inf = lam.inf() - Scalar::one();
        let red = Reducer::new(arr, Some(lam));
        let mut out = Class::zero(Kind::F);
        for l in admissible_sets(arr.m(), n).into_iter().filter(|s| !s.is_empty()) {
            let (c, cls) = if l.contains(j) {
                (lam.prod(l.without(j)), None)
            } else {
                (lam.prod(l), Some(()))
            };
            if c.is_zero() {
                continue;
            }
            let c = c / weight_denominator(&shifted_inf, n, l.len())?;
            let cls = match cls {
                None => gamma(arr, lam, j, l)?,
                Some(()) => {
                    // W₀(L)ϖ / f_j is again a sum of F's when j ∉ L.
                    let mut raw = CohomClass::zero(Kind::F);
                    for (k, v) in w0_in_f(arr, l).terms() {
                        raw.add_term(k.with(j), v, &Scalar::one());
                    }
                    red.reduce(&raw)?
                }
            };
            let th = self.theta(l)?;
            out.add_outer(&cls, &th.scaled(&c));
        }
        Ok(out)
    }

    /// The column `Θ_{·,J}` on the basis, built by stripping `anchor` (default: the
    /// smallest element) and shifting `λ` down along it.
    pub fn column(&mut self, lam: &LambdaPoint, jset: IndexSet, anchor: Option<usize>) -> Result<Class<ParamOneForm>> {
        if jset.is_empty() {
            return Err(Error::Invalid("Θ columns are indexed by nonempty sets".into()));
        }
        let j = anchor.unwrap_or_else(|| jset.min().unwrap());
        if !jset.contains(j) {
            return Err(Error::Invalid(format!("anchor {j} is not in {jset}")));
        }
        let key = (lam.clone(), jset, j);
        if let Some(c) = self.cols.get(&key) {
            return Ok(c.clone());
        }
        let col = if jset.len() == 1 {
            self.single(lam, j)?
        } else {
            let lj = nonresonant(lam.get(j) - Scalar::one(), || format!("λ_{j} - 1 on the shift path"))?;
            let down = lam.shift(j, -1);
            let prev = self.column(&down, jset.without(j), None)?;
            let mut out = Class::zero(Kind::F);
            let inv = Scalar::one() / lj;
            for (l, form) in prev.terms() {
                let g = self.lowering(lam, j, *l)?;
                out.add_outer(&g, &form.scaled(&inv));
            }
            out
        };
        self.cols.insert(key, col.clone());
        Ok(col)
    }
}

/// `Θ_{K,J}` for basis elements `K`, `J`.
pub fn gm_theta(arr: &Arrangement, lam: &LambdaPoint, k: IndexSet, jset: IndexSet) -> Result<ParamOneForm> {
    Ok(GaussManin::new(arr).column(lam, jset, None)?.get(k))
}

/// The full matrix `Θ` on the basis; columns are computed in parallel.
pub fn gm_matrix(arr: &Arrangement, lam: &LambdaPoint) -> Result<ConnectionMatrix> {
    let b = basis(arr.m(), arr.n());
    let cols: Vec<Result<Class<ParamOneForm>>> =
        b.par_iter().map(|&j| GaussManin::new(arr).column(lam, j, None)).collect();
    let mut entries = BTreeMap::new();
    for (&j, col) in b.iter().zip(cols) {
        for (k, f) in col?.terms() {
            entries.insert((*k, j), f.clone());
        }
    }
    Ok(ConnectionMatrix { basis: b, entries })
}

fn th(arr: &Arrangement, v: &[usize]) -> Result<ParamOneForm> {
    theta(arr, IndexSet::from_slice(v))
}

fn mn(arr: &Arrangement, rows: &[Sym], cols: &[Sym]) -> Scalar {
    arr.minor(rows, cols)
}

fn nz(arr: &Arrangement, v: Scalar, what: &str) -> Result<Scalar> {
    arr.nonzero(v, || what.to_string())
}

/// Closed form of `Θ` for two spheres in any dimension.
pub fn two_sphere_closed(arr: &Arrangement, lam: &LambdaPoint) -> Result<ConnectionMatrix> {
    if arr.m() != 2 {
        return Err(Error::Invalid("the two-sphere closed form needs m = 2".into()));
    }
    let n = int(arr.n() as i64);
    let li = lam.inf();
    let mut entries = BTreeMap::new();
    let jk = IndexSet::from_slice(&[1, 2]);
    let b0sjk = nz(arr, arr.b0s(jk), "B(0*12)")?;
    for (j, k) in [(1usize, 2usize), (2, 1)] {
        let (js, ks) = (IndexSet::singleton(j), IndexSet::singleton(k));
        let (tj, tk, tjk) = (th(arr, &[j])?, th(arr, &[k])?, th(arr, &[j, k])?);
        let lj = lam.get(j).clone();
        let lk = lam.get(k).clone();
        let mut f = tj.scaled(&-(&li + &n - int(2) + &lj));
        f.add_scaled(&tjk, &lk);
        entries.insert((js, js), f);
        entries.insert((ks, js), tj.plus(&tjk).scaled(&-&lk));
        let mut f = tj.scaled(&-mn(arr, &[O, Star, S(k)], &[O, Star, S(j)]));
        f.add_scaled(&tk, &arr.b0s(ks));
        f.add_scaled(&tjk, &mn(arr, &[O, Star, S(k)], &[O, S(j), S(k)]));
        entries.insert((jk, js), f.scaled(&lk));
        let mut a = tj.scaled(&mn(arr, &[O, Star, S(j)], &[O, S(k), S(j)]));
        a.add_scaled(&tk, &mn(arr, &[O, Star, S(k)], &[O, S(j), S(k)]));
        a.add_scaled(&tjk, &arr.b0(jk));
        let mut b = tj.scaled(&mn(arr, &[O, Star, S(j)], &[O, Star, S(k)]));
        b.add_scaled(&tk, &-arr.b0s(ks));
        b.add_scaled(&tjk, &-mn(arr, &[O, Star, S(k)], &[O, S(j), S(k)]));
        let mut f = a.scaled(&-(&lj / &b0sjk));
        f.add_scaled(&b, &((&li + &n - int(2)) / &b0sjk));
        entries.insert((js, jk), f);
    }
    // Θ_{12,12}
    let (l1, l2) = (lam.get(1).clone(), lam.get(2).clone());
    let s21 = mn(arr, &[O, Star, S(2)], &[O, Star, S(1)]);
    let s12 = mn(arr, &[O, Star, S(1)], &[O, Star, S(2)]);
    let a1 = mn(arr, &[O, Star, S(1)], &[O, S(2), S(1)]);
    let a2 = mn(arr, &[O, Star, S(2)], &[O, S(1), S(2)]);
    let b012 = arr.b0(jk);
    let mut f = th(arr, &[1])?.scaled(
        &((-&l2 * &s21 * &a1 + (&li + &l1 + &n - int(3)) * &a2 * arr.b0s(IndexSet::singleton(1))) / &b0sjk),
    );
    f.add_scaled(
        &th(arr, &[2])?,
        &((-&l1 * &s12 * &a2 + (&li + &l2 + &n - int(3)) * &a1 * arr.b0s(IndexSet::singleton(2))) / &b0sjk),
    );
    let r = &s12 * &b012 / &b0sjk;
    let c12 = -(&li - int(1)) * (int(2) * &r + int(1)) - (&n - int(1)) * (&r + int(1));
    f.add_scaled(&th(arr, &[1, 2])?, &c12);
    entries.insert((jk, jk), f);
    entries.retain(|_, v| !v.is_zero());
    Ok(ConnectionMatrix { basis: vec![IndexSet::singleton(1), IndexSet::singleton(2), jk], entries })
}

/// The auxiliary forms of the one-dimensional case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Zeta {
    /// `ζ_{jk}`
    Pair(usize, usize),
    /// `ζ_{jk,j}`
    Anchored(usize, usize),
    /// `ζ_{jkl}`
    Triple(usize, usize, usize),
}

/// `ζ_{jk}`, `ζ_{jk,j}` or `ζ_{jkl}` (for `n = 1`).
pub fn zeta_forms(arr: &Arrangement, which: Zeta) -> Result<ParamOneForm> {
    if arr.n() != 1 {
        return Err(Error::Invalid("ζ forms are defined for n = 1".into()));
    }
    let distinct = |v: &[usize]| v.iter().enumerate().all(|(i, a)| !v[..i].contains(a) && (1..=arr.m()).contains(a));
    match which {
        Zeta::Pair(j, k) | Zeta::Anchored(j, k) if !distinct(&[j, k]) => {
            Err(Error::Invalid(format!("ζ needs distinct spheres, got {j},{k}")))
        }
        Zeta::Triple(j, k, l) if !distinct(&[j, k, l]) => {
            Err(Error::Invalid(format!("ζ needs distinct spheres, got {j},{k},{l}")))
        }
        Zeta::Pair(j, k) => {
            let mut f = th(arr, &[j])?.scaled(&mn(arr, &[O, Star, S(j)], &[O, S(k), S(j)]));
            f.add_scaled(&th(arr, &[k])?, &mn(arr, &[O, Star, S(k)], &[O, S(j), S(k)]));
            f.add_scaled(&th(arr, &[j, k])?, &arr.b0(IndexSet::from_slice(&[j, k])));
            Ok(f)
        }
        Zeta::Anchored(j, k) => {
            let mut f = th(arr, &[j])?.scaled(&-mn(arr, &[O, Star, S(k)], &[O, Star, S(j)]));
            f.add_scaled(&th(arr, &[k])?, &arr.b0s(IndexSet::singleton(k)));
            f.add_scaled(&th(arr, &[j, k])?, &mn(arr, &[O, Star, S(k)], &[O, S(j), S(k)]));
            Ok(f)
        }
        Zeta::Triple(j, k, l) => {
            let mut f = th(arr, &[j, k])?.scaled(&mn(arr, &[O, Star, S(j), S(k)], &[O, S(l), S(j), S(k)]));
            f.add_scaled(&th(arr, &[j, l])?, &mn(arr, &[O, Star, S(j), S(l)], &[O, S(k), S(j), S(l)]));
            f.add_scaled(&th(arr, &[k, l])?, &mn(arr, &[O, Star, S(k), S(l)], &[O, S(j), S(k), S(l)]));
            Ok(f)
        }
    }
}

/// Closed form of the column `Θ_{·,J}` for `n = 1`, over the full admissible system
/// (not reduced; keys may be outside the basis).
pub fn one_dim_closed_column(arr: &Arrangement, lam: &LambdaPoint, jset: IndexSet) -> Result<Class<ParamOneForm>> {
    if arr.n() != 1 {
        return Err(Error::Invalid("the one-dimensional closed form needs n = 1".into()));
    }
    let m = arr.m();
    let li = lam.inf();
    let one = Scalar::one();
    let mut out = Class::zero(Kind::F);
    let set = IndexSet::from_slice;
    match jset.to_vec()[..] {
        [j] => {
            let mut f = th(arr, &[j])?.scaled(&-(&li + lam.get(j) - int(1)));
            for nu in (1..=m).filter(|&v| v != j) {
                f.add_scaled(&th(arr, &[j, nu])?, lam.get(nu));
            }
            out.add_term(set(&[j]), &f, &one);
            for k in (1..=m).filter(|&v| v != j) {
                out.add_term(set(&[k]), &th(arr, &[j])?.plus(&th(arr, &[j, k])?), &-lam.get(k));
                out.add_term(set(&[j, k]), &zeta_forms(arr, Zeta::Anchored(j, k))?, lam.get(k));
            }
        }
        [j, k] => {
            let b0sjk = nz(arr, arr.b0s(set(&[j, k])), "B(0*jk)")?;
            let zjk = zeta_forms(arr, Zeta::Pair(j, k))?;
            for (a, b) in [(j, k), (k, j)] {
                let mut f = zjk.scaled(&-(lam.get(a) / &b0sjk));
                f.add_scaled(&zeta_forms(arr, Zeta::Anchored(a, b))?, &-((&li - int(1)) / &b0sjk));
                out.add_term(set(&[a]), &f, &one);
            }
            for l in (1..=m).filter(|&v| v != j && v != k) {
                out.add_term(set(&[l]), &zjk, &-(lam.get(l) / &b0sjk));
                for (a, b) in [(j, k), (k, j)] {
                    // Θ_{al,ab}
                    let b0sabl = nz(arr, arr.b0s(set(&[a, b, l])), "B(0*jkl)")?;
                    let mut f = zeta_forms(arr, Zeta::Anchored(a, b))?.scaled(
                        &(arr.b0s(set(&[a, l])) * mn(arr, &[O, Star, S(a), S(b)], &[O, S(l), S(a), S(b)])
                            / (&b0sabl * &b0sjk)),
                    );
                    f.add_scaled(
                        &zeta_forms(arr, Zeta::Anchored(a, l))?,
                        &(mn(arr, &[O, Star, S(a), S(l)], &[O, S(b), S(a), S(l)]) / &b0sabl),
                    );
                    out.add_term(set(&[a, l]), &f, lam.get(l));
                }
            }
            out.add_term(set(&[j, k]), &one_dim_diagonal(arr, lam, j, k)?, &one);
        }
        _ => return Err(Error::Invalid(format!("one-dimensional columns are indexed by 1- or 2-sets, got {jset}"))),
    }
    Ok(out)
}

/// `Θ_{jk,jk}` for `n = 1`.
fn one_dim_diagonal(arr: &Arrangement, lam: &LambdaPoint, j: usize, k: usize) -> Result<ParamOneForm> {
    let m = arr.m();
    let set = IndexSet::from_slice;
    let b0sjk = nz(arr, arr.b0s(set(&[j, k])), "B(0*jk)")?;
    let (lj, lk) = (lam.get(j).clone(), lam.get(k).clone());
    let s = &lj + &lk - int(1);
    let (tj, tk, tjk) = (th(arr, &[j])?, th(arr, &[k])?, th(arr, &[j, k])?);
    let akj = mn(arr, &[O, Star, S(k)], &[O, S(j), S(k)]);
    let ajk = mn(arr, &[O, Star, S(j)], &[O, S(k), S(j)]);
    let b0sj = arr.b0s(set(&[j]));
    let b0sk = arr.b0s(set(&[k]));
    let mut f = tj.scaled(&(&lk + int(2) * &s * &b0sj * &akj / &b0sjk));
    f.add_scaled(&tk, &(&lj + int(2) * &s * &b0sk * &ajk / &b0sjk));
    let cross = mn(arr, &[O, Star, S(j)], &[O, Star, S(k)]);
    f.add_scaled(&tjk, &-(&s * (int(1) + int(2) * arr.b0(set(&[j, k])) * &cross / &b0sjk)));
    for nu in (1..=m).filter(|&v| v != j && v != k) {
        let ln = lam.get(nu);
        let d = nz(arr, arr.b0s(set(&[j, k, nu])), "B(0*jkν)")?;
        let mut g = tj.scaled(&(&b0sj * mn(arr, &[O, Star, S(k), S(nu)], &[O, S(j), S(k), S(nu)]) / &d));
        g.add_scaled(&tk, &(&b0sk * mn(arr, &[O, Star, S(j), S(nu)], &[O, S(k), S(j), S(nu)]) / &d));
        g.add_scaled(
            &th(arr, &[nu])?,
            &(arr.b0s(set(&[nu])) * mn(arr, &[O, Star, S(j), S(k)], &[O, S(nu), S(j), S(k)]) / &d),
        );
        g.add_scaled(
            &th(arr, &[k, nu])?,
            &(mn(arr, &[O, Star, S(k), S(nu)], &[O, S(j), S(k), S(nu)])
                * mn(arr, &[O, Star, S(j), S(nu)], &[O, Star, S(j), S(k)])
                * &akj
                / (&d * &b0sjk)),
        );
        g.add_scaled(
            &th(arr, &[j, nu])?,
            &(mn(arr, &[O, Star, S(j), S(nu)], &[O, S(k), S(j), S(nu)])
                * mn(arr, &[O, Star, S(k), S(nu)], &[O, Star, S(k), S(j)])
                * &ajk
                / (&d * &b0sjk)),
        );
        g.add_scaled(&tjk, &(&akj * &ajk / &b0sjk));
        f.add_scaled(&g, ln);
    }
    Ok(f)
}

/// For two spheres: the trace `Θ_{1,1} + Θ_{2,2} + Θ_{12,12}` and `d log W` of the
/// closed-form Wronskian. The two agree.
pub fn wronskian_trace(arr: &Arrangement, lam: &LambdaPoint) -> Result<(ParamOneForm, ParamOneForm)> {
    if arr.m() != 2 {
        return Err(Error::Invalid("the Wronskian trace is available for m = 2".into()));
    }
    let trace = gm_matrix(arr, lam)?.trace();
    let n = int(arr.n() as i64);
    let h = half();
    let mut closed = ParamOneForm::zero();
    for j in [1, 2] {
        let s = [O, Star, S(j)];
        closed.add_scaled(&dlog_minor(arr, &s, &s)?, &(lam.get(j) + (&n - int(2)) * &h));
    }
    let s = [O, Star, S(1), S(2)];
    closed.add_scaled(&dlog_minor(arr, &s, &s)?, &(lam.inf() + (&n - int(3)) * &h));
    if n != int(2) {
        let s = [O, S(1), S(2)];
        closed.add_scaled(&dlog_minor(arr, &s, &s)?, &-((&n - int(2)) * &h));
    }
    Ok((trace, closed))
}

/// Outcome of the empirical Wronskian check for `m ≤ n+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WronskianReport {
    /// `Tr Θ − Σ_J (λ_J + (n−|J|−1)/2) d log B(0⋆J)` at each exponent point.
    pub residuals: Vec<ParamOneForm>,
    /// Whether all residuals coincide.
    pub lambda_independent: bool,
}

/// Evaluates the conjectured trace formula at several exponent points.
pub fn wronskian_conjecture(arr: &Arrangement, lams: &[LambdaPoint]) -> Result<WronskianReport> {
    let n = arr.n();
    if arr.m() > n + 1 {
        return Err(Error::Invalid("the trace formula is stated for m ≤ n+1".into()));
    }
    let b = basis(arr.m(), n);
    let mut residuals = Vec::new();
    for lam in lams {
        let mut r = gm_matrix(arr, lam)?.trace();
        for &j in &b {
            let p = j.len() as i64;
            let e = lam.sum(j) + frac(n as i64 - p - 1, 2);
            let s = crate::arrangement::syms(&[O, Star], j);
            r.add_scaled(&dlog_minor(arr, &s, &s)?, &-e);
        }
        residuals.push(r);
    }
    let lambda_independent = residuals.windows(2).all(|w| w[0] == w[1]);
    Ok(WronskianReport { residuals, lambda_independent })
}

/// Coefficients expressing the cycle at infinity through the bounded cycles `𝔷_J` for
/// `m = n+1`: `−sin(πλ_{J^c})/sin(πλ_∞)` over basis sets with `|J| ≤ n` when `n` is odd,
/// `−cos(πλ_{J^c})/cos(πλ_∞)` over all basis sets when `n` is even.
pub fn infinity_cycle_coeffs(lam: &[f64], n: usize) -> Result<BTreeMap<IndexSet, f64>> {
    let m = lam.len();
    if m != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: m });
    }
    let pi = std::f64::consts::PI;
    let inf: f64 = lam.iter().sum();
    let odd = n % 2 == 1;
    let trig = |x: f64| if odd { (pi * x).sin() } else { (pi * x).cos() };
    let den = trig(inf);
    if den.abs() < 1e-12 {
        return Err(Error::ResonantDenominator(format!(
            "{} π λ_∞ vanishes at λ_∞ = {inf}",
            if odd { "sin" } else { "cos" }
        )));
    }
    let all = IndexSet::range(m);
    let mut out = BTreeMap::new();
    for j in basis(m, n) {
        if odd && j.len() > n {
            continue;
        }
        let comp: f64 = all.minus(j).iter().map(|i| lam[i - 1]).sum();
        out.insert(j, -trig(comp) / den);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::tests::standard;
    use crate::contiguity::tests::random_lambda;
    use crate::random::random_arrangement;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v)
    }

    #[test]
    fn theta_examples() {
        let a = standard();
        assert_eq!(theta(&a, set(&[1])).unwrap(), ParamOneForm::single(Differential::R2(1), frac(-1, 8)));
        assert_eq!(
            theta(&a, set(&[1, 2])).unwrap(),
            ParamOneForm::single(Differential::rho2(1, 2), frac(1, 18))
        );
    }

    #[test]
    fn cofactor_differential_matches_jets() {
        for (n, m) in [(1, 3), (2, 3), (3, 4)] {
            let a = random_arrangement(200 + n as u64, n, m, false).unwrap();
            for j in crate::indices::admissible_sets(m, n) {
                for rows in [
                    crate::arrangement::syms(&[O, Star], j),
                    crate::arrangement::syms(&[O], j),
                ] {
                    let jet = minor_jet(&a, &rows, &rows);
                    assert_eq!(jet.value, a.minor(&rows, &rows));
                    assert_eq!(jet.diff, d_minor(&a, &rows, &rows), "{rows:?}");
                }
            }
            let r = [O, Star, S(1), S(2)];
            let c = [O, S(3), S(1), S(2)];
            assert_eq!(minor_jet(&a, &r, &c).diff, d_minor(&a, &r, &c));
        }
    }

    #[test]
    fn differential_of_two_sphere_minor() {
        let a = random_arrangement(3, 2, 2, false).unwrap();
        let d = d_minor(&a, &[O, Star, S(1), S(2)], &[O, Star, S(1), S(2)]);
        let mut want = ParamOneForm::zero();
        // Each radius pairs with the minor built on the other sphere.
        want.add_term(Differential::R2(1), &(int(-2) * mn(&a, &[O, Star, S(2)], &[O, S(1), S(2)])));
        want.add_term(Differential::R2(2), &(int(-2) * mn(&a, &[O, Star, S(1)], &[O, S(2), S(1)])));
        want.add_term(Differential::rho2(1, 2), &(int(-2) * mn(&a, &[O, Star, S(1)], &[O, Star, S(2)])));
        assert_eq!(d, want);
    }

    #[test]
    fn theta_is_symmetric() {
        let a = random_arrangement(5, 3, 4, false).unwrap();
        let perm = |j: usize| [0, 3, 1, 4, 2][j];
        let b = {
            // The same configuration with spheres relabeled by `perm`.
            let mut alpha = a.alpha().to_vec();
            for j in 1..=4 {
                alpha[perm(j) - 1] = a.alpha()[j - 1].clone();
            }
            Arrangement::new(3, alpha).unwrap()
        };
        for j in crate::indices::admissible_sets(4, 3).into_iter().filter(|s| !s.is_empty()) {
            let pj: IndexSet = j.iter().map(perm).collect();
            assert_eq!(theta(&a, j).unwrap().relabel(perm), theta(&b, pj).unwrap(), "J={j}");
        }
    }

    #[test]
    fn chain_forms_match_displays() {
        for n in 1..=4 {
            let a = random_arrangement(300 + n as u64, n, n + 1, false).unwrap();
            let th = theta_chain_all(&a).unwrap();
            let nset = IndexSet::range(n + 1);
            for j in 1..=n {
                for k in j..=n {
                    for l in 1..=n + 1 {
                        assert!(th[j][k].get(Differential::R2(l)).is_zero());
                    }
                    if j >= 2 {
                        assert!(th[j][k].get(Differential::rho2(1, 2)).is_zero());
                    }
                }
                // θ_j^j = ½ d log(−B(0 j..n+1) / B(0 j+1..n+1))
                let upper: IndexSet = (j..=n + 1).collect();
                let rest = upper.without(j);
                let mut want = dlog_minor(&a, &crate::arrangement::syms(&[O], upper), &crate::arrangement::syms(&[O], upper)).unwrap();
                if !rest.is_empty() {
                    let s = crate::arrangement::syms(&[O], rest);
                    if rest.len() > 1 {
                        want = want.minus(&dlog_minor(&a, &s, &s).unwrap());
                    }
                }
                assert_eq!(th[j][j], want.scaled(&half()), "n={n} j={j}");
            }
            let b0n = a.b0(nset);
            let r12 = Differential::rho2(1, 2);
            if n >= 2 {
                let tail: IndexSet = (3..=n + 1).collect();
                assert_eq!(th[1][1].get(r12), -a.bx(&[O, S(1)], &[O, S(2)], tail) / &b0n);
                assert_eq!(th[1][2].get(r12), a.b0(nset.without(2)) / &b0n);
                for k in 3..=n {
                    let tail: IndexSet = nset.without(2).without(k);
                    let rows = crate::arrangement::seq(&[O, S(2)], &tail.to_vec());
                    let cols = crate::arrangement::seq(&[O, S(k)], &tail.to_vec());
                    // The displayed tail order is 1, 3, 4, …, which is increasing.
                    assert_eq!(th[1][k].get(r12), -a.minor(&rows, &cols) / &b0n, "n={n} k={k}");
                }
            }
            if n >= 2 {
                // θ_{j+1}^j display
                for j in 1..n {
                    let t: IndexSet = (j + 2..=n + 1).collect();
                    let upper: IndexSet = (j + 1..=n + 1).collect();
                    let rows = crate::arrangement::syms(&[O, S(j)], t);
                    let cols = crate::arrangement::syms(&[O, S(j + 1)], t);
                    let c = a.minor(&rows, &cols);
                    let mut want = d_minor(&a, &rows, &cols);
                    let mut dl = dlog_minor(&a, &crate::arrangement::syms(&[O], upper.with(j)), &crate::arrangement::syms(&[O], upper.with(j))).unwrap();
                    if t.len() >= 2 {
                        let s = crate::arrangement::syms(&[O], t);
                        dl = dl.plus(&dlog_minor(&a, &s, &s).unwrap());
                    }
                    want.add_scaled(&dl, &-(c * half()));
                    assert_eq!(th[j][j + 1], want.scaled(&(Scalar::one() / a.b0(upper))), "n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn two_sphere_closed_form_matches_recursion() {
        let mut checked = 0;
        for n in 1..=3 {
            for seed in 0..4 {
                let a = random_arrangement(400 + 10 * n as u64 + seed, n, 2, false).unwrap();
                let lam = random_lambda(30 + seed, 2);
                let Ok(rec) = gm_matrix(&a, &lam) else { continue };
                checked += 1;
                let closed = two_sphere_closed(&a, &lam).unwrap();
                for &k in &rec.basis {
                    for &j in &rec.basis {
                        assert_eq!(rec.get(k, j), closed.get(k, j), "n={n} K={k} J={j}");
                    }
                }
            }
        }
        assert!(checked >= 8);
    }

    #[test]
    fn anchor_does_not_matter() {
        for (n, m) in [(1, 3), (2, 3), (2, 4), (3, 4)] {
            let a = random_arrangement(500 + n as u64 * 10 + m as u64, n, m, false).unwrap();
            let lam = random_lambda(40, m);
            let mut gm = GaussManin::new(&a);
            for j in basis(m, n).into_iter().filter(|s| s.len() >= 2) {
                let cols: Vec<_> = j.iter().map(|x| gm.column(&lam, j, Some(x)).unwrap()).collect();
                for c in &cols[1..] {
                    assert_eq!(c, &cols[0], "n={n} m={m} J={j}");
                }
            }
        }
    }

    #[test]
    fn one_dimensional_closed_forms_match_recursion() {
        for m in 2..=4 {
            for seed in 0..3 {
                let a = random_arrangement(600 + 10 * m as u64 + seed, 1, m, false).unwrap();
                let lam = random_lambda(50 + seed, m);
                let red = Reducer::new(&a, Some(&lam));
                let mut gm = GaussManin::new(&a);
                for j in basis(m, 1) {
                    let closed = red.reduce(&one_dim_closed_column(&a, &lam, j).unwrap()).unwrap();
                    let rec = gm.column(&lam, j, None).unwrap();
                    assert_eq!(pullback_class(&a, &closed), pullback_class(&a, &rec), "m={m} J={j}");
                }
            }
        }
    }

    #[test]
    fn zeta_identities() {
        let a = random_arrangement(9, 1, 4, false).unwrap();
        // Three centers on a line tie the ρ² together; the form vanishes on the configuration space.
        assert!(!zeta_forms(&a, Zeta::Triple(1, 2, 3)).unwrap().is_zero());
        assert!(pullback_to_alpha(&a, &zeta_forms(&a, Zeta::Triple(1, 2, 3)).unwrap()).is_empty());
        assert!(pullback_to_alpha(&a, &zeta_forms(&a, Zeta::Triple(4, 2, 1)).unwrap()).is_empty());
        assert_eq!(zeta_forms(&a, Zeta::Pair(1, 3)).unwrap(), zeta_forms(&a, Zeta::Pair(3, 1)).unwrap());
    }

    #[test]
    fn wronskian_matches_trace() {
        for n in 1..=3 {
            let a = random_arrangement(700 + n as u64, n, 2, false).unwrap();
            let lam = random_lambda(60, 2);
            let (t, c) = wronskian_trace(&a, &lam).unwrap();
            assert_eq!(t, c, "n={n}");
        }
    }

    #[test]
    fn varpi_derivative_singletons() {
        let a = random_arrangement(11, 2, 3, false).unwrap();
        let lam = random_lambda(70, 3);
        let d = nabla_b_varpi(&a, &lam).unwrap();
        for j in 1..=3 {
            assert_eq!(d[&set(&[j])], theta(&a, set(&[j])).unwrap().scaled(lam.get(j)));
        }
        let lam0 = LambdaPoint::new(vec![Scalar::zero(), frac(1, 3), frac(2, 7)]);
        let d = nabla_b_varpi(&a, &lam0).unwrap();
        assert!(d.keys().all(|k| !k.contains(1)));
    }

    #[test]
    fn infinity_coefficients() {
        let c = infinity_cycle_coeffs(&[1.0 / 3.0, 1.0 / 3.0], 1).unwrap();
        assert!((c[&set(&[1])] + 1.0).abs() < 1e-12);
        assert!((c[&set(&[2])] + 1.0).abs() < 1e-12);
        assert_eq!(c.len(), 2);
        let c = infinity_cycle_coeffs(&[0.1, 0.2, 0.3], 2).unwrap();
        assert!((c[&set(&[1, 2, 3])] + 1.0 / (0.6 * std::f64::consts::PI).cos()).abs() < 1e-12);
        assert!(infinity_cycle_coeffs(&[0.5, 0.5], 1).is_err());
    }

    /// Smallest `d` such that the `(d+1)`-th finite difference of the column along a
    /// λ-line with fixed `λ_∞` vanishes, searched up to `cap`.
    fn lambda_degree(a: &Arrangement, base: &LambdaPoint, j: IndexSet, cap: usize) -> Option<usize> {
        let step = |t: i64| {
            let mut v = base.values().to_vec();
            v[0] += frac(t, 7);
            v[1] -= frac(t, 7);
            LambdaPoint::new(v)
        };
        let samples: Vec<_> = (0..=cap as i64 + 1)
            .map(|t| pullback_class(a, &GaussManin::new(a).column(&step(t), j, None).unwrap()))
            .collect();
        (0..=cap).find(|&d| {
            let mut acc: BTreeMap<(IndexSet, (usize, usize)), Scalar> = BTreeMap::new();
            for t in 0..=d + 1 {
                let c = crate::indices::binomial(d + 1, t) as i64;
                let sign = int(if t % 2 == 0 { c } else { -c });
                for (k, cov) in &samples[t] {
                    for (dd, v) in cov {
                        *acc.entry((*k, *dd)).or_insert_with(Scalar::zero) += v * &sign;
                    }
                }
            }
            acc.values().all(|v| v.is_zero())
        })
    }

    #[test]
    fn shift_denominators_cancel_along_lambda_lines() {
        // A leftover pole at λ_j = 1 would make the column non-polynomial along the line.
        for (n, m) in [(1, 3), (2, 3), (2, 4)] {
            let a = random_arrangement(800 + n as u64 * 10 + m as u64, n, m, false).unwrap();
            let base = random_lambda(80, m);
            for j in basis(m, n) {
                let cap = n + j.len();
                let d = lambda_degree(&a, &base, j, cap);
                assert!(d.is_some(), "n={n} m={m} J={j}");
            }
        }
    }

    #[test]
    fn trace_conjecture_holds_for_two_spheres() {
        for n in 1..=3 {
            let a = random_arrangement(900 + n as u64, n, 2, false).unwrap();
            let lams: Vec<_> = (0..3).map(|s| random_lambda(90 + s, 2)).collect();
            let rep = wronskian_conjecture(&a, &lams).unwrap();
            assert!(rep.lambda_independent, "n={n}");
            // The residual is the logarithmic differential of B(012)^{-(n-2)/2}.
            let s = [O, S(1), S(2)];
            let want = dlog_minor(&a, &s, &s).unwrap().scaled(&frac(-(n as i64 - 2), 2));
            assert_eq!(rep.residuals[0], want);
        }
    }

    #[test]
    fn relabeling_two_spheres_permutes_the_connection() {
        let a = random_arrangement(950, 2, 2, false).unwrap();
        let mut alpha = a.alpha().to_vec();
        alpha.swap(0, 1);
        let b = Arrangement::new(2, alpha).unwrap();
        let lam = random_lambda(95, 2);
        let lam_b = LambdaPoint::new(vec![lam.get(2).clone(), lam.get(1).clone()]);
        let swap = |j: usize| 3 - j;
        let ta = gm_matrix(&a, &lam).unwrap();
        let tb = gm_matrix(&b, &lam_b).unwrap();
        for &k in &ta.basis {
            for &j in &ta.basis {
                let pk: IndexSet = k.iter().map(swap).collect();
                let pj: IndexSet = j.iter().map(swap).collect();
                assert_eq!(ta.get(k, j).relabel(swap), tb.get(pk, pj), "K={k} J={j}");
            }
        }
    }
}
