//! Cohomology classes in the `F_J` and `W₀(J)ϖ` bases, the triangular transition
//! between them, and reduction to the NBC basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arrangement::{Arrangement, Sym};
use crate::error::{Error, Result};
use crate::indices::{is_nbc, permutations, IndexSet};
use crate::linalg::{int, Scalar};

use Sym::{Star, Zero as O, S};

/// Coefficient types a class can carry: rationals, or covectors for connection matrices.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn empty() -> Self;
    fn vanishes(&self) -> bool;
    /// `self += s · other`.
    fn add_scaled(&mut self, other: &Self, s: &Scalar);
    fn scaled(&self, s: &Scalar) -> Self {
        let mut z = Self::empty();
        z.add_scaled(self, s);
        z
    }
}

impl Coeff for Scalar {
    fn empty() -> Self {
        Zero::zero()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        *self += other * s;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Coefficients on `F_J = ϖ / Π_{j∈J} f_j`; the empty key is `ϖ`.
    F,
    /// Coefficients on `W₀(J)ϖ`; the empty key is `ϖ`.
    W0,
}

/// A finite linear combination of basis forms of one kind.
#[derive(Clone, PartialEq)]
pub struct Class<C: Coeff = Scalar> {
    pub kind: Kind,
    terms: BTreeMap<IndexSet, C>,
}

pub type CohomClass = Class<Scalar>;

impl<C: Coeff> fmt::Debug for Class<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<C: Coeff> Class<C> {
    pub fn zero(kind: Kind) -> Self {
        Class { kind, terms: BTreeMap::new() }
    }

    pub fn single(kind: Kind, key: IndexSet, c: C) -> Self {
        let mut z = Self::zero(kind);
        z.add_term(key, &c, &Scalar::one());
        z
    }

    /// `self[key] += s · c`, pruning zeros.
    pub fn add_term(&mut self, key: IndexSet, c: &C, s: &Scalar) {
        if Zero::is_zero(s) || c.vanishes() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(C::empty);
        e.add_scaled(c, s);
        if e.vanishes() {
            self.terms.remove(&key);
        }
    }

    /// `self += s · other`; both must have the same kind.
    pub fn add_scaled(&mut self, other: &Self, s: &Scalar) {
        assert_eq!(self.kind, other.kind, "adding classes of different kinds");
        for (k, c) in &other.terms {
            self.add_term(*k, c, s);
        }
    }

    /// `self += c ⊗ other` for a rational class `other`.
    pub fn add_outer(&mut self, other: &CohomClass, c: &C) {
        assert_eq!(self.kind, other.kind, "adding classes of different kinds");
        for (k, s) in &other.terms {
            self.add_term(*k, c, s);
        }
    }

    pub fn scaled(&self, s: &Scalar) -> Self {
        let mut z = Self::zero(self.kind);
        z.add_scaled(self, s);
        z
    }

    pub fn get(&self, key: IndexSet) -> C {
        self.terms.get(&key).cloned().unwrap_or_else(C::empty)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IndexSet, &C)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = IndexSet> + '_ {
        self.terms.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Applies `f` to every coefficient, keeping keys.
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Class<D> {
        let mut z = Class::zero(self.kind);
        for (k, c) in &self.terms {
            z.add_term(*k, &f(c), &Scalar::one());
        }
        z
    }
}

impl CohomClass {
    pub fn f(key: IndexSet) -> Self {
        Self::single(Kind::F, key, Scalar::one())
    }

    pub fn w0(key: IndexSet) -> Self {
        Self::single(Kind::W0, key, Scalar::one())
    }
}

/// Minimum and maximum `|J|` over the support; `(0, 0)` for the zero class.
pub fn weight_range<C: Coeff>(cls: &Class<C>) -> (usize, usize) {
    let mut it = cls.keys().map(|k| k.len());
    match it.next() {
        None => (0, 0),
        Some(first) => it.fold((first, first), |(lo, hi), w| (lo.min(w), hi.max(w))),
    }
}

/// An exact exponent vector `λ`, with `λ_∞ = Σ λ_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaPoint {
    lam: Vec<Scalar>,
}

impl LambdaPoint {
    pub fn new(lam: Vec<Scalar>) -> Self {
        LambdaPoint { lam }
    }

    pub fn m(&self) -> usize {
        self.lam.len()
    }

    /// `λ_j`, 1-based.
    pub fn get(&self, j: usize) -> &Scalar {
        &self.lam[j - 1]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.lam
    }

    pub fn inf(&self) -> Scalar {
        self.lam.iter().sum()
    }

    /// `λ_J`.
    pub fn sum(&self, j: IndexSet) -> Scalar {
        j.iter().map(|i| self.lam[i - 1].clone()).sum()
    }

    /// `Π_{j∈J} λ_j`.
    pub fn prod(&self, j: IndexSet) -> Scalar {
        j.iter().fold(Scalar::one(), |acc, i| acc * &self.lam[i - 1])
    }

    /// `λ + d ε_j`.
    pub fn shift(&self, j: usize, d: i64) -> Self {
        let mut l = self.lam.clone();
        l[j - 1] += int(d);
        LambdaPoint { lam: l }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.lam.iter().map(crate::linalg::to_f64).collect()
    }

    /// No-resonance: `λ_j ∉ {0,1,2,…}` and `2λ_∞ ∉ {0,−1,−2,…}`.
    pub fn check_nonresonant(&self) -> Result<()> {
        for (i, l) in self.lam.iter().enumerate() {
            if l.is_integer() && !l.is_negative() {
                return Err(Error::ResonantDenominator(format!("λ_{} = {l} is a nonnegative integer", i + 1)));
            }
        }
        let t = int(2) * self.inf();
        if t.is_integer() && !t.is_positive() {
            return Err(Error::ResonantDenominator(format!("2λ_∞ = {t} is a nonpositive integer")));
        }
        Ok(())
    }
}

/// Returns `x` or a resonance error naming the vanishing factor.
pub fn nonresonant(x: Scalar, what: impl FnOnce() -> String) -> Result<Scalar> {
    if Zero::is_zero(&x) {
        Err(Error::ResonantDenominator(what()))
    } else {
        Ok(x)
    }
}

/// `W₀(J)ϖ` in the `F` basis.
pub fn w0_in_f(arr: &Arrangement, j: IndexSet) -> CohomClass {
    let mut out = CohomClass::zero(Kind::F);
    let p = j.len();
    if p == 0 || p >= arr.n() + 2 {
        return if p == 0 { CohomClass::f(IndexSet::EMPTY) } else { out };
    }
    out.add_term(j, &arr.b0s(j), &Scalar::one());
    if p >= 2 {
        for nu in j.iter() {
            let d = j.without(nu);
            let c = arr.bx(&[O, Star], &[O, S(nu)], d);
            out.add_term(d, &c, &-Scalar::one());
        }
    }
    out
}

/// Formal expansion of a `W₀` class in the `F` basis; `ϖ` maps to `F_∅`.
pub fn w0_class_in_f<C: Coeff>(arr: &Arrangement, cls: &Class<C>) -> Class<C> {
    assert_eq!(cls.kind, Kind::W0);
    let mut out = Class::zero(Kind::F);
    for (k, c) in cls.terms() {
        out.add_outer(&w0_in_f(arr, *k), c);
    }
    out
}

/// `β_{J, J∪{l}}`.
fn beta_step(arr: &Arrangement, k: IndexSet, l: usize) -> Result<Scalar> {
    let d = arr.nonzero(arr.b0s(k), || format!("B(0*{k}) in the transition matrix"))?;
    Ok(arr.bx(&[O, Star], &[O, S(l)], k) / d)
}

/// `β_{K,J}` by the first-step recurrence, memoized per call.
pub fn beta(arr: &Arrangement, k: IndexSet, j: IndexSet) -> Result<Scalar> {
    let mut memo = HashMap::new();
    beta_rec(arr, k, j, &mut memo)
}

fn beta_rec(arr: &Arrangement, k: IndexSet, j: IndexSet, memo: &mut HashMap<IndexSet, Scalar>) -> Result<Scalar> {
    if !k.is_subset(j) {
        return Ok(Scalar::zero());
    }
    if k == j {
        return Ok(Scalar::one());
    }
    if let Some(v) = memo.get(&k) {
        return Ok(v.clone());
    }
    let mut acc = Scalar::zero();
    for l in j.minus(k).iter() {
        let step = beta_step(arr, k, l)?;
        if Zero::is_zero(&step) {
            continue;
        }
        acc += step * beta_rec(arr, k.with(l), j, memo)?;
    }
    memo.insert(k, acc.clone());
    Ok(acc)
}

/// `β_{K,J}` as the sum over all chains `K = L₀ ⊂ L₁ ⊂ ⋯ ⊂ L_p = J`.
pub fn beta_closed(arr: &Arrangement, k: IndexSet, j: IndexSet) -> Result<Scalar> {
    if !k.is_subset(j) {
        return Ok(Scalar::zero());
    }
    let mut acc = Scalar::zero();
    for order in permutations(&j.minus(k).to_vec()) {
        let mut l = k;
        let mut term = Scalar::one();
        for &x in &order {
            term *= beta_step(arr, l, x)?;
            l = l.with(x);
        }
        acc += term;
    }
    Ok(acc)
}

/// `β̃_{K,J} = β_{K,J} / B(0⋆J)`.
pub fn beta_tilde(arr: &Arrangement, k: IndexSet, j: IndexSet) -> Result<Scalar> {
    let d = arr.nonzero(arr.b0s(j), || format!("B(0*{j}) in the transition matrix"))?;
    Ok(beta(arr, k, j)? / d)
}

/// All nonzero `β_{K,J}` over admissible `K ⊆ J`.
pub fn beta_matrix(arr: &Arrangement) -> Result<BTreeMap<(IndexSet, IndexSet), Scalar>> {
    let mut out = BTreeMap::new();
    for j in crate::indices::admissible_sets(arr.m(), arr.n()) {
        let mut memo = HashMap::new();
        for k in j.subsets().filter(|k| !k.is_empty()) {
            let v = beta_rec(arr, k, j, &mut memo)?;
            if !Zero::is_zero(&v) {
                out.insert((k, j), v);
            }
        }
    }
    Ok(out)
}

/// `F_J` in the `W₀` basis: `Σ_K β̃_{K,J} W₀(K)ϖ`.
pub fn f_in_w0(arr: &Arrangement, j: IndexSet) -> Result<CohomClass> {
    let mut out = CohomClass::zero(Kind::W0);
    if j.is_empty() {
        return Ok(CohomClass::w0(j));
    }
    let d = arr.nonzero(arr.b0s(j), || format!("B(0*{j}) in the transition matrix"))?;
    let mut memo = HashMap::new();
    for k in j.subsets().filter(|k| !k.is_empty()) {
        let v = beta_rec(arr, k, j, &mut memo)?;
        out.add_term(k, &(v / &d), &Scalar::one());
    }
    Ok(out)
}

/// Coefficients of `W₀(J)ϖ` in `(2λ_∞ + n)ϖ` over all admissible `J`.
pub fn standard_form(arr: &Arrangement, lam: &LambdaPoint) -> Result<CohomClass> {
    let n = arr.n() as i64;
    let li = lam.inf();
    let mut out = CohomClass::zero(Kind::W0);
    for j in crate::indices::admissible_sets(arr.m(), arr.n()) {
        let p = j.len();
        let mut den = Scalar::one();
        for s in 1..p as i64 {
            den *= nonresonant(&li + int(n - s), || format!("λ_∞ + n - {s}"))?;
        }
        let sign = if p % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        out.add_term(j, &(sign * lam.prod(j) / den), &Scalar::one());
    }
    Ok(out)
}

/// `ϖ` itself in the `W₀` basis (the standard form divided by `2λ_∞ + n`).
pub fn varpi_in_w0(arr: &Arrangement, lam: &LambdaPoint) -> Result<CohomClass> {
    let t = nonresonant(int(2) * lam.inf() + int(arr.n() as i64), || "2λ_∞ + n".into())?;
    Ok(standard_form(arr, lam)?.scaled(&(Scalar::one() / t)))
}

/// Reduction of `F`-basis forms to the NBC basis. Results for nonempty `J` do not
/// depend on `λ` and are cached on the arrangement.
///
/// For `m ≤ n` every nonempty set is a basis element and only `ϖ` is rewritten.
pub struct Reducer<'a> {
    arr: &'a Arrangement,
    lam: Option<&'a LambdaPoint>,
}

impl<'a> Reducer<'a> {
    pub fn new(arr: &'a Arrangement, lam: Option<&'a LambdaPoint>) -> Self {
        Reducer { arr, lam }
    }

    fn is_basis(&self, j: IndexSet) -> bool {
        let n = self.arr.n();
        if self.arr.m() <= n {
            !j.is_empty()
        } else {
            is_nbc(j, n)
        }
    }

    /// `F_J` reduced to the basis.
    pub fn reduce_f(&self, j: IndexSet) -> Result<CohomClass> {
        if j.is_empty() {
            let lam = self.lam.ok_or_else(|| {
                Error::Invalid("expanding the standard form requires exponents".into())
            })?;
            let w = varpi_in_w0(self.arr, lam)?;
            return self.reduce(&w);
        }
        if self.is_basis(j) {
            return Ok(CohomClass::f(j));
        }
        if let Some(v) = self.arr.reduction_cache().lock().expect("reduction cache poisoned").get(&j) {
            return Ok(v.clone());
        }
        let v = self.reduce_f_uncached(j)?;
        self.arr.reduction_cache().lock().expect("reduction cache poisoned").insert(j, v.clone());
        Ok(v)
    }

    fn reduce_f_uncached(&self, j: IndexSet) -> Result<CohomClass> {
        let arr = self.arr;
        let n = arr.n();
        let p = j.len();
        let mut out = CohomClass::zero(Kind::F);
        if p >= n + 2 {
            let jp = j.lowest(n + 2);
            let rest = j.minus(jp);
            let c = arr.nonzero(arr.b0s(jp), || format!("B(0*{jp}) in a partial-fraction expansion"))?;
            for nu in jp.iter() {
                let d = jp.without(nu);
                let coef = arr.bx(&[O, Star], &[O, S(nu)], d) / &c;
                if Zero::is_zero(&coef) {
                    continue;
                }
                out.add_scaled(&self.reduce_f(d.union(rest))?, &coef);
            }
            return Ok(out);
        }
        // |J| = n+1 without the distinguished index n+1.
        let w = f_in_w0(arr, j)?;
        self.reduce(&w)
    }

    /// `W₀(K)ϖ` reduced to the basis, expressed in `F`.
    pub fn reduce_w0(&self, k: IndexSet) -> Result<CohomClass> {
        let arr = self.arr;
        let n = arr.n();
        let p = k.len();
        if p == 0 {
            return self.reduce_f(k);
        }
        if p >= n + 2 {
            return Ok(CohomClass::zero(Kind::F));
        }
        if p == n + 1 && !self.is_basis(k) {
            let mut out = CohomClass::zero(Kind::F);
            for (kk, c) in w0_relation(arr, k, n + 1)?.terms() {
                out.add_scaled(&self.reduce_f_from_w0(*kk)?, c);
            }
            return Ok(out);
        }
        self.reduce_f_from_w0(k)
    }

    fn reduce_f_from_w0(&self, k: IndexSet) -> Result<CohomClass> {
        let mut out = CohomClass::zero(Kind::F);
        for (kk, c) in w0_in_f(self.arr, k).terms() {
            out.add_scaled(&self.reduce_f(*kk)?, c);
        }
        Ok(out)
    }

    /// Any class, in either basis, rewritten in the `F` basis supported on basis sets.
    pub fn reduce<C: Coeff>(&self, cls: &Class<C>) -> Result<Class<C>> {
        let mut out = Class::zero(Kind::F);
        for (k, c) in cls.terms() {
            let r = match cls.kind {
                Kind::F => self.reduce_f(*k)?,
                Kind::W0 => self.reduce_w0(*k)?,
            };
            out.add_outer(&r, c);
        }
        Ok(out)
    }
}

/// `W₀(K)ϖ` for `|K| = n+1`, `a ∉ K`, as a combination of `W₀(∂_b J')ϖ` with
/// `J' = K ∪ {a}` and `b ∈ K`; every term on the right contains `a`.
pub fn w0_relation(arr: &Arrangement, k: IndexSet, a: usize) -> Result<CohomClass> {
    let jp = k.with(a);
    let mut out = CohomClass::zero(Kind::W0);
    for b in k.iter() {
        let r = jp.without(a).without(b);
        let d = jp.without(b);
        let den = arr.nonzero(arr.b0(d), || format!("B(0{d}) in the second-kind relation"))?;
        out.add_term(d, &(arr.bx(&[O, S(a)], &[O, S(b)], r) / den), &Scalar::one());
    }
    Ok(out)
}

/// Reduction without exponents; fails if the standard form would be needed.
pub fn reduce_to_nbc(arr: &Arrangement, cls: &CohomClass) -> Result<CohomClass> {
    Reducer::new(arr, None).reduce(cls)
}

/// Reduction that expands `ϖ` through the standard form at `λ`.
pub fn reduce_to_nbc_at(arr: &Arrangement, lam: &LambdaPoint, cls: &CohomClass) -> Result<CohomClass> {
    Reducer::new(arr, Some(lam)).reduce(cls)
}

/// Value of an `F`-basis class as a rational function at a point where no `f_j` vanishes
/// (`ϖ` contributes its coefficient, `F_J` contributes `1/Π f_j(x)`).
pub fn eval_f_class(arr: &Arrangement, cls: &CohomClass, x: &[Scalar]) -> Scalar {
    assert_eq!(cls.kind, Kind::F);
    let fx: Vec<Scalar> = (1..=arr.m()).map(|j| arr.eval_f(j, x)).collect();
    cls.terms()
        .map(|(k, c)| {
            let den = k.iter().fold(Scalar::one(), |acc, j| acc * &fx[j - 1]);
            c / den
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::tests::standard;
    use crate::linalg::frac;
    use crate::random::random_arrangement;

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_slice(v)
    }

    #[test]
    fn w0_examples() {
        let a = standard();
        assert_eq!(w0_in_f(&a, set(&[1])), CohomClass::single(Kind::F, set(&[1]), int(8)));
        let w = w0_in_f(&a, set(&[1, 2]));
        assert_eq!(w.get(set(&[1, 2])), int(-63));
        assert_eq!(w.get(set(&[1])), -a.minor(&[O, Star, S(1)], &[O, S(2), S(1)]));
        let three = Arrangement::new(1, vec![vec![int(0), int(-4)], vec![int(-3), int(5)], vec![int(2), int(-1)]]).unwrap();
        assert!(w0_in_f(&three, set(&[1, 2, 3])).is_zero());
        assert_eq!(weight_range(&w), (1, 2));
        assert_eq!(weight_range(&CohomClass::zero(Kind::F)), (0, 0));
    }

    #[test]
    fn beta_basics() {
        let a = standard();
        let j = set(&[1, 2]);
        assert_eq!(beta(&a, j, j).unwrap(), int(1));
        let step = a.minor(&[O, Star, S(1)], &[O, S(2), S(1)]) / a.b0s(set(&[1]));
        assert_eq!(beta(&a, set(&[1]), j).unwrap(), step);
    }

    #[test]
    fn standard_form_example() {
        let a = standard();
        let lam = LambdaPoint::new(vec![frac(1, 2), frac(1, 2)]);
        let s = standard_form(&a, &lam).unwrap();
        assert_eq!(s.get(set(&[1])), frac(-1, 2));
        assert_eq!(s.get(set(&[2])), frac(-1, 2));
        assert_eq!(s.get(set(&[1, 2])), frac(1, 4));
        let z = LambdaPoint::new(vec![int(0), frac(1, 3)]);
        assert!(standard_form(&a, &z).unwrap().get(set(&[1, 2])).is_zero());
    }

    #[test]
    fn relation_matches_signed_distance_form() {
        // Collinear centers: the relation coefficients are ratios of signed distances.
        let a = Arrangement::from_centers(&[vec![int(0)], vec![int(1)], vec![int(3)]], &[int(4), int(5), int(6)]).unwrap();
        let rho = |j: usize, k: usize| a.alpha()[j - 1][0].clone() - &a.alpha()[k - 1][0];
        let r = w0_relation(&a, set(&[1, 3]), 2).unwrap();
        assert_eq!(r.get(set(&[2, 3])), rho(1, 3) / rho(2, 3));
        assert_eq!(r.get(set(&[1, 2])), rho(1, 3) / rho(1, 2));
    }

    #[test]
    fn reduction_is_idempotent_and_exact() {
        for seed in 0..4 {
            let a = random_arrangement(seed, 1, 4, false).unwrap();
            let b = crate::indices::basis(4, 1);
            for j in crate::indices::admissible_sets(4, 1) {
                let r = reduce_to_nbc(&a, &CohomClass::f(j)).unwrap();
                assert!(r.keys().all(|k| b.contains(&k)));
                assert_eq!(reduce_to_nbc(&a, &r).unwrap(), r);
            }
        }
    }

    #[test]
    fn varpi_needs_exponents() {
        let a = standard();
        assert!(reduce_to_nbc(&a, &CohomClass::f(IndexSet::EMPTY)).is_err());
        let lam = LambdaPoint::new(vec![frac(1, 3), frac(1, 5)]);
        let r = reduce_to_nbc_at(&a, &lam, &CohomClass::f(IndexSet::EMPTY)).unwrap();
        assert!(!r.is_zero());
        assert!(r.keys().all(|k| !k.is_empty()));
    }

    #[test]
    fn resonance_guards() {
        assert!(LambdaPoint::new(vec![int(2), frac(1, 2)]).check_nonresonant().is_err());
        assert!(LambdaPoint::new(vec![frac(-1, 2), frac(-1, 2)]).check_nonresonant().is_err());
        assert!(LambdaPoint::new(vec![frac(1, 3), frac(1, 2)]).check_nonresonant().is_ok());
    }

    use proptest::prelude::*;
    use rand::Rng;

    fn point(seed: u64, n: usize) -> Vec<Scalar> {
        let mut r = crate::random::rng(seed ^ 0x5eed);
        (0..n).map(|_| Scalar::new(r.gen_range(-97i64..=97).into(), r.gen_range(7i64..=31).into())).collect()
    }

    fn w0_f(a: &Arrangement, cls: &CohomClass) -> CohomClass {
        w0_class_in_f(a, cls)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn beta_recurrence_equals_chain_sum_and_inverts(seed in 0u64..1000, n in 1usize..=3, extra in 0usize..=2) {
            let m = (n + 1 + extra).min(5);
            let a = random_arrangement(seed, n, m, false).unwrap();
            for j in crate::indices::admissible_sets(m, n) {
                for k in j.subsets().filter(|k| !k.is_empty()) {
                    prop_assert_eq!(beta(&a, k, j).unwrap(), beta_closed(&a, k, j).unwrap());
                }
                let back = w0_f(&a, &f_in_w0(&a, j).unwrap());
                prop_assert_eq!(back, CohomClass::f(j));
            }
        }

        #[test]
        fn partial_fractions_and_vanishing_hold_pointwise(seed in 0u64..1000, n in 1usize..=3) {
            let m = n + 2;
            let a = random_arrangement(seed, n, m, false).unwrap();
            let x = point(seed, n);
            let jp = IndexSet::range(m);
            // Σ_ν c_ν f_ν is the constant B(0⋆J').
            let mut acc = Scalar::zero();
            for nu in jp.iter() {
                acc += a.bx(&[O, Star], &[O, S(nu)], jp.without(nu)) * a.eval_f(nu, &x);
            }
            prop_assert_eq!(acc, a.b0s(jp));
            // The literal second-kind expansion at |J| = n+2 vanishes as a function.
            let mut lit = CohomClass::zero(Kind::F);
            lit.add_term(jp, &a.b0s(jp), &Scalar::one());
            for nu in jp.iter() {
                lit.add_term(jp.without(nu), &a.bx(&[O, Star], &[O, S(nu)], jp.without(nu)), &-Scalar::one());
            }
            prop_assert!(eval_f_class(&a, &lit, &x).is_zero());
        }

        #[test]
        fn second_kind_relation_holds_for_every_anchor(seed in 0u64..1000, n in 1usize..=3) {
            let m = n + 2;
            let a = random_arrangement(seed, n, m, false).unwrap();
            let x = point(seed, n);
            let jp = IndexSet::range(m);
            for anchor in jp.iter() {
                let k = jp.without(anchor);
                let lhs = eval_f_class(&a, &w0_in_f(&a, k), &x);
                let rhs = eval_f_class(&a, &w0_f(&a, &w0_relation(&a, k, anchor).unwrap()), &x);
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn reduction_preserves_the_function(seed in 0u64..1000, n in 1usize..=2, extra in 1usize..=2) {
            let m = n + 1 + extra;
            let a = random_arrangement(seed, n, m, false).unwrap();
            let x = point(seed, n);
            let big = IndexSet::range(m).subsets().filter(|s| s.len() >= 1 && s.len() <= m);
            for j in big {
                let r = reduce_to_nbc(&a, &CohomClass::f(j)).unwrap();
                prop_assert_eq!(eval_f_class(&a, &r, &x), eval_f_class(&a, &CohomClass::f(j), &x));
                prop_assert!(r.keys().all(|k| is_nbc(k, n)));
            }
        }
    }
}
