//! Contiguity relations: multiplication by `f_j` (raising `λ_j`) and by `f_j^{-1}`
//! (lowering it), expressed on the `F` basis.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::arrangement::{Arrangement, Sym};
use crate::cohomology::{
    beta_tilde, nonresonant, Class, CohomClass, Kind, LambdaPoint, Reducer,
};
use crate::error::{Error, Result};
use crate::indices::IndexSet;
use crate::linalg::{int, inverse, Scalar};

pub use crate::cohomology::standard_form;

use Sym::{Star, Zero as O, S};

fn one() -> Scalar {
    Scalar::one()
}

fn lam_minus_one(lam: &LambdaPoint, j: usize) -> Scalar {
    lam.get(j) - one()
}

// ---------------------------------------------------------------------------
// Negative direction
// ---------------------------------------------------------------------------

/// `W₀^{(j)}(J)ϖ = (λ_j − 1) 𝔐_{f_j^{-1}} W₀(J)ϖ` from the closed forms, before basis
/// reduction. Every `F_K` in the result is adjacent to `J`.
pub fn gamma_raw(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    let n = arr.n();
    let p = jset.len();
    if p == 0 || p > n + 1 {
        return Err(Error::Invalid(format!("{jset} is not admissible")));
    }
    let mut out = CohomClass::zero(Kind::F);
    let lj1 = lam_minus_one(lam, j);
    if !jset.contains(j) {
        if p == 1 {
            out.add_term(jset.with(j), &arr.b0s(jset), &lj1);
        } else if p <= n {
            for k in jset.iter() {
                let d = jset.without(k);
                out.add_term(d.with(j), &arr.bx(&[O, Star], &[O, S(k)], d), &-lj1.clone());
            }
            out.add_term(jset.with(j), &arr.b0s(jset), &lj1);
        } else {
            // |J| = n+1: the F_{jJ} term is eliminated by partial fractions.
            let big = jset.with(j);
            let den = arr.nonzero(arr.b0s(big), || format!("B(0*{big}) in the reduced lowering form"))?;
            let pre = arr.bx(&[O, Star], &[O, S(j)], jset) / den * &lj1;
            out.add_term(jset, &arr.b0s(jset), &pre);
            for nu in jset.iter() {
                let d = jset.without(nu);
                let c = arr.bx(&[O, Star, S(j)], &[O, Star, S(nu)], d);
                out.add_term(d.with(j), &c, &-pre.clone());
            }
        }
        return Ok(out);
    }
    let m = arr.m();
    let others = jset.complement(m);
    if p == 1 {
        let li = lam.inf();
        out.add_term(jset, &-(li + int(n as i64 - 2) + lam.get(j)), &one());
        for k in others.iter() {
            let lk = lam.get(k);
            out.add_term(IndexSet::singleton(k), lk, &-one());
            out.add_term(jset.with(k), &arr.minor(&[O, Star, S(k)], &[O, Star, S(j)]), &-lk.clone());
        }
        return Ok(out);
    }
    let c_inf = lam.inf() + int(n as i64 - p as i64);
    out.add_scaled(&z_j(arr, j, jset), &c_inf);
    for k in others.iter() {
        let z = if p <= n { z_jk(arr, j, jset, k) } else { z_jk_reduced(arr, j, jset, k)? };
        out.add_scaled(&z, lam.get(k));
    }
    Ok(out)
}

/// `Z_J^j`.
fn z_j(arr: &Arrangement, j: usize, jset: IndexSet) -> CohomClass {
    let dj = jset.without(j);
    let mut z = CohomClass::zero(Kind::F);
    z.add_term(dj, &arr.b0(dj), &one());
    for nu in dj.iter() {
        let r = dj.without(nu);
        z.add_term(jset.without(nu), &arr.bx(&[O, S(j)], &[O, S(nu)], r), &-one());
    }
    z.add_term(jset, &arr.bx(&[O, Star], &[O, S(j)], dj), &one());
    z
}

/// `Z_{J,k}^j` for `|J| ≤ n`.
fn z_jk(arr: &Arrangement, j: usize, jset: IndexSet, k: usize) -> CohomClass {
    let dj = jset.without(j);
    let mut z = CohomClass::zero(Kind::F);
    z.add_term(dj.with(k), &arr.bx(&[O, Star], &[O, S(k)], dj), &one());
    for nu in dj.iter() {
        let r = dj.without(nu);
        let c = arr.bx(&[O, Star, S(j)], &[O, S(k), S(nu)], r);
        z.add_term(jset.without(nu).with(k), &c, &-one());
    }
    z.add_term(jset.with(k), &arr.bx(&[O, Star, S(k)], &[O, Star, S(j)], dj), &-one());
    z
}

/// `Z_{J,k}^j` for `|J| = n+1`, with `F_{kJ}` removed by partial fractions.
fn z_jk_reduced(arr: &Arrangement, j: usize, jset: IndexSet, k: usize) -> Result<CohomClass> {
    let dj = jset.without(j);
    let big = jset.with(k);
    let den = arr.nonzero(arr.b0s(big), || format!("B(0*{big}) in the reduced lowering form"))?;
    let pre = arr.bx(&[O, Star], &[O, S(k)], jset) / den;
    let mut z = CohomClass::zero(Kind::F);
    z.add_term(dj.with(k), &arr.b0s(dj.with(k)), &one());
    z.add_term(jset, &arr.bx(&[O, Star, S(k)], &[O, Star, S(j)], dj), &-one());
    for nu in dj.iter() {
        let r = dj.without(nu);
        let c = arr.bx(&[O, Star, S(k), S(j)], &[O, Star, S(k), S(nu)], r);
        z.add_term(jset.without(nu).with(k), &c, &-one());
    }
    Ok(z.scaled(&pre))
}

/// `γ^j_{·,J}`: `W₀^{(j)}(J)ϖ` reduced to the basis.
pub fn gamma(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    Reducer::new(arr, Some(lam)).reduce(&gamma_raw(arr, lam, j, jset)?)
}

/// `γ̃^j_{·,J}`: `F_J^{(j)} = (λ_j − 1) 𝔐_{f_j^{-1}} F_J` on the basis, assembled as
/// `Σ_{L⊆J} γ^j_{·,L} β̃_{L,J}`.
pub fn gamma_tilde(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    let red = Reducer::new(arr, Some(lam));
    let mut raw = CohomClass::zero(Kind::F);
    for l in jset.subsets().filter(|l| !l.is_empty()) {
        let b = beta_tilde(arr, l, jset)?;
        if b.is_zero() {
            continue;
        }
        raw.add_scaled(&gamma_raw(arr, lam, j, l)?, &b);
    }
    red.reduce(&raw)
}

/// `F_J^{(j)}` by the weight recurrence (`U₀`, `U_∞`, `U_k` assembly), raw.
///
/// Independent of [`gamma_raw`]; shares only the minor layer.
pub struct LoweringRecurrence<'a> {
    arr: &'a Arrangement,
    lam: &'a LambdaPoint,
    memo: HashMap<(usize, IndexSet), CohomClass>,
}

impl<'a> LoweringRecurrence<'a> {
    pub fn new(arr: &'a Arrangement, lam: &'a LambdaPoint) -> Self {
        LoweringRecurrence { arr, lam, memo: HashMap::new() }
    }

    pub fn get(&mut self, j: usize, jset: IndexSet) -> Result<CohomClass> {
        if let Some(v) = self.memo.get(&(j, jset)) {
            return Ok(v.clone());
        }
        let v = self.compute(j, jset)?;
        self.memo.insert((j, jset), v.clone());
        Ok(v)
    }

    fn compute(&mut self, j: usize, jset: IndexSet) -> Result<CohomClass> {
        let arr = self.arr;
        let lam = self.lam;
        let n = arr.n();
        let m = arr.m();
        let p = jset.len();
        if !jset.contains(j) {
            return Ok(CohomClass::single(Kind::F, jset.with(j), lam_minus_one(lam, j)));
        }
        let den = arr.nonzero(arr.b0s(jset), || format!("B(0*{jset}) in the lowering recurrence"))?;
        let mut acc = CohomClass::zero(Kind::F);
        if p == 1 {
            acc.add_term(jset, &-(lam.inf() + int(n as i64 - 2) + lam.get(j)), &one());
            for k in jset.complement(m).iter() {
                let lk = lam.get(k);
                acc.add_term(IndexSet::singleton(k), lk, &-one());
                acc.add_term(jset.with(k), &arr.minor(&[O, Star, S(k)], &[O, Star, S(j)]), &-lk.clone());
            }
            return Ok(acc.scaled(&(one() / den)));
        }
        let dj = jset.without(j);
        let cross = |mu: usize| arr.bx(&[O, Star, S(mu)], &[O, Star, S(j)], dj.without(mu));
        // U₀
        for nu in dj.iter() {
            let t = self.get(nu, dj)?;
            acc.add_scaled(&t, &arr.b0s(dj));
        }
        for mu in dj.iter() {
            let dm = jset.without(mu);
            let c = cross(mu);
            for nu in dm.iter() {
                let t = self.get(nu, dm)?;
                acc.add_scaled(&t, &-c.clone());
            }
        }
        // U_∞
        let u_inf = arr.bx(&[O, S(j)], &[O, Star], dj);
        acc.add_term(jset, &u_inf, &(lam.inf() + int(n as i64 - p as i64 - 1)));
        // U_k for k ∈ J
        for mu in dj.iter() {
            acc.add_term(jset, &-cross(mu), lam.get(mu));
        }
        acc.add_term(jset, &arr.b0s(dj), lam.get(j));
        // U_k for k ∉ J
        for k in jset.complement(m).iter() {
            let lk = lam.get(k);
            acc.add_term(dj.with(k), &arr.b0s(dj), lk);
            for mu in dj.iter() {
                acc.add_term(jset.without(mu).with(k), &-cross(mu), lk);
            }
            acc.add_term(jset.with(k), &-arr.bx(&[O, Star, S(k)], &[O, Star, S(j)], dj), lk);
        }
        Ok(acc.scaled(&(one() / den)))
    }
}

/// `F_J^{(ν)}` for every `ν ∈ J`, obtained by solving the `p × p` linear system that
/// integration by parts against the gradient fields of the `f_h` (`h ∈ J`) produces.
///
/// This route is derived directly from Stokes' theorem and serves as an oracle.
pub struct StokesLowering<'a> {
    arr: &'a Arrangement,
    lam: &'a LambdaPoint,
    memo: HashMap<IndexSet, Vec<(usize, CohomClass)>>,
}

impl<'a> StokesLowering<'a> {
    pub fn new(arr: &'a Arrangement, lam: &'a LambdaPoint) -> Self {
        StokesLowering { arr, lam, memo: HashMap::new() }
    }

    /// `F_J^{(j)}`, raw.
    pub fn get(&mut self, j: usize, jset: IndexSet) -> Result<CohomClass> {
        if !jset.contains(j) {
            return Ok(CohomClass::single(Kind::F, jset.with(j), lam_minus_one(self.lam, j)));
        }
        let all = self.solve(jset)?;
        Ok(all.into_iter().find(|(nu, _)| *nu == j).expect("solved for every element").1)
    }

    fn solve(&mut self, jset: IndexSet) -> Result<Vec<(usize, CohomClass)>> {
        if let Some(v) = self.memo.get(&jset) {
            return Ok(v.clone());
        }
        let arr = self.arr;
        let lam = self.lam;
        let n = arr.n() as i64;
        let p = jset.len() as i64;
        let idx = jset.to_vec();
        // Residual R_h for each h ∈ J.
        let mut rs = Vec::with_capacity(idx.len());
        for &h in &idx {
            let dh = jset.without(h);
            let mut r = CohomClass::zero(Kind::F);
            if !dh.is_empty() {
                for (nu, cls) in self.solve(dh)? {
                    r.add_scaled(&cls, &one());
                    let _ = nu;
                }
            }
            let coef = int(n - p - 1) + lam.inf() + lam.get(h);
            r.add_term(jset, &coef, &one());
            for k in jset.complement(arr.m()).iter() {
                let lk = lam.get(k);
                r.add_term(jset.with(k), &arr.minor(&[O, Star, S(k)], &[O, Star, S(h)]), lk);
                r.add_term(dh.with(k), &one(), lk);
            }
            rs.push(r);
        }
        let mat: Vec<Vec<Scalar>> = idx
            .iter()
            .map(|&h| idx.iter().map(|&nu| arr.minor(&[O, Star, S(nu)], &[O, Star, S(h)])).collect())
            .collect();
        let inv = inverse(&mat).ok_or_else(|| Error::SingularMinor(format!("B(0*{jset}) in the Stokes system")))?;
        let mut out = Vec::with_capacity(idx.len());
        for (a, &nu) in idx.iter().enumerate() {
            let mut x = CohomClass::zero(Kind::F);
            for (b, r) in rs.iter().enumerate() {
                x.add_scaled(r, &-inv[a][b].clone());
            }
            out.push((nu, x));
        }
        self.memo.insert(jset, out.clone());
        Ok(out)
    }
}

/// `F_J^{(j)}` from the weight recurrence, reduced to the basis.
pub fn gamma_tilde_recurrence(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    let raw = LoweringRecurrence::new(arr, lam).get(j, jset)?;
    Reducer::new(arr, Some(lam)).reduce(&raw)
}

/// `F_J^{(j)}` from the Stokes system, reduced to the basis.
pub fn gamma_tilde_stokes(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    let raw = StokesLowering::new(arr, lam).get(j, jset)?;
    Reducer::new(arr, Some(lam)).reduce(&raw)
}

/// Whether every set in the support is adjacent to `J`
/// (`|J − J∩K| ≤ 1` and `|K − J∩K| ≤ 1`).
pub fn is_adjacent_support<C: crate::cohomology::Coeff>(jset: IndexSet, cls: &Class<C>) -> bool {
    cls.keys().all(|k| jset.minus(k).len() <= 1 && k.minus(jset).len() <= 1)
}

// ---------------------------------------------------------------------------
// Positive direction
// ---------------------------------------------------------------------------

/// `𝔐_{f_K} W₀(M)ϖ` for an `(n+1)`-set `M` and `K ⊆ M`, in the `W₀` basis (the empty
/// key is `ϖ`), by recursion on `|K|`. Spheres outside `M` enter through the
/// correction terms `W₀(k ∂_ν M)`.
pub struct Raising<'a> {
    arr: &'a Arrangement,
    lam: &'a LambdaPoint,
    memo: HashMap<(IndexSet, IndexSet), CohomClass>,
}

impl<'a> Raising<'a> {
    pub fn new(arr: &'a Arrangement, lam: &'a LambdaPoint) -> Self {
        Raising { arr, lam, memo: HashMap::new() }
    }

    pub fn get(&mut self, mset: IndexSet, kset: IndexSet) -> Result<CohomClass> {
        if let Some(v) = self.memo.get(&(mset, kset)) {
            return Ok(v.clone());
        }
        let v = self.compute(mset, kset)?;
        self.memo.insert((mset, kset), v.clone());
        Ok(v)
    }

    fn compute(&mut self, mset: IndexSet, kset: IndexSet) -> Result<CohomClass> {
        let arr = self.arr;
        let lam = self.lam;
        let n = arr.n();
        assert!(kset.is_subset(mset) && mset.len() == n + 1);
        let p = kset.len();
        if p == 0 {
            return Ok(CohomClass::w0(mset));
        }
        let c = mset.minus(kset);
        let b0c = arr.nonzero(arr.b0(c), || format!("B(0{c}) in the raising recursion"))?;
        let b0m = arr.b0(mset);
        let den = nonresonant(lam.inf() + int(p as i64 - 1), || format!("λ_∞ + {}", p - 1))?;
        let mut out = CohomClass::zero(Kind::W0);
        for nu in kset.iter() {
            let pre = -arr.bx(&[O, Star], &[O, S(nu)], c) / (&b0c * &den);
            if pre.is_zero() {
                continue;
            }
            let dk = kset.without(nu);
            let inner = self.get(mset, dk)?;
            out.add_scaled(&inner, &(&pre * lam.get(nu)));
            let dm = mset.without(nu);
            for k in mset.complement(arr.m()).iter() {
                let km = dm.with(k);
                let d = arr.nonzero(arr.b0(km), || format!("B(0{km}) in the raising recursion"))?;
                let w = arr.bx(&[O, S(nu)], &[O, S(k)], dm) / d * lam.get(k) * &pre;
                if w.is_zero() {
                    continue;
                }
                let inner = self.get(km, dk)?;
                out.add_scaled(&inner, &w);
            }
        }
        out.add_term(c, &(&b0m / &b0c), &one());
        if p == n {
            let sign = if n % 2 == 0 { one() } else { -one() };
            out.add_term(IndexSet::EMPTY, &b0m, &sign);
        }
        Ok(out)
    }
}

/// `𝔐_{f_J}(W₀(N)ϖ)` with `N = {1..n+1}` and `J ⊆ N`.
pub fn mult_fj_w0(arr: &Arrangement, lam: &LambdaPoint, jset: IndexSet) -> Result<CohomClass> {
    let nset = IndexSet::range(arr.n() + 1);
    if arr.m() < arr.n() + 1 || !jset.is_subset(nset) {
        return Err(Error::Invalid(format!("{jset} must lie in {nset}")));
    }
    Raising::new(arr, lam).get(nset, jset)
}

/// The ordered-chain closed form of `𝔐_{f_J}(W₀(N)ϖ)` for `m = n+1`; an oracle for
/// [`Raising`].
pub fn mult_fj_w0_chain(arr: &Arrangement, lam: &LambdaPoint, jset: IndexSet) -> Result<CohomClass> {
    let n = arr.n();
    let nset = IndexSet::range(n + 1);
    if arr.m() != n + 1 || !jset.is_subset(nset) {
        return Err(Error::Invalid("the chain form needs m = n+1 and J ⊆ N".into()));
    }
    let p = jset.len();
    let c = nset.minus(jset);
    let b0c = arr.nonzero(arr.b0(c), || format!("B(0{c}) in the chain form"))?;
    let lead = arr.b0(nset) / b0c;
    let mut out = CohomClass::zero(Kind::W0);
    if p == n {
        let sign = if n % 2 == 0 { one() } else { -one() };
        out.add_term(IndexSet::EMPTY, &arr.b0(nset), &sign);
    }
    for q in 0..=p {
        let mut den = one();
        for v in 1..=q {
            den *= nonresonant(lam.inf() + int(p as i64 - v as i64), || format!("λ_∞ + {}", p - v))?;
        }
        let sign = if q % 2 == 0 { one() } else { -one() };
        for order in crate::indices::ordered_subsets(jset, q) {
            let mut coef = &sign * &lead / &den;
            let mut prefix = c;
            for &mu in &order {
                let num = arr.bx(&[O, Star], &[O, S(mu)], prefix);
                prefix = prefix.with(mu);
                let d = arr.nonzero(arr.b0(prefix), || format!("B(0{prefix}) in the chain form"))?;
                coef = coef * num / d * lam.get(mu);
            }
            out.add_term(prefix, &coef, &one());
        }
    }
    Ok(out)
}

/// `𝔐_{f_j} F_J` on the basis.
pub fn mult_fj(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    let n = arr.n();
    let m = arr.m();
    let red = Reducer::new(arr, Some(lam));
    if jset.contains(j) {
        return red.reduce(&CohomClass::f(jset.without(j)));
    }
    if m < n + 1 {
        return mult_fj_inverse(arr, lam, j, jset);
    }
    let p = jset.len();
    if p == n + 1 {
        // f_j F_J = F_J · (B(0⋆J') − Σ_{ν∈J} c_ν f_ν) / c_j with J' = J ∪ {j}.
        let big = jset.with(j);
        let cj = arr.bx(&[O, Star], &[O, S(j)], jset);
        let cj = arr.nonzero(cj, || format!("B(0*{jset}/0{j}{jset}) in a partial-fraction expansion"))?;
        let mut raw = CohomClass::zero(Kind::F);
        raw.add_term(jset, &(arr.b0s(big) / &cj), &one());
        for nu in jset.iter() {
            let d = jset.without(nu);
            let c = arr.bx(&[O, Star], &[O, S(nu)], big.without(nu)) / &cj;
            raw.add_term(d, &c, &-one());
        }
        return red.reduce(&raw);
    }
    let b0j = arr.nonzero(arr.b0(jset), || format!("B(0{jset}) in the raising relation"))?;
    // N' = J ∪ {j} padded with the smallest remaining indices.
    let mut np = jset.with(j);
    for k in 1..=m {
        if np.len() == n + 1 {
            break;
        }
        np = np.with(k);
    }
    let b0n = arr.nonzero(arr.b0(np), || format!("B(0{np}) in the raising relation"))?;
    let den = nonresonant(lam.inf() + int(n as i64 - p as i64), || format!("λ_∞ + n - {p}"))?;
    let mut rec = Raising::new(arr, lam);
    let mut w = CohomClass::zero(Kind::W0);
    let rest = np.minus(jset);
    for nu in rest.iter() {
        let pre = arr.bx(&[O, S(nu)], &[O, S(j)], jset) / (&b0n * &b0j * &den);
        if pre.is_zero() {
            continue;
        }
        let target = rest.without(nu);
        w.add_scaled(&rec.get(np, target)?, &(&pre * lam.get(nu)));
        let dn = np.without(nu);
        for k in np.complement(m).iter() {
            let kn = dn.with(k);
            let d = arr.nonzero(arr.b0(kn), || format!("B(0{kn}) in the raising relation"))?;
            let c = arr.bx(&[O, S(nu)], &[O, S(k)], dn) / d * lam.get(k) * &pre;
            if c.is_zero() {
                continue;
            }
            w.add_scaled(&rec.get(kn, target)?, &c);
        }
    }
    let mut out = red.reduce(&w)?;
    let mut f = CohomClass::zero(Kind::F);
    f.add_term(jset, &(arr.bx(&[O, Star], &[O, S(j)], jset) / &b0j), &-one());
    for nu in jset.iter() {
        let d = jset.without(nu);
        f.add_term(d, &(arr.bx(&[O, S(nu)], &[O, S(j)], d) / &b0j), &one());
    }
    out.add_scaled(&red.reduce(&f)?, &one());
    Ok(out)
}

/// Matrix of `F_K^{(j)}` over the basis at `λ`: entry `[row][col]` is the coefficient of
/// `basis[row]` in `F_{basis[col]}^{(j)}`.
pub fn lowering_matrix(arr: &Arrangement, lam: &LambdaPoint, j: usize) -> Result<Vec<Vec<Scalar>>> {
    let basis = crate::indices::basis(arr.m(), arr.n());
    let cols: Vec<CohomClass> =
        basis.iter().map(|&l| gamma_tilde(arr, lam, j, l)).collect::<Result<_>>()?;
    Ok(basis.iter().map(|&k| cols.iter().map(|c| c.get(k)).collect()).collect())
}

/// Matrix of `𝔐_{f_j}` over the basis at `λ`, built from the relation
/// `𝔐_{f_j}(λ) = λ_j · G(λ+ε_j)^{-1}` with `G` the lowering matrix.
pub fn raising_matrix_by_inversion(arr: &Arrangement, lam: &LambdaPoint, j: usize) -> Result<Vec<Vec<Scalar>>> {
    let lj = nonresonant(lam.get(j).clone(), || format!("λ_{j}"))?;
    let g = lowering_matrix(arr, &lam.shift(j, 1), j)?;
    let inv = inverse(&g).ok_or_else(|| Error::ResonantDenominator(format!("the lowering matrix in direction {j} is singular")))?;
    Ok(inv.into_iter().map(|r| r.into_iter().map(|x| x * &lj).collect()).collect())
}

/// `𝔐_{f_j} F_J` via [`raising_matrix_by_inversion`].
pub fn mult_fj_inverse(arr: &Arrangement, lam: &LambdaPoint, j: usize, jset: IndexSet) -> Result<CohomClass> {
    let basis = crate::indices::basis(arr.m(), arr.n());
    let c = raising_matrix_by_inversion(arr, lam, j)?;
    let fj = Reducer::new(arr, Some(lam)).reduce(&CohomClass::f(jset))?;
    let mut out = CohomClass::zero(Kind::F);
    for (col, &l) in basis.iter().enumerate() {
        let w = fj.get(l);
        if w.is_zero() {
            continue;
        }
        for (row, &k) in basis.iter().enumerate() {
            out.add_term(k, &c[row][col], &w);
        }
    }
    Ok(out)
}

/// `𝔐_{f_j − f_k} F_k` in the `W₀` basis over ordered chains ending in `k`.
pub fn mult_diff(arr: &Arrangement, lam: &LambdaPoint, j: usize, k: usize) -> Result<CohomClass> {
    if j == k {
        return Err(Error::Invalid("the difference needs two distinct spheres".into()));
    }
    let n = arr.n();
    let ks = IndexSet::singleton(k);
    let mut out = CohomClass::zero(Kind::W0);
    let b0sk = arr.nonzero(arr.b0s(ks), || format!("B(0*{k})"))?;
    out.add_term(ks, &(arr.minor(&[O, S(j), S(k)], &[O, Star, S(k)]) / b0sk), &one());
    let pool = ks.complement(arr.m());
    let mut den = one();
    for q in 1..=n.min(pool.len()) {
        den *= nonresonant(lam.inf() + int(n as i64 - q as i64), || format!("λ_∞ + n - {q}"))?;
        let sign = if q % 2 == 0 { one() } else { -one() };
        for order in crate::indices::ordered_subsets(pool, q) {
            let k1 = order[0];
            let mut prefix = ks.with(k1);
            let d = arr.nonzero(arr.b0(prefix), || format!("B(0{prefix})"))?;
            let mut coef = &sign / &den * arr.minor(&[O, S(j), S(k)], &[O, S(k1), S(k)]) / d * lam.get(k1);
            for &ks_ in &order[1..] {
                let num = arr.bx(&[O, Star], &[O, S(ks_)], prefix);
                prefix = prefix.with(ks_);
                let d = arr.nonzero(arr.b0(prefix), || format!("B(0{prefix})"))?;
                coef = coef * num / d * lam.get(ks_);
            }
            out.add_term(prefix, &coef, &one());
        }
    }
    Ok(out)
}

/// The chain sum `η_J` over `J ⊆ {1..n+1}` that collapses the standard-form
/// derivation; it equals 1 identically, which the tests check exactly.
pub fn eta(arr: &Arrangement, jset: IndexSet) -> Result<Scalar> {
    let h = arr.n() + 1;
    if jset.is_empty() || !jset.is_subset(IndexSet::range(h)) {
        return Err(Error::Invalid(format!("{jset} must be a nonempty subset of {{1..{h}}}")));
    }
    if jset.len() == 1 {
        let j = jset.min().unwrap();
        let d = arr.nonzero(arr.b0s(jset), || format!("B(0*{j})"))?;
        let num = arr.minor(&[O, S(h), S(j)], &[O, Star, S(j)]) + arr.minor(&[O, Star, S(j)], &[O, Star, S(h)]);
        return Ok(num / d);
    }
    let mut total = Scalar::zero();
    for j in jset.iter() {
        let rest = jset.without(j);
        for order in crate::indices::ordered_subsets(rest, rest.len()) {
            let mu1 = order[0];
            let mut prefix = IndexSet::from_slice(&[mu1, j]);
            let d = arr.nonzero(arr.b0(prefix), || format!("B(0{prefix})"))?;
            let mut term = arr.minor(&[O, S(h), S(j)], &[O, S(mu1), S(j)]) / d;
            for &mu in &order[1..] {
                let num = arr.bx(&[O, Star], &[O, S(mu)], prefix);
                prefix = prefix.with(mu);
                let d = arr.nonzero(arr.b0(prefix), || format!("B(0{prefix})"))?;
                term = term * num / d;
            }
            total += term;
        }
    }
    Ok(total)
}
