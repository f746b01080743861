//! Formal plane waves: the braided momentum algebra for `Z = 0`, the `U`-matrix route for
//! `R = τ`, and the numeric dispersion relation, propagator and Dirac dispersion.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, MatrixFunctionMethod};
use crate::matrix::Matrix;
use crate::ncalgebra::{binomial, NCPoly, NormalFormEngine, Word};
use crate::operators::{box_op, GammaSet};
use crate::report::{Check, Report};
use crate::scalar::Scalar;
use crate::structures::{StructureData, StructureParts};

/// Element of `𝒞 ⊗ ℱ` as `(x-word, p-word) → coefficient`, both words in normal form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElement {
    terms: BTreeMap<(Word, Word), Scalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement::default()
    }

    pub fn one() -> Self {
        TensorElement::outer(&NCPoly::one(), &NCPoly::one())
    }

    /// `x ⊗ p`
    pub fn outer(x: &NCPoly, p: &NCPoly) -> Self {
        let mut t = TensorElement::zero();
        t.add_outer(&Scalar::one(), x, p);
        t
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, x: &Word, p: &Word) -> Scalar {
        self.terms.get(&(x.clone(), p.clone())).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, x: Word, p: Word, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (x, p);
        let now_zero = {
            let e = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
            *e += c;
            e.is_zero()
        };
        if now_zero {
            self.terms.remove(&key);
        }
    }

    /// `self += c · (x ⊗ p)`
    pub fn add_outer(&mut self, c: &Scalar, x: &NCPoly, p: &NCPoly) {
        for (xw, xc) in x.terms() {
            let cx = c * xc;
            for (pw, pc) in p.terms() {
                self.add_term(xw.clone(), pw.clone(), &(&cx * pc));
            }
        }
    }

    pub fn axpy(&mut self, c: &Scalar, other: &TensorElement) {
        for ((x, p), v) in &other.terms {
            self.add_term(x.clone(), p.clone(), &(c * v));
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.axpy(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        out.axpy(&Scalar::from_int(-1), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        let mut out = TensorElement::zero();
        out.axpy(c, self);
        out
    }

    /// `(a⊗b)(c⊗d) = ac ⊗ bd`, each factor reduced by its own engine.
    pub fn mul(&self, rhs: &TensorElement, ex: &NormalFormEngine, ep: &NormalFormEngine) -> Result<TensorElement> {
        let mut xcache: BTreeMap<(Word, Word), NCPoly> = BTreeMap::new();
        let mut pcache: BTreeMap<(Word, Word), NCPoly> = BTreeMap::new();
        let mut out = TensorElement::zero();
        for ((xa, pa), ca) in &self.terms {
            for ((xb, pb), cb) in &rhs.terms {
                let xk = (xa.clone(), xb.clone());
                if !xcache.contains_key(&xk) {
                    let v = ex.normal_form(&NCPoly::word(xa.concat(xb)))?;
                    xcache.insert(xk.clone(), v);
                }
                let pk = (pa.clone(), pb.clone());
                if !pcache.contains_key(&pk) {
                    let v = ep.normal_form(&NCPoly::word(pa.concat(pb)))?;
                    pcache.insert(pk.clone(), v);
                }
                out.add_outer(&(ca * cb), &xcache[&xk], &pcache[&pk]);
            }
        }
        Ok(out)
    }

    /// Apply a linear map to the `𝒞` factor.
    pub fn map_x(&self, mut f: impl FnMut(&NCPoly) -> Result<NCPoly>) -> Result<TensorElement> {
        let mut cache: BTreeMap<Word, NCPoly> = BTreeMap::new();
        let mut out = TensorElement::zero();
        for ((x, p), c) in &self.terms {
            if !cache.contains_key(x) {
                cache.insert(x.clone(), f(&NCPoly::word(x.clone()))?);
            }
            out.add_outer(c, &cache[x], &NCPoly::word(p.clone()));
        }
        Ok(out)
    }

    /// First term where `self` and `other` differ, for failure witnesses.
    pub fn first_difference(&self, other: &TensorElement) -> Option<String> {
        let diff = self.sub(other);
        diff.terms.iter().next().map(|((x, p), c)| format!("{x:?} ⊗ {p:?} residual {c}"))
    }
}

/// The braided momentum algebra `ℱ`: generators `p^0..p^{N-1}` with
/// `p^k p^l = R^{lk}_{ji} p^i p^j`.
#[derive(Clone, Debug)]
pub struct MomentumAlgebra {
    engine: NormalFormEngine,
    g_lower: Matrix,
    n: usize,
}

impl MomentumAlgebra {
    pub fn new(sd: &StructureData, cutoff: usize) -> Result<Self> {
        let n = sd.n();
        let nn = n * n;
        let mut r = Matrix::zeros(nn, nn);
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        r[(k * n + l, i * n + j)] = sd.r(l, k, j, i).clone();
                    }
                }
            }
        }
        let flipped = StructureData::new(StructureParts {
            n,
            r,
            z: Matrix::zeros(nn, n),
            t: vec![Scalar::zero(); nn],
            g: sd.g_matrix().clone(),
            gammas: None,
            f_tilde: None,
            degree_cutoff: Some(cutoff),
            star: Some(false),
        })?;
        let engine = NormalFormEngine::build_with_cutoff(&flipped, cutoff)?;
        let g_lower = sd.g_inv_matrix().clone();
        Ok(MomentumAlgebra { engine, g_lower, n })
    }

    pub fn engine(&self) -> &NormalFormEngine {
        &self.engine
    }

    /// `p^b`
    pub fn upper(&self, b: usize) -> NCPoly {
        NCPoly::generator(b)
    }

    /// `p_a = g_{ab} p^b`
    pub fn lower(&self, a: usize) -> NCPoly {
        let mut p = NCPoly::zero();
        for b in 0..self.n {
            p.add_term(Word::letter(b), &self.g_lower[(a, b)]);
        }
        p
    }

    /// `s = p_i p^i`
    pub fn s(&self) -> Result<NCPoly> {
        let mut s = NCPoly::zero();
        for i in 0..self.n {
            s = s.add(&self.engine.multiply(&self.lower(i), &self.upper(i))?);
        }
        Ok(s)
    }

    /// `s p^k = p^k s` for every `k`.
    pub fn check_central(&self) -> Result<core::result::Result<(), String>> {
        let s = self.s()?;
        for k in 0..self.n {
            let pk = self.upper(k);
            let c = self.engine.multiply(&s, &pk)?.sub(&self.engine.multiply(&pk, &s)?);
            if !c.is_zero() {
                return Ok(Err(format!("k={k}: s p^k - p^k s = {c}")));
            }
        }
        Ok(Ok(()))
    }
}

/// `x ⊗ p = Σ_a x^a ⊗ p_a`
pub fn x_dot_p(lower: impl Fn(usize) -> NCPoly, n: usize) -> TensorElement {
    let mut t = TensorElement::zero();
    for a in 0..n {
        t.add_outer(&Scalar::one(), &NCPoly::generator(a), &lower(a));
    }
    t
}

fn powers(x: &TensorElement, n_max: usize, ex: &NormalFormEngine, ep: &NormalFormEngine) -> Result<Vec<TensorElement>> {
    let mut out = vec![TensorElement::one()];
    for k in 1..=n_max {
        out.push(out[k - 1].mul(x, ex, ep)?);
    }
    Ok(out)
}

/// Partials of every distinct `x`-word, cached.
fn partial_map(calc: &Calculus, t: &TensorElement) -> Result<Vec<TensorElement>> {
    let n = calc.n();
    let mut out = vec![TensorElement::zero(); n];
    let mut cache: BTreeMap<Word, Vec<NCPoly>> = BTreeMap::new();
    for ((x, p), c) in t.terms() {
        if !cache.contains_key(x) {
            cache.insert(x.clone(), calc.partials(&NCPoly::word(x.clone()))?);
        }
        let pw = NCPoly::word(p.clone());
        for (j, dj) in cache[x].iter().enumerate() {
            out[j].add_outer(c, dj, &pw);
        }
    }
    Ok(out)
}

/// For `Z = 0`, checks `(∂_j⊗id)(x⊗p)^n = n(1⊗p_j)(x⊗p)^{n-1}`,
/// `(□⊗id)(x⊗p)^n = n(n-1)(1⊗s)(x⊗p)^{n-2}` and centrality of `s`, for `1 ≤ n ≤ n_max`.
pub fn verify_z0_series(calc: &Calculus, n_max: usize) -> Result<Report> {
    let sd = calc.structure();
    if !sd.z_is_zero() {
        return Err(Error::ZNonzero);
    }
    let d = calc.engine().cutoff();
    if 2 * n_max > d {
        return Err(Error::CutoffExceeded { degree: 2 * n_max, cutoff: d });
    }
    let n = sd.n();
    let f = MomentumAlgebra::new(sd, n_max.max(3))?;
    let ex = calc.engine();
    let ep = f.engine();
    let mut report = Report::new();
    report.push(Check::from_result("s = p_i p^i is central in ℱ", f.check_central()?));

    let x = x_dot_p(|a| f.lower(a), n);
    let pw = powers(&x, n_max, ex, ep)?;
    let s = TensorElement::outer(&NCPoly::one(), &f.s()?);
    for k in 1..=n_max {
        let lhs = partial_map(calc, &pw[k])?;
        let mut res = Ok(());
        for (j, l) in lhs.iter().enumerate() {
            let pj = TensorElement::outer(&NCPoly::one(), &f.lower(j));
            let rhs = pj.mul(&pw[k - 1], ex, ep)?.scale(&Scalar::from_int(k as i64));
            if let Some(w) = l.first_difference(&rhs) {
                res = Err(format!("j={j}: {w}"));
                break;
            }
        }
        report.push(Check::from_result(format!("(∂_j⊗id)(x⊗p)^{k} = {k}(1⊗p_j)(x⊗p)^{}", k - 1), res));

        let lhs = pw[k].map_x(|a| box_op(calc, a))?;
        let rhs = if k >= 2 {
            s.mul(&pw[k - 2], ex, ep)?.scale(&Scalar::from_int((k * (k - 1)) as i64))
        } else {
            TensorElement::zero()
        };
        let res = match lhs.first_difference(&rhs) {
            Some(w) => Err(w),
            None => Ok(()),
        };
        report.push(Check::from_result(
            format!("(□⊗id)(x⊗p)^{k} = {}(1⊗s)(x⊗p)^{}", k * k.saturating_sub(1), k.saturating_sub(2)),
            res,
        ));
    }
    Ok(report)
}

/// `U_i^l = Z^{kl}_i p_k` with `p_k` commuting indeterminates (letters of the momentum ring).
pub fn u_matrix_symbolic(sd: &StructureData) -> Vec<Vec<NCPoly>> {
    let n = sd.n();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|l| {
                    let mut u = NCPoly::zero();
                    for k in 0..n {
                        u.add_term(Word::letter(k), sd.z(k, l, i));
                    }
                    u
                })
                .collect()
        })
        .collect()
}

/// Polynomial ring in commuting letters `p_0..p_{n-1}`.
pub fn commutative_engine(n: usize, cutoff: usize) -> Result<NormalFormEngine> {
    let mut rels = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            rels.push(NCPoly::word(Word::from_indices(&[j, i])).sub(&NCPoly::word(Word::from_indices(&[i, j]))));
        }
    }
    NormalFormEngine::from_relations(n, cutoff.max(2), rels)
}

/// For `R = τ`, checks `∂_j(x·p)^n = Σ_k C(n,k)(U^{k-1})_j^b p_b (x·p)^{n-k}` against the
/// calculus for `1 ≤ n ≤ n_max`, with commuting lower momenta.
pub fn verify_u_algebra(calc: &Calculus, n_max: usize) -> Result<Report> {
    let sd = calc.structure();
    if !sd.is_r_tau() {
        return Err(Error::NotRTau);
    }
    let d = calc.engine().cutoff();
    if n_max > d {
        return Err(Error::CutoffExceeded { degree: n_max, cutoff: d });
    }
    let n = sd.n();
    let ex = calc.engine();
    let ep = commutative_engine(n, n_max)?;
    let x = x_dot_p(NCPoly::generator, n);
    let pw = powers(&x, n_max, ex, &ep)?;
    let u = u_matrix_symbolic(sd);

    // v[k-1] = U^{k-1} p
    let mut v: Vec<Vec<NCPoly>> = vec![(0..n).map(NCPoly::generator).collect()];
    for k in 1..n_max {
        let prev = &v[k - 1];
        let mut next = Vec::with_capacity(n);
        for row in &u {
            let mut acc = NCPoly::zero();
            for (ub, pb) in row.iter().zip(prev) {
                acc = acc.add(&ep.multiply(ub, pb)?);
            }
            next.push(acc);
        }
        v.push(next);
    }

    let mut report = Report::new();
    for m in 1..=n_max {
        let lhs = partial_map(calc, &pw[m])?;
        let mut res = Ok(());
        for (j, l) in lhs.iter().enumerate() {
            let mut rhs = TensorElement::zero();
            for k in 1..=m {
                let coef = TensorElement::outer(&NCPoly::one(), &v[k - 1][j]);
                rhs.axpy(&Scalar::from_int(binomial(m, k) as i64), &coef.mul(&pw[m - k], ex, &ep)?);
            }
            if let Some(w) = l.first_difference(&rhs) {
                res = Err(format!("j={j}: {w}"));
                break;
            }
        }
        report.push(Check::from_result(format!("∂_j(x·p)^{m} = Σ_k C({m},k)(U^(k-1) p)_j (x·p)^({m}-k)"), res));
    }
    Ok(report)
}

/// Relative imaginary residual tolerated in `m²`.
pub const REALITY_TOLERANCE: f64 = 1e-10;
/// `|m² - M²|` below which the propagator reports a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Numeric data for the `R = τ` dispersion relation.
#[derive(Clone, Debug)]
pub struct DispersionModel {
    n: usize,
    g: CMatrix,
    /// `Z^{kl}_i` at `(k·N + l)·N + i`.
    z: Vec<C64>,
    mass: f64,
    method: MatrixFunctionMethod,
}

impl DispersionModel {
    pub fn new(sd: &StructureData, mass: f64) -> Result<Self> {
        if !sd.is_r_tau() {
            return Err(Error::NotRTau);
        }
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::InvalidArgument(format!("mass must be finite and nonnegative, got {mass}")));
        }
        let n = sd.n();
        let g = CMatrix::from_fn(n, |a, b| sd.g(a, b).to_complex());
        let mut z = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    z.push(sd.z(k, l, i).to_complex());
                }
            }
        }
        Ok(DispersionModel { n, g, z, mass, method: MatrixFunctionMethod::Auto })
    }

    pub fn with_method(mut self, method: MatrixFunctionMethod) -> Self {
        self.method = method;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::Shape(format!("momentum has {} components, expected {}", p.len(), self.n)));
        }
        Ok(())
    }

    /// `U_i^l = Z^{kl}_i p_k`
    pub fn u_matrix(&self, p: &[f64]) -> Result<CMatrix> {
        self.check_len(p)?;
        let n = self.n;
        Ok(CMatrix::from_fn(n, |i, l| (0..n).map(|k| self.z[(k * n + l) * n + i] * p[k]).sum()))
    }

    /// `g^{as} h(-iU)_s^b p_a p_b` without the reality check.
    pub fn mass_squared_complex(&self, p: &[f64]) -> Result<C64> {
        let x = self.u_matrix(p)?.scale(C64::new(0.0, -1.0));
        let h = linalg::matrix_h_with(&x, self.method);
        let gh = self.g.mul(&h);
        let n = self.n;
        let mut m2 = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                m2 += gh[(a, b)] * p[a] * p[b];
            }
        }
        Ok(m2)
    }

    pub fn mass_squared(&self, p: &[f64]) -> Result<f64> {
        real_part(self.mass_squared_complex(p)?)
    }

    /// `i / (m²(p) - M²)`
    pub fn propagator(&self, p: &[f64]) -> Result<C64> {
        let gap = self.mass_squared(p)? - self.mass * self.mass;
        if gap.abs() < POLE_TOLERANCE {
            return Err(Error::OnShellPole { gap });
        }
        Ok(C64::new(0.0, 1.0 / gap))
    }
}

fn real_part(m2: C64) -> Result<f64> {
    if m2.im.abs() / (1.0 + m2.norm()) >= REALITY_TOLERANCE {
        return Err(Error::NonrealMass { re: m2.re, im: m2.im });
    }
    Ok(m2.re)
}

/// Result of [`dirac_dispersion`].
#[derive(Clone, Debug)]
pub struct DiracDispersion {
    /// `𝒫_j = ρ(-iU)_j^b p_b`
    pub cal_p: Vec<C64>,
    /// `g^{js} 𝒫_j 𝒫_s`
    pub mass_squared: f64,
    /// Principal square root of `mass_squared`; imaginary for spacelike momenta.
    pub mass: C64,
    /// Orthonormal bases of the `+m` and `-m` eigenspaces of `𝒫̸`; both empty when `m = 0`.
    pub plus: Vec<Vec<C64>>,
    pub minus: Vec<Vec<C64>>,
}

/// `𝒫̸ = 𝒫_j γ^j` with `𝒫̸² = m²·1`, split into its `±m` eigenspaces.
pub fn dirac_dispersion(model: &DispersionModel, gs: &GammaSet, p: &[f64]) -> Result<DiracDispersion> {
    let n = model.n;
    if gs.len() != n {
        return Err(Error::Shape(format!("{} gamma matrices, expected {n}", gs.len())));
    }
    let x = model.u_matrix(p)?.scale(C64::new(0.0, -1.0));
    let rho = linalg::matrix_rho_with(&x, model.method);
    let cal_p: Vec<C64> = (0..n).map(|j| (0..n).map(|b| rho[(j, b)] * p[b]).sum()).collect();
    let mut m2 = C64::new(0.0, 0.0);
    for j in 0..n {
        for s in 0..n {
            m2 += model.g[(j, s)] * cal_p[j] * cal_p[s];
        }
    }
    let mass_squared = real_part(m2)?;

    let d = gs.dim();
    let mut slash = CMatrix::zeros(d);
    for (j, pj) in cal_p.iter().enumerate() {
        let gm = gs.gamma(j);
        slash = slash.add(&CMatrix::from_fn(d, |r, c| gm[(r, c)].to_complex() * pj));
    }
    let sq = slash.mul(&slash);
    let resid = sq.max_abs_diff(&CMatrix::identity(d).scale(C64::new(mass_squared, 0.0)));
    if resid > REALITY_TOLERANCE * (1.0 + mass_squared.abs()) {
        return Err(Error::GammaMismatch(format!("𝒫̸² - m²·1 has entry of size {resid:e}")));
    }

    let mass = C64::new(mass_squared, 0.0).sqrt();
    let (plus, minus) = if mass.norm() <= REALITY_TOLERANCE {
        (Vec::new(), Vec::new())
    } else {
        let half = C64::new(0.5, 0.0);
        let scaled = slash.scale(half / mass);
        let id = CMatrix::identity(d).scale(half);
        (column_basis(&id.add(&scaled)), column_basis(&id.sub(&scaled)))
    };
    Ok(DiracDispersion { cal_p, mass_squared, mass, plus, minus })
}

/// Orthonormal basis of the column space by modified Gram–Schmidt.
fn column_basis(m: &CMatrix) -> Vec<Vec<C64>> {
    let d = m.dim();
    let tol = 1e-8 * m.max_abs().max(1.0);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for c in 0..d {
        let mut v: Vec<C64> = (0..d).map(|r| m[(r, c)]).collect();
        for b in &basis {
            let dot: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > tol {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::make_classical_gammas;
    use crate::structures::presets::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn calc(sd: &StructureData) -> Calculus {
        Calculus::new(sd).unwrap()
    }

    #[test]
    fn z0_series_classical() {
        let c = calc(&classical_minkowski(6));
        let rep = verify_z0_series(&c, 3).unwrap();
        assert!(rep.all_passed(), "{rep}");
        assert_eq!(rep.checks.len(), 7);
    }

    #[test]
    fn z0_series_preconditions() {
        let c = calc(&epsilon(Scalar::from_ratio(1, 2), 4));
        assert_eq!(verify_z0_series(&c, 1).unwrap_err(), Error::ZNonzero);
        let c = calc(&classical_minkowski(4));
        assert!(matches!(verify_z0_series(&c, 3), Err(Error::CutoffExceeded { .. })));
    }

    #[test]
    fn z0_first_power_is_trivial() {
        let sd = classical_minkowski(4);
        let c = calc(&sd);
        let f = MomentumAlgebra::new(&sd, 3).unwrap();
        let x = x_dot_p(|a| f.lower(a), 4);
        let d = partial_map(&c, &x).unwrap();
        for (j, dj) in d.iter().enumerate() {
            assert_eq!(dj, &TensorElement::outer(&NCPoly::one(), &f.lower(j)));
        }
    }

    #[test]
    fn momentum_algebra_of_classical_is_commutative() {
        let sd = classical_minkowski(4);
        let f = MomentumAlgebra::new(&sd, 3).unwrap();
        assert_eq!(f.engine().quotient_dims()[..4], [1, 4, 10, 20]);
        assert!(f.check_central().unwrap().is_ok());
        // s = p0² - p1² - p2² - p3²
        let s = f.s().unwrap();
        assert_eq!(s.coeff(&Word::from_indices(&[0, 0])), Scalar::one());
        assert_eq!(s.coeff(&Word::from_indices(&[3, 3])), Scalar::from_int(-1));
    }

    #[test]
    fn u_algebra_lattice_square() {
        let l = Scalar::from_ratio(1, 3);
        let sd = lattice(l.clone(), 4);
        let c = calc(&sd);
        // ∂(xp)² = (2x + l) p²
        let ep = commutative_engine(1, 2).unwrap();
        let x = x_dot_p(NCPoly::generator, 1);
        let sq = x.mul(&x, c.engine(), &ep).unwrap();
        let d = partial_map(&c, &sq).unwrap();
        let p2 = NCPoly::word(Word::from_indices(&[0, 0]));
        let mut want = TensorElement::outer(&NCPoly::generator(0), &p2).scale(&Scalar::from_int(2));
        want.add_outer(&l, &NCPoly::one(), &p2);
        assert_eq!(d[0], want);
        let rep = verify_u_algebra(&c, 4).unwrap();
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn u_algebra_fixtures() {
        for sd in [classical_minkowski(4), epsilon(Scalar::from_ratio(1, 2), 4), n2twist(Scalar::from_parts((0, 1), (1, 2)), 5)] {
            let rep = verify_u_algebra(&calc(&sd), 4).unwrap();
            assert!(rep.all_passed(), "{rep}");
        }
    }

    #[test]
    fn u_algebra_requires_flip() {
        let r = calc(&n2twist(Scalar::one(), 3)).structure().to_parts();
        let mut parts = r;
        parts.r = Matrix::identity(4).scale(&Scalar::from_int(-1));
        parts.z = Matrix::zeros(4, 2);
        let sd = StructureData::new(parts).unwrap();
        let c = calc(&sd);
        assert_eq!(verify_u_algebra(&c, 2).unwrap_err(), Error::NotRTau);
    }

    #[test]
    fn classical_dispersion() {
        let m = DispersionModel::new(&classical_minkowski(2), 0.0).unwrap();
        let p = [1.5, 0.25, -0.5, 2.0];
        let want = 1.5f64 * 1.5 - 0.0625 - 0.25 - 4.0;
        assert!((m.mass_squared(&p).unwrap() - want).abs() < 1e-14);
        assert_eq!(m.propagator(&[1.0, 0.0, 0.0, 0.0]).unwrap(), C64::new(0.0, 1.0));
        assert!(matches!(m.propagator(&[1.0, 1.0, 0.0, 0.0]), Err(Error::OnShellPole { .. })));
        let m = DispersionModel::new(&classical_minkowski(2), 1.0).unwrap();
        assert!(matches!(m.propagator(&[1.0, 0.0, 0.0, 0.0]), Err(Error::OnShellPole { .. })));
    }

    #[test]
    fn lattice_dispersion_factor() {
        let l = 0.4;
        let m = DispersionModel::new(&lattice(Scalar::from_ratio(2, 5), 2), 0.0).unwrap();
        for p in [-3.0, -0.1, 0.02, 1.0, 7.5] {
            let k = l * p / 2.0;
            let want = (k.sin() / k).powi(2) * p * p;
            assert!((m.mass_squared(&[p]).unwrap() - want).abs() < 1e-12 * (1.0 + want));
        }
    }

    fn eps_closed_form(eps: f64, p: &[f64]) -> f64 {
        let u = eps * p[1] / 4.0;
        let f = if u == 0.0 { 1.0 } else { (u.sinh() / u).powi(2) };
        (p[0] * p[0] - p[3] * p[3]) * f - p[1] * p[1] - p[2] * p[2]
    }

    #[test]
    fn epsilon_dispersion_matches_closed_form() {
        let sd = epsilon(Scalar::from_ratio(1, 2), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for method in [MatrixFunctionMethod::Auto, MatrixFunctionMethod::Series] {
            let m = DispersionModel::new(&sd, 0.0).unwrap().with_method(method);
            for _ in 0..50 {
                let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let got = m.mass_squared(&p).unwrap();
                let want = eps_closed_form(0.5, &p);
                assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "{p:?}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn dirac_route_agrees_on_epsilon() {
        let sd = epsilon(Scalar::from_ratio(1, 2), 2);
        let gs = make_classical_gammas(&sd).unwrap();
        let m = DispersionModel::new(&sd, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let p: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let dd = dirac_dispersion(&m, &gs, &p).unwrap();
            let m2 = m.mass_squared(&p).unwrap();
            assert!((dd.mass_squared - m2).abs() < 1e-10 * (1.0 + m2.abs()));
            assert_eq!(dd.plus.len(), 2);
            assert_eq!(dd.minus.len(), 2);
        }
    }

    #[test]
    fn classical_dirac_dispersion() {
        let sd = classical_minkowski(2);
        let gs = make_classical_gammas(&sd).unwrap();
        let m = DispersionModel::new(&sd, 0.0).unwrap();
        let p = [2.0, 0.5, -1.0, 0.25];
        let dd = dirac_dispersion(&m, &gs, &p).unwrap();
        for (a, b) in dd.cal_p.iter().zip(&p) {
            assert!((a - b).norm() < 1e-15);
        }
        assert!((dd.mass_squared - (4.0 - 0.25 - 1.0 - 0.0625)).abs() < 1e-14);
        // Eigenvectors satisfy 𝒫̸v = ±m v.
        let d = gs.dim();
        let slash = (0..4).fold(CMatrix::zeros(d), |acc, j| {
            acc.add(&CMatrix::from_fn(d, |r, c| gs.gamma(j)[(r, c)].to_complex() * dd.cal_p[j]))
        });
        for (basis, sign) in [(&dd.plus, 1.0), (&dd.minus, -1.0)] {
            assert_eq!(basis.len(), d / 2);
            for v in basis {
                let sv = slash.mul_vec(v);
                for (a, b) in sv.iter().zip(v) {
                    assert!((a - dd.mass * sign * b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectral_reality_on_grid() {
        for sd in [epsilon(Scalar::from_int(1), 2), lattice(Scalar::from_int(2), 2)] {
            let m = DispersionModel::new(&sd, 0.0).unwrap();
            for i in 0..9 {
                let p: Vec<f64> = (0..sd.n()).map(|a| -2.0 + 0.5 * i as f64 + 0.3 * a as f64).collect();
                let z = m.mass_squared_complex(&p).unwrap();
                assert!(z.im.abs() / (1.0 + z.norm()) < REALITY_TOLERANCE);
            }
        }
    }

    #[test]
    fn star_incompatible_z_gives_nonreal_mass() {
        // Z^{10}_0 off the imaginary axis puts a nonreal eigenvalue into -iU.
        let mut parts = classical_minkowski(2).to_parts();
        parts.z[(4, 0)] = Scalar::from_parts((1, 2), (1, 2));
        parts.star = Some(false);
        let sd = StructureData::new(parts).unwrap();
        let m = DispersionModel::new(&sd, 0.0).unwrap();
        assert!(matches!(m.mass_squared(&[1.0, 1.0, 0.0, 0.5]), Err(Error::NonrealMass { .. })));
    }

    #[test]
    fn dispersion_rejects_bad_input() {
        let sd = classical_minkowski(2);
        assert!(DispersionModel::new(&sd, -1.0).is_err());
        let m = DispersionModel::new(&sd, 0.0).unwrap();
        assert!(matches!(m.mass_squared(&[1.0]), Err(Error::Shape(_))));
    }
}
