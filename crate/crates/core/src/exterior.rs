//! Higher forms: R-antisymmetrizers, the exterior algebra they cut out, wedge, `d` and star.
//!
//! A raw `n`-tensor `Σ_J dx^J a_J` (multi-index `J` flattened base `N`, first index most
//! significant) represents the form `A_n` applied to it. With the rank factorization
//! `A_n = α′ α`, `α α′ = 1`, a form is stored by its coordinates `c = α a` and lifted back by
//! `a = α′ c`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{Calculus, OneForm};
use crate::error::{Error, Result};
use crate::matrix::{SparseVec, rref_sparse};
use crate::ncalgebra::NCPoly;
use crate::report::{Check, Report};
use crate::scalar::Scalar;
use crate::structures::StructureData;

/// Largest tensor power `N^n` an antisymmetrizer may be built on.
pub const MAX_TENSOR_SIZE: usize = 1_000_000;
/// Default top form degree.
pub const DEFAULT_MAX_FORM_DEGREE: usize = 6;

#[derive(Clone, Debug)]
pub struct Antisymmetrizer {
    n: usize,
    dim: usize,
    size: usize,
    /// `columns[J] = A_n e_J`
    columns: Vec<SparseVec>,
    /// Rows of `α`: the nonzero rows of the reduced echelon form of `A_n`.
    alpha: Vec<SparseVec>,
    /// Columns of `α′`: the pivot columns of `A_n`.
    alpha_prime: Vec<SparseVec>,
}

/// `Σ_{π ∈ S_m} sgn(π) R_π` acting on tensor positions `0..m` of a degree-`n` tensor.
///
/// Each permutation is taken in the reduced word `t_j t_{j+1} ⋯ t_{m-2} · σ`, `σ ∈ S_{m-1}`,
/// which enumerates `S_m` once with additive lengths.
fn alternating_sum(sd: &StructureData, v: &SparseVec, n: usize, m: usize) -> SparseVec {
    if m <= 1 {
        return v.clone();
    }
    let inner = alternating_sum(sd, v, n, m - 1);
    let mut acc = inner.clone();
    let mut t = inner;
    let mut sign = Scalar::one();
    for j in (0..m - 1).rev() {
        t = sd.apply_r_at(&t, n, j);
        sign = -&sign;
        acc.axpy(&sign, &t);
    }
    acc
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

impl Antisymmetrizer {
    pub fn build(sd: &StructureData, n: usize) -> Result<Self> {
        let dim = sd.n();
        let size = dim
            .checked_pow(n as u32)
            .filter(|&s| s <= MAX_TENSOR_SIZE)
            .ok_or(Error::SizeExceeded { size: dim.saturating_pow(n as u32), limit: MAX_TENSOR_SIZE })?;
        let inv_fact = Scalar::from_ratio(1, factorial(n) as i64);
        let columns: Vec<SparseVec> = (0..size)
            .map(|j| {
                let mut c = alternating_sum(sd, &SparseVec::unit(j), n, n);
                c.scale(&inv_fact);
                c
            })
            .collect();
        let mut rows = vec![SparseVec::new(); size];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter() {
                rows[*i].add_term(j, v);
            }
        }
        let (alpha, pivots) = rref_sparse(rows);
        let alpha_prime = pivots.iter().map(|&p| columns[p].clone()).collect();
        Ok(Antisymmetrizer { n, dim, size, columns, alpha, alpha_prime })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// `N^n`
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.columns[j]
    }

    pub fn alpha(&self) -> &[SparseVec] {
        &self.alpha
    }

    pub fn alpha_prime(&self) -> &[SparseVec] {
        &self.alpha_prime
    }

    /// `A_n v`
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v.iter() {
            out.axpy(c, &self.columns[*j]);
        }
        out
    }

    /// Exact checks: `A² = A`, `R_k A = A R_k = -A`, `A = α′α`, `αα′ = 1`.
    pub fn verify(&self, sd: &StructureData) -> Report {
        let mut report = Report::new();
        let n = self.n;
        let tag = |s: &str| format!("A{n}: {s}");
        let first_bad = |f: &dyn Fn(usize) -> bool| (0..self.size).find(|&j| !f(j));

        let idem = first_bad(&|j| self.apply(&self.columns[j]) == self.columns[j]);
        report.push(Check::from_result(tag("A^2 = A"), idem.map_or(Ok(()), |j| Err(format!("column {j}")))));

        let mut left = Ok(());
        let mut right = Ok(());
        for k in 0..n.saturating_sub(1) {
            if left.is_ok() {
                if let Some(j) = first_bad(&|j| {
                    let mut v = sd.apply_r_at(&self.columns[j], n, k);
                    v.axpy(&Scalar::one(), &self.columns[j]);
                    v.is_zero()
                }) {
                    left = Err(format!("k={k} column {j}"));
                }
            }
            if right.is_ok() {
                if let Some(j) = first_bad(&|j| {
                    let mut v = self.apply(&sd.apply_r_at(&SparseVec::unit(j), n, k));
                    v.axpy(&Scalar::one(), &self.columns[j]);
                    v.is_zero()
                }) {
                    right = Err(format!("k={k} column {j}"));
                }
            }
        }
        report.push(Check::from_result(tag("R_k A = -A"), left));
        report.push(Check::from_result(tag("A R_k = -A"), right));

        let recon = first_bad(&|j| {
            let mut v = SparseVec::new();
            for (row, col) in self.alpha.iter().zip(&self.alpha_prime) {
                if let Some(c) = row.get(j) {
                    v.axpy(c, col);
                }
            }
            v == self.columns[j]
        });
        report.push(Check::from_result(tag("A = α′α"), recon.map_or(Ok(()), |j| Err(format!("column {j}")))));

        let mut dual = Ok(());
        'outer: for (g, row) in self.alpha.iter().enumerate() {
            for (h, col) in self.alpha_prime.iter().enumerate() {
                let want = if g == h { Scalar::one() } else { Scalar::zero() };
                if row.dot(col) != want {
                    dual = Err(format!("(γ, δ) = ({g}, {h})"));
                    break 'outer;
                }
            }
        }
        report.push(Check::from_result(tag("αα′ = 1"), dual));
        report
    }

    /// Multi-index of a flattened tensor position.
    pub fn multi_index(&self, mut j: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = j % self.dim;
            j /= self.dim;
        }
        out
    }
}

/// A degree-`n` form `Σ_γ ω^γ c_γ` with `ω^γ = α′_γ` and right coefficients `c_γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Form {
    pub degree: usize,
    pub coeffs: Vec<NCPoly>,
}

impl Form {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(NCPoly::is_zero)
    }

    pub fn add(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        Form { degree: self.degree, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Form) -> Form {
        assert_eq!(self.degree, other.degree);
        Form { degree: self.degree, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        Form { degree: self.degree, coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect() }
    }
}

impl From<OneForm> for Form {
    fn from(w: OneForm) -> Self {
        Form { degree: 1, coeffs: w.0 }
    }
}

/// Raw tensor: flattened multi-index -> right coefficient.
type Raw = BTreeMap<usize, NCPoly>;

fn raw_add(raw: &mut Raw, k: usize, c: &Scalar, p: &NCPoly) {
    if p.is_zero() || c.is_zero() {
        return;
    }
    let e = raw.entry(k).or_default();
    e.axpy(c, p);
    if e.is_zero() {
        raw.remove(&k);
    }
}

/// The exterior algebra up to a fixed top degree.
#[derive(Clone, Debug)]
pub struct Exterior<'c> {
    calc: &'c Calculus,
    antisym: Vec<Antisymmetrizer>,
}

impl<'c> Exterior<'c> {
    pub fn new(calc: &'c Calculus, max_degree: usize) -> Result<Self> {
        let antisym = (0..=max_degree)
            .map(|n| Antisymmetrizer::build(calc.structure(), n))
            .collect::<Result<_>>()?;
        Ok(Exterior { calc, antisym })
    }

    pub fn calculus(&self) -> &'c Calculus {
        self.calc
    }

    pub fn max_degree(&self) -> usize {
        self.antisym.len() - 1
    }

    pub fn antisymmetrizer(&self, n: usize) -> Result<&Antisymmetrizer> {
        self.antisym.get(n).ok_or(Error::InvalidArgument(format!(
            "form degree {n} exceeds the configured maximum {}",
            self.max_degree()
        )))
    }

    pub fn rank(&self, n: usize) -> Result<usize> {
        Ok(self.antisymmetrizer(n)?.rank())
    }

    pub fn zero(&self, n: usize) -> Result<Form> {
        Ok(Form { degree: n, coeffs: vec![NCPoly::zero(); self.rank(n)?] })
    }

    pub fn function(&self, a: &NCPoly) -> Result<Form> {
        Ok(Form { degree: 0, coeffs: vec![self.calc.engine().normal_form(a)?] })
    }

    /// `dx^{i_1} ∧ … ∧ dx^{i_n}`
    pub fn basis_wedge(&self, indices: &[usize]) -> Result<Form> {
        let n = self.calc.n();
        if indices.iter().any(|&i| i >= n) {
            return Err(Error::InvalidArgument("index out of range".into()));
        }
        let k = indices.iter().fold(0, |acc, &i| acc * n + i);
        let mut raw = Raw::new();
        raw.insert(k, NCPoly::one());
        self.project(indices.len(), &raw)
    }

    fn lift(&self, w: &Form) -> Result<Raw> {
        let a = self.antisymmetrizer(w.degree)?;
        if w.coeffs.len() != a.rank() {
            return Err(Error::Shape(format!("form of degree {} needs {} coefficients", w.degree, a.rank())));
        }
        let mut raw = Raw::new();
        for (col, c) in a.alpha_prime().iter().zip(&w.coeffs) {
            for (k, v) in col.iter() {
                raw_add(&mut raw, *k, v, c);
            }
        }
        Ok(raw)
    }

    fn project(&self, n: usize, raw: &Raw) -> Result<Form> {
        let a = self.antisymmetrizer(n)?;
        let coeffs = a
            .alpha()
            .iter()
            .map(|row| {
                let mut c = NCPoly::zero();
                for (k, v) in row.iter() {
                    if let Some(p) = raw.get(k) {
                        c.axpy(v, p);
                    }
                }
                c
            })
            .collect();
        Ok(Form { degree: n, coeffs })
    }

    /// The raw coefficients of `A_n` applied to the form, i.e. its canonical tensor representative.
    pub fn raw_tensor(&self, w: &Form) -> Result<Vec<(Vec<usize>, NCPoly)>> {
        let a = self.antisymmetrizer(w.degree)?;
        Ok(self.lift(w)?.into_iter().map(|(k, p)| (a.multi_index(k), p)).collect())
    }

    /// `a · dx^{J} = Σ_M dx^M ρ^{(n)}(a)_M^J`; returns `M` flattened with its coefficient.
    fn move_right(&self, a: &NCPoly, word: &[usize]) -> Result<Raw> {
        let n = self.calc.n();
        let mut cur = Raw::new();
        if a.is_zero() {
            return Ok(cur);
        }
        cur.insert(0, a.clone());
        for &j in word {
            let mut next = Raw::new();
            for (prefix, p) in &cur {
                let col = self.calc.rho_column(p, j)?;
                for (i, q) in col.iter().enumerate() {
                    raw_add(&mut next, prefix * n + i, &Scalar::one(), q);
                }
            }
            cur = next;
        }
        Ok(cur)
    }

    fn split(&self, k: usize, low_len: usize) -> (usize, Vec<usize>) {
        let n = self.calc.n();
        let base = n.pow(low_len as u32);
        let mut low = vec![0; low_len];
        let mut r = k % base;
        for slot in low.iter_mut().rev() {
            *slot = r % n;
            r /= n;
        }
        (k / base, low)
    }

    pub fn wedge(&self, w: &Form, t: &Form) -> Result<Form> {
        let (k, l) = (w.degree, t.degree);
        self.antisymmetrizer(k + l)?;
        let n = self.calc.n();
        let engine = self.calc.engine();
        let left = self.lift(w)?;
        let right = self.lift(t)?;
        let shift = n.pow(l as u32);
        let mut raw = Raw::new();
        for (jk, a) in &left {
            for (lk, b) in &right {
                let (_, lword) = self.split(*lk, l);
                for (m, moved) in self.move_right(a, &lword)? {
                    let c = engine.multiply(&moved, b)?;
                    raw_add(&mut raw, jk * shift + m, &Scalar::one(), &c);
                }
            }
        }
        self.project(k + l, &raw)
    }

    /// `a · ω`
    pub fn left_mul(&self, a: &NCPoly, w: &Form) -> Result<Form> {
        self.wedge(&self.function(a)?, w)
    }

    /// `ω · b`
    pub fn right_mul(&self, w: &Form, b: &NCPoly) -> Result<Form> {
        let engine = self.calc.engine();
        Ok(Form { degree: w.degree, coeffs: w.coeffs.iter().map(|c| engine.multiply(c, b)).collect::<Result<_>>()? })
    }

    /// `d(dx^J a_J) = (-1)^{|J|} dx^J ∧ da_J`
    pub fn d(&self, w: &Form) -> Result<Form> {
        let n = self.calc.n();
        let sign = if w.degree.is_multiple_of(2) { Scalar::one() } else { Scalar::from_int(-1) };
        let mut raw = Raw::new();
        for (jk, a) in self.lift(w)? {
            for (i, p) in self.calc.partials(&a)?.iter().enumerate() {
                raw_add(&mut raw, jk * n + i, &sign, p);
            }
        }
        self.project(w.degree + 1, &raw)
    }

    /// `(dx^I a_I)* = (-1)^{n(n-1)/2} a_I* dx^{I′}`, `I′` the reversed multi-index.
    pub fn star_form(&self, w: &Form) -> Result<Form> {
        if let Err(msg) = self.calc.star_status() {
            return Err(Error::StarUndefined(msg.into()));
        }
        let deg = w.degree;
        let sign = if (deg * deg.saturating_sub(1) / 2).is_multiple_of(2) { Scalar::one() } else { Scalar::from_int(-1) };
        let mut raw = Raw::new();
        for (jk, a) in self.lift(w)? {
            let (_, mut word) = self.split(jk, deg);
            word.reverse();
            let s = self.calc.engine().star(&a)?;
            for (m, moved) in self.move_right(&s, &word)? {
                raw_add(&mut raw, m, &sign, &moved);
            }
        }
        self.project(deg, &raw)
    }

    /// `d(dω) = 0`
    pub fn check_dd(&self, w: &Form) -> core::result::Result<(), String> {
        let dd = self.d(&self.d(w).map_err(|e| format!("{e}"))?).map_err(|e| format!("{e}"))?;
        if dd.is_zero() {
            Ok(())
        } else {
            Err(format!("degree {} form: dd = {:?}", w.degree, dd.coeffs))
        }
    }

    /// `d(ω∧θ) = dω∧θ + (-1)^{|ω|} ω∧dθ`
    pub fn check_graded_leibniz(&self, w: &Form, t: &Form) -> core::result::Result<(), String> {
        let run = || -> Result<Option<String>> {
            let lhs = self.d(&self.wedge(w, t)?)?;
            let sign = if w.degree.is_multiple_of(2) { Scalar::one() } else { Scalar::from_int(-1) };
            let rhs = self.wedge(&self.d(w)?, t)?.add(&self.wedge(w, &self.d(t)?)?.scale(&sign));
            Ok((lhs != rhs).then(|| format!("degrees ({}, {}): {:?} vs {:?}", w.degree, t.degree, lhs.coeffs, rhs.coeffs)))
        };
        match run() {
            Ok(None) => Ok(()),
            Ok(Some(m)) => Err(m),
            Err(e) => Err(format!("{e}")),
        }
    }

    /// The 2-tensor relation `ω^{ik} = dx^i⊗dx^k + R^{ik}_{cd} dx^c⊗dx^d` as raw entries.
    fn omega_raw(&self, i: usize, k: usize, right: &NCPoly) -> Raw {
        let sd = self.calc.structure();
        let n = sd.n();
        let mut raw = Raw::new();
        raw_add(&mut raw, i * n + k, &Scalar::one(), right);
        for c in 0..n {
            for d in 0..n {
                raw_add(&mut raw, c * n + d, sd.r(i, k, c, d), right);
            }
        }
        raw
    }

    /// `x^m ω^{ik} = R^{sk}_{nb} R^{mi}_{js} ω^{jn} x^b + ω^{ab} l^{mik}_{ab}` with
    /// `l^{mik}_{ab} = Z^{mi}_a δ^k_b + R^{mi}_{aq} Z^{qk}_b`, compared as raw 2-tensors.
    pub fn check_bimodule(&self) -> core::result::Result<(), String> {
        let sd = self.calc.structure();
        let n = sd.n();
        let run = |m: usize, i: usize, k: usize| -> Result<Option<String>> {
            let mut lhs = Raw::new();
            for (jk, p) in self.omega_raw(i, k, &NCPoly::one()) {
                let (_, word) = self.split(jk, 2);
                for (mm, moved) in self.move_right(&NCPoly::generator(m), &word)? {
                    raw_add(&mut lhs, mm, &Scalar::one(), &self.calc.engine().multiply(&moved, &p)?);
                }
            }
            let mut rhs = Raw::new();
            for j in 0..n {
                for nn in 0..n {
                    for b in 0..n {
                        let mut coef = Scalar::zero();
                        for s in 0..n {
                            coef += &(sd.r(s, k, nn, b) * sd.r(m, i, j, s));
                        }
                        if coef.is_zero() {
                            continue;
                        }
                        for (key, p) in self.omega_raw(j, nn, &NCPoly::generator(b)) {
                            raw_add(&mut rhs, key, &coef, &p);
                        }
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let mut l = if b == k { sd.z(m, i, a).clone() } else { Scalar::zero() };
                    for q in 0..n {
                        l += &(sd.r(m, i, a, q) * sd.z(q, k, b));
                    }
                    if l.is_zero() {
                        continue;
                    }
                    for (key, p) in self.omega_raw(a, b, &NCPoly::one()) {
                        raw_add(&mut rhs, key, &l, &p);
                    }
                }
            }
            if lhs != rhs {
                return Ok(Some(format!("m={m} i={i} k={k}")));
            }
            Ok(None)
        };
        for m in 0..n {
            for i in 0..n {
                for k in 0..n {
                    match run(m, i, k) {
                        Ok(None) => {}
                        Ok(Some(w)) => return Err(w),
                        Err(e) => return Err(format!("{e}")),
                    }
                }
            }
        }
        Ok(())
    }

    /// Random-free structural checks: antisymmetrizer identities for every built degree and
    /// the bimodule relation on 2-tensors.
    pub fn verify(&self) -> Report {
        let mut report = Report::new();
        for a in &self.antisym {
            report.extend(a.verify(self.calc.structure()));
        }
        report.push(Check::from_result("x^m ω^{ik} bimodule relation", self.check_bimodule()));
        report
    }
}
