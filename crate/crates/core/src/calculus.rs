//! The covariant first-order calculus: partial derivatives, twist maps and `d` on functions.
//!
//! Everything is read off the homomorphism `ℒ: 𝒞 → Mat_{N+1}(𝒞)`,
//! `ℒ(a) = [[ρ(a), ∂(a)], [0, a]]`, where `ℒ(x^l)` has block `K_i^{lj} = R^{lj}_{ik} x^k + Z^{lj}_i`,
//! last column `δ^l_i` and corner `x^l`. `ℒ(ab) = ℒ(a)ℒ(b)` packages the bimodule rule
//! `a dx^j = dx^i ρ_i^j(a)` together with the Leibniz rule.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ncalgebra::{NCPoly, NormalFormEngine, Word};
use crate::scalar::Scalar;
use crate::structures::StructureData;

/// `ω = dx^i a_i`, stored as the right coefficients `a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm(pub Vec<NCPoly>);

impl OneForm {
    pub fn zero(n: usize) -> Self {
        OneForm(vec![NCPoly::zero(); n])
    }

    /// `dx^i`
    pub fn basis(n: usize, i: usize) -> Self {
        let mut w = OneForm::zero(n);
        w.0[i] = NCPoly::one();
        w
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(NCPoly::is_zero)
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        OneForm(self.0.iter().zip(&other.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, c: &Scalar) -> OneForm {
        OneForm(self.0.iter().map(|a| a.scale(c)).collect())
    }
}

/// One entry of the block `K_i^{lj}` for fixed `(l, j)`: `R^{lj}_{im}` contributes `r · x^m` at row `i`.
#[derive(Clone, Debug)]
struct KEntry {
    linear: Vec<(usize, usize, Scalar)>,
    constant: Vec<(usize, Scalar)>,
}

#[derive(Clone, Debug)]
pub struct Calculus {
    sd: StructureData,
    engine: NormalFormEngine,
    /// `k[l][j]`
    k: Vec<Vec<KEntry>>,
    star_forms: core::result::Result<(), String>,
}

impl Calculus {
    /// Builds the normal-form engine and checks that `ℒ` annihilates every relation generator.
    pub fn new(sd: &StructureData) -> Result<Self> {
        let engine = NormalFormEngine::build(sd)?;
        Self::with_engine(sd, engine)
    }

    pub fn with_engine(sd: &StructureData, engine: NormalFormEngine) -> Result<Self> {
        let n = sd.n();
        let mut k = Vec::with_capacity(n);
        for l in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let r_row = sd.r_matrix().row(sd.pair(l, j));
                let linear = r_row
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| !r.is_zero())
                    .map(|(im, r)| (im / n, im % n, r.clone()))
                    .collect();
                let constant = (0..n)
                    .filter(|&i| !sd.z(l, j, i).is_zero())
                    .map(|i| (i, sd.z(l, j, i).clone()))
                    .collect();
                row.push(KEntry { linear, constant });
            }
            k.push(row);
        }
        let mut calc = Calculus { sd: sd.clone(), engine, k, star_forms: Ok(()) };
        calc.check_well_defined()?;
        calc.star_forms = calc.check_star_forms();
        Ok(calc)
    }

    pub fn structure(&self) -> &StructureData {
        &self.sd
    }

    pub fn engine(&self) -> &NormalFormEngine {
        &self.engine
    }

    pub fn n(&self) -> usize {
        self.sd.n()
    }

    /// `K_i^{lj}` as a polynomial.
    pub fn k_poly(&self, l: usize, j: usize, i: usize) -> NCPoly {
        let e = &self.k[l][j];
        let mut p = NCPoly::zero();
        for (ii, m, r) in &e.linear {
            if *ii == i {
                p.add_term(Word::letter(*m), r);
            }
        }
        for (ii, z) in &e.constant {
            if *ii == i {
                p.add_term(Word::empty(), z);
            }
        }
        p
    }

    /// `out_i = Σ_j K_i^{lj} v_j`, the block of `ℒ(x^l)` applied to a column.
    fn apply_k(&self, l: usize, v: &[NCPoly]) -> Result<Vec<NCPoly>> {
        let n = self.n();
        let mut out = vec![NCPoly::zero(); n];
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let entry = &self.k[l][j];
            let mut shifted: Vec<Option<NCPoly>> = vec![None; n];
            for (i, m, r) in &entry.linear {
                if shifted[*m].is_none() {
                    shifted[*m] = Some(self.engine.left_generator_mul(*m, vj)?);
                }
                out[*i].axpy(r, shifted[*m].as_ref().unwrap());
            }
            for (i, z) in &entry.constant {
                out[*i].axpy(z, vj);
            }
        }
        Ok(out)
    }

    /// `(∂_0 w, …, ∂_{N-1} w, w)` for a word, not necessarily in normal form.
    fn word_column(&self, w: &Word) -> Result<(Vec<NCPoly>, NCPoly)> {
        let n = self.n();
        let mut partials = vec![NCPoly::zero(); n];
        let mut tail = NCPoly::one();
        for l in w.letters().rev() {
            let mut next = self.apply_k(l, &partials)?;
            next[l].axpy(&Scalar::one(), &tail);
            partials = next;
            tail = self.engine.left_generator_mul(l, &tail)?;
        }
        Ok((partials, tail))
    }

    /// `ρ(w)` as `[i][j] = ρ_i^j(w)`.
    fn word_rho(&self, w: &Word) -> Result<Vec<Vec<NCPoly>>> {
        let n = self.n();
        // Columns of the running product, `cols[t][i] = ρ_i^t`.
        let mut cols: Vec<Vec<NCPoly>> = (0..n)
            .map(|t| (0..n).map(|i| if i == t { NCPoly::one() } else { NCPoly::zero() }).collect())
            .collect();
        for l in w.letters().rev() {
            cols = cols.iter().map(|c| self.apply_k(l, c)).collect::<Result<_>>()?;
        }
        Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
    }

    fn check_input(&self, a: &NCPoly) -> Result<()> {
        self.engine.check_letters(a)?;
        if let Some(d) = a.degree() {
            if d > self.engine.cutoff() {
                return Err(Error::CutoffExceeded { degree: d, cutoff: self.engine.cutoff() });
            }
        }
        Ok(())
    }

    /// All partial derivatives `∂_i(a)`.
    pub fn partials(&self, a: &NCPoly) -> Result<Vec<NCPoly>> {
        self.check_input(a)?;
        let mut out = vec![NCPoly::zero(); self.n()];
        for (w, c) in a.terms() {
            let (col, _) = self.word_column(w)?;
            for (o, p) in out.iter_mut().zip(&col) {
                o.axpy(c, p);
            }
        }
        Ok(out)
    }

    pub fn partial(&self, i: usize, a: &NCPoly) -> Result<NCPoly> {
        self.index_check(i)?;
        Ok(self.partials(a)?.swap_remove(i))
    }

    /// `ρ(a)` as `[i][j] = ρ_i^j(a)`.
    pub fn rho_matrix(&self, a: &NCPoly) -> Result<Vec<Vec<NCPoly>>> {
        self.check_input(a)?;
        let n = self.n();
        let mut out = vec![vec![NCPoly::zero(); n]; n];
        for (w, c) in a.terms() {
            let m = self.word_rho(w)?;
            for (orow, mrow) in out.iter_mut().zip(&m) {
                for (o, p) in orow.iter_mut().zip(mrow) {
                    o.axpy(c, p);
                }
            }
        }
        Ok(out)
    }

    /// `ρ_i^j(a)`, defined by `a dx^j = dx^i ρ_i^j(a)`.
    pub fn rho(&self, i: usize, j: usize, a: &NCPoly) -> Result<NCPoly> {
        self.index_check(i)?;
        self.index_check(j)?;
        Ok(self.rho_matrix(a)?.swap_remove(i).swap_remove(j))
    }

    /// `i ↦ ρ_i^j(a)` for one `j`.
    pub fn rho_column(&self, a: &NCPoly, j: usize) -> Result<Vec<NCPoly>> {
        self.check_input(a)?;
        self.index_check(j)?;
        let n = self.n();
        let unit: Vec<NCPoly> = (0..n).map(|i| if i == j { NCPoly::one() } else { NCPoly::zero() }).collect();
        let mut out = vec![NCPoly::zero(); n];
        for (w, c) in a.terms() {
            let mut col = unit.clone();
            for l in w.letters().rev() {
                col = self.apply_k(l, &col)?;
            }
            for (o, p) in out.iter_mut().zip(&col) {
                o.axpy(c, p);
            }
        }
        Ok(out)
    }

    /// The full `(N+1)×(N+1)` matrix `ℒ(a)`.
    pub fn lmat(&self, a: &NCPoly) -> Result<Vec<Vec<NCPoly>>> {
        let n = self.n();
        let rho = self.rho_matrix(a)?;
        let partials = self.partials(a)?;
        let mut m: Vec<Vec<NCPoly>> = rho
            .into_iter()
            .zip(partials)
            .map(|(mut row, p)| {
                row.push(p);
                row
            })
            .collect();
        let mut last = vec![NCPoly::zero(); n];
        last.push(self.engine.normal_form(a)?);
        m.push(last);
        Ok(m)
    }

    pub fn d0(&self, a: &NCPoly) -> Result<OneForm> {
        Ok(OneForm(self.partials(a)?))
    }

    /// `a · ω`, rewriting `x^l dx^j = dx^i K_i^{lj}` one letter at a time.
    pub fn left_mul(&self, a: &NCPoly, w: &OneForm) -> Result<OneForm> {
        self.check_input(a)?;
        let mut out = OneForm::zero(self.n());
        for (word, c) in a.terms() {
            let mut cur = w.0.clone();
            for l in word.letters().rev() {
                cur = self.apply_k(l, &cur)?;
            }
            for (o, p) in out.0.iter_mut().zip(&cur) {
                o.axpy(c, p);
            }
        }
        Ok(out)
    }

    /// `ω · b`
    pub fn right_mul(&self, w: &OneForm, b: &NCPoly) -> Result<OneForm> {
        Ok(OneForm(w.0.iter().map(|a| self.engine.multiply(a, b)).collect::<Result<_>>()?))
    }

    pub fn star_status(&self) -> core::result::Result<(), &str> {
        self.engine.star_status()?;
        self.star_forms.as_ref().map(|_| ()).map_err(String::as_str)
    }

    /// `(dx^i a_i)* = a_i* dx^i = dx^j ρ_j^i(a_i*)`.
    pub fn star_oneform(&self, w: &OneForm) -> Result<OneForm> {
        if let Err(msg) = self.star_status() {
            return Err(Error::StarUndefined(msg.into()));
        }
        let n = self.n();
        let mut out = OneForm::zero(n);
        for (i, a) in w.0.iter().enumerate() {
            let s = self.engine.star(a)?;
            let rho = self.rho_matrix(&s)?;
            for (j, o) in out.0.iter_mut().enumerate() {
                o.axpy(&Scalar::one(), &rho[j][i]);
            }
        }
        Ok(out)
    }

    fn index_check(&self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::InvalidArgument(format!("index {i} out of range for N={}", self.n())));
        }
        Ok(())
    }

    fn check_well_defined(&self) -> Result<()> {
        let engine = &self.engine;
        for q in engine.relations().iter().chain(engine.closure_elements()) {
            let n = self.n();
            let mut rho = vec![vec![NCPoly::zero(); n]; n];
            let mut partials = vec![NCPoly::zero(); n];
            for (w, c) in q.terms() {
                let m = self.word_rho(w)?;
                let (col, _) = self.word_column(w)?;
                for i in 0..n {
                    partials[i].axpy(c, &col[i]);
                    for j in 0..n {
                        rho[i][j].axpy(c, &m[i][j]);
                    }
                }
            }
            for i in 0..n {
                if !partials[i].is_zero() {
                    return Err(Error::NotWellDefined(format!(
                        "relation {q} has ∂_{i} = {} ≠ 0",
                        partials[i]
                    )));
                }
                for j in 0..n {
                    if !rho[i][j].is_zero() {
                        return Err(Error::NotWellDefined(format!(
                            "relation {q} has ρ_{i}^{j} = {} ≠ 0",
                            rho[i][j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(x^i dx^j)* = dx^j x^i` must agree with the star of the right form `dx^k ρ_k^j(x^i)`:
    /// `Σ_k ρ_s^k(ρ_k^j(x^i)*) = δ^j_s x^i`.
    fn check_star_forms(&self) -> core::result::Result<(), String> {
        if let Err(msg) = self.engine.star_status() {
            return Err(msg.into());
        }
        let n = self.n();
        for i in 0..n {
            let rho_x = self.rho_matrix(&NCPoly::generator(i)).map_err(|e| format!("{e}"))?;
            for j in 0..n {
                let mut lhs = vec![NCPoly::zero(); n];
                for (k, row) in rho_x.iter().enumerate() {
                    let s = self.engine.star(&row[j]).map_err(|e| format!("{e}"))?;
                    let r = self.rho_matrix(&s).map_err(|e| format!("{e}"))?;
                    for (s_idx, l) in lhs.iter_mut().enumerate() {
                        l.axpy(&Scalar::one(), &r[s_idx][k]);
                    }
                }
                for (s_idx, l) in lhs.iter().enumerate() {
                    let want = if s_idx == j { NCPoly::generator(i) } else { NCPoly::zero() };
                    if *l != want {
                        return Err(format!(
                            "(x{i} dx{j})* is inconsistent at s={s_idx}: {l} vs {want}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// `∂_i(x^k a) = δ^k_i a + (R^{kl}_{in} x^n + Z^{kl}_i) ∂_l(a)`
    pub fn check_leibniz_generator(&self, a: &NCPoly) -> core::result::Result<(), String> {
        let n = self.n();
        let da = self.partials(a).map_err(|e| format!("{e}"))?;
        let a_nf = self.engine.normal_form(a).map_err(|e| format!("{e}"))?;
        for k in 0..n {
            let xa = self.engine.left_generator_mul(k, &a_nf).map_err(|e| format!("{e}"))?;
            let lhs = self.partials(&xa).map_err(|e| format!("{e}"))?;
            let mut rhs = self.apply_k(k, &da).map_err(|e| format!("{e}"))?;
            rhs[k].axpy(&Scalar::one(), &a_nf);
            for i in 0..n {
                if lhs[i] != rhs[i] {
                    return Err(format!("i={i} k={k} a={a}: {} vs {}", lhs[i], rhs[i]));
                }
            }
        }
        Ok(())
    }

    /// `d(ab) = a·db + da·b`
    pub fn check_leibniz(&self, a: &NCPoly, b: &NCPoly) -> core::result::Result<(), String> {
        let run = || -> Result<Option<String>> {
            let ab = self.engine.multiply(a, b)?;
            let lhs = self.d0(&ab)?;
            let rhs = self.left_mul(a, &self.d0(b)?)?.add(&self.right_mul(&self.d0(a)?, b)?);
            Ok((lhs != rhs).then(|| format!("a={a} b={b}: {lhs:?} vs {rhs:?}")))
        };
        match run() {
            Ok(None) => Ok(()),
            Ok(Some(w)) => Err(w),
            Err(e) => Err(format!("{e}")),
        }
    }

    /// `∂_l ∂_k a = R^{ij}_{kl} ∂_j ∂_i a`
    pub fn check_derivative_braid(&self, a: &NCPoly) -> core::result::Result<(), String> {
        let n = self.n();
        let second = self.second_partials(a).map_err(|e| format!("{e}"))?;
        for k in 0..n {
            for l in 0..n {
                let lhs = &second[l][k];
                let mut rhs = NCPoly::zero();
                for i in 0..n {
                    for j in 0..n {
                        rhs.axpy(self.sd.r(i, j, k, l), &second[j][i]);
                    }
                }
                if *lhs != rhs {
                    return Err(format!("k={k} l={l} a={a}: {lhs} vs {rhs}"));
                }
            }
        }
        Ok(())
    }

    /// `second[p][q] = ∂_p ∂_q a`
    pub fn second_partials(&self, a: &NCPoly) -> Result<Vec<Vec<NCPoly>>> {
        let first = self.partials(a)?;
        let n = self.n();
        let mut out = vec![vec![NCPoly::zero(); n]; n];
        for (q, f) in first.iter().enumerate() {
            let g = self.partials(f)?;
            for (p, gp) in g.into_iter().enumerate() {
                out[p][q] = gp;
            }
        }
        Ok(out)
    }

    /// `∂_c ρ_a^t(f) = Σ_{b,d} R^{bd}_{ac} ρ_d^t(∂_b f)`
    pub fn check_twist_exchange(&self, f: &NCPoly) -> core::result::Result<(), String> {
        let n = self.n();
        let run = || -> Result<Option<String>> {
            let rho_f = self.rho_matrix(f)?;
            let df = self.partials(f)?;
            let rho_df: Vec<Vec<Vec<NCPoly>>> = df.iter().map(|p| self.rho_matrix(p)).collect::<Result<_>>()?;
            for a in 0..n {
                for t in 0..n {
                    let lhs = self.partials(&rho_f[a][t])?;
                    for (c, l) in lhs.iter().enumerate() {
                        let mut rhs = NCPoly::zero();
                        for b in 0..n {
                            for d in 0..n {
                                rhs.axpy(self.sd.r(b, d, a, c), &rho_df[b][d][t]);
                            }
                        }
                        if *l != rhs {
                            return Ok(Some(format!("c={c} a={a} t={t} f={f}: {l} vs {rhs}")));
                        }
                    }
                }
            }
            Ok(None)
        };
        match run() {
            Ok(None) => Ok(()),
            Ok(Some(w)) => Err(w),
            Err(e) => Err(format!("{e}")),
        }
    }
}
