//! Braided tensor powers of the coordinate algebra: the interchange operator `K`, the
//! permutation representation `π`, boson projection and lifted n-particle operators.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ncalgebra::{NCPoly, NormalFormEngine, Word};
use crate::report::{Check, Report};
use crate::scalar::Scalar;

/// Largest tensor power handled by the permutation sums.
pub const MAX_PARTICLES: usize = 6;

/// Total degree used for the involution and ideal checks.
const CHECK_DEGREE: usize = 3;

/// Element of `𝒞^{⊗n}`: slot words (each in normal form) → coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorState {
    slots: usize,
    terms: BTreeMap<Vec<Word>, Scalar>,
}

impl TensorState {
    pub fn zero(slots: usize) -> Self {
        TensorState { slots, terms: BTreeMap::new() }
    }

    /// `a_1 ⊗ … ⊗ a_n`
    pub fn product(factors: &[NCPoly]) -> Self {
        let mut out = TensorState::zero(factors.len());
        out.terms.insert(Vec::new(), Scalar::one());
        for f in factors {
            let mut next = BTreeMap::new();
            for (ws, c) in &out.terms {
                for (w, fc) in f.terms() {
                    let mut key = ws.clone();
                    key.push(w.clone());
                    next.insert(key, c * fc);
                }
            }
            out.terms = next;
        }
        out
    }

    pub fn slots(&self) -> usize {
        self.slots
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Word>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, words: &[Word]) -> Scalar {
        self.terms.get(words).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, words: Vec<Word>, c: &Scalar) {
        assert_eq!(words.len(), self.slots);
        if c.is_zero() {
            return;
        }
        let now_zero = {
            let e = self.terms.entry(words.clone()).or_insert_with(Scalar::zero);
            *e += c;
            e.is_zero()
        };
        if now_zero {
            self.terms.remove(&words);
        }
    }

    pub fn axpy(&mut self, c: &Scalar, other: &TensorState) {
        for (w, v) in &other.terms {
            self.add_term(w.clone(), &(c * v));
        }
    }

    pub fn add(&self, other: &TensorState) -> TensorState {
        let mut out = self.clone();
        out.axpy(&Scalar::one(), other);
        out
    }

    pub fn sub(&self, other: &TensorState) -> TensorState {
        let mut out = self.clone();
        out.axpy(&Scalar::from_int(-1), other);
        out
    }

    pub fn scale(&self, c: &Scalar) -> TensorState {
        let mut out = TensorState::zero(self.slots);
        out.axpy(c, self);
        out
    }

    /// Reduce every slot to normal form.
    pub fn normalize(&self, engine: &NormalFormEngine) -> Result<TensorState> {
        let mut out = TensorState::zero(self.slots);
        for (ws, c) in &self.terms {
            let factors = ws.iter().map(|w| engine.normal_form(&NCPoly::word(w.clone()))).collect::<Result<Vec<_>>>()?;
            out.axpy(c, &TensorState::product(&factors));
        }
        Ok(out)
    }

    /// Apply a linear map on `𝒞` to one slot.
    pub fn map_slot(&self, slot: usize, mut f: impl FnMut(&NCPoly) -> Result<NCPoly>) -> Result<TensorState> {
        let mut cache: BTreeMap<Word, NCPoly> = BTreeMap::new();
        let mut out = TensorState::zero(self.slots);
        for (ws, c) in &self.terms {
            if !cache.contains_key(&ws[slot]) {
                cache.insert(ws[slot].clone(), f(&NCPoly::word(ws[slot].clone()))?);
            }
            for (w, v) in cache[&ws[slot]].terms() {
                let mut key = ws.clone();
                key[slot] = w.clone();
                out.add_term(key, &(c * v));
            }
        }
        Ok(out)
    }

    fn first_difference(&self, other: &TensorState) -> Option<String> {
        let d = self.sub(other);
        d.terms.iter().next().map(|(ws, c)| format!("{ws:?} residual {c}"))
    }
}

/// How `K` acts on `𝒞⊗𝒞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Braiding {
    /// `K(a⊗b) = b⊗a`
    Flip,
    /// `K(x^i⊗x^j) = B^{ij}_{kl} x^k⊗x^l` with `b[(i·N+j, k·N+l)] = B^{ij}_{kl}`, extended to
    /// words by crossing letters one at a time.
    Generator(Matrix),
}

/// The interchange operator `K` on `𝒞⊗𝒞` together with the outcome of its axiom checks.
#[derive(Clone, Debug)]
pub struct BraidOperator<'e> {
    engine: &'e NormalFormEngine,
    braiding: Braiding,
    report: Report,
}

impl<'e> BraidOperator<'e> {
    pub fn new(engine: &'e NormalFormEngine, braiding: Braiding) -> Result<Self> {
        if let Braiding::Generator(b) = &braiding {
            let nn = engine.n() * engine.n();
            if b.rows() != nn || b.cols() != nn {
                return Err(Error::Shape(format!("braid matrix is {}x{}, expected {nn}x{nn}", b.rows(), b.cols())));
            }
        }
        let mut k = BraidOperator { engine, braiding, report: Report::new() };
        k.report = k.verify()?;
        Ok(k)
    }

    pub fn flip(engine: &'e NormalFormEngine) -> Self {
        BraidOperator::new(engine, Braiding::Flip).expect("flip has no shape constraints")
    }

    pub fn engine(&self) -> &NormalFormEngine {
        self.engine
    }

    pub fn braiding(&self) -> &Braiding {
        &self.braiding
    }

    /// Involution, braid relation and ideal compatibility.
    pub fn report(&self) -> &Report {
        &self.report
    }

    fn ensure_valid(&self) -> Result<()> {
        match self.report.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::BraidInvalid(format!("{}: {}", c.name, c.witness.as_deref().unwrap_or("")))),
        }
    }

    /// `K(a⊗b)` on words, unnormalized.
    fn apply_words(&self, a: &Word, b: &Word) -> Vec<(Word, Word, Scalar)> {
        match &self.braiding {
            Braiding::Flip => vec![(b.clone(), a.clone(), Scalar::one())],
            Braiding::Generator(m) => {
                let n = self.engine.n();
                let (p, q) = (a.len(), b.len());
                let mut seqs: BTreeMap<Vec<u8>, Scalar> = BTreeMap::new();
                seqs.insert(a.as_bytes().iter().chain(b.as_bytes()).copied().collect(), Scalar::one());
                // Move each letter of b leftwards across the p letters of a.
                for t in 0..q {
                    for pos in (t..p + t).rev() {
                        let mut next: BTreeMap<Vec<u8>, Scalar> = BTreeMap::new();
                        for (s, c) in &seqs {
                            let row = s[pos] as usize * n + s[pos + 1] as usize;
                            for kl in 0..n * n {
                                let v = &m[(row, kl)];
                                if v.is_zero() {
                                    continue;
                                }
                                let mut s2 = s.clone();
                                s2[pos] = (kl / n) as u8;
                                s2[pos + 1] = (kl % n) as u8;
                                let e = next.entry(s2).or_insert_with(Scalar::zero);
                                *e += &(c * v);
                            }
                        }
                        next.retain(|_, c| !c.is_zero());
                        seqs = next;
                    }
                }
                seqs.into_iter()
                    .map(|(s, c)| {
                        let left: Vec<usize> = s[..q].iter().map(|&x| x as usize).collect();
                        let right: Vec<usize> = s[q..].iter().map(|&x| x as usize).collect();
                        (Word::from_indices(&left), Word::from_indices(&right), c)
                    })
                    .collect()
            }
        }
    }

    /// `K^{(m)}`: `K` on slots `m, m+1`, result normalized.
    pub fn apply_at(&self, psi: &TensorState, m: usize) -> Result<TensorState> {
        if m + 1 >= psi.slots() {
            return Err(Error::InvalidArgument(format!("no slot pair ({m}, {}) in a {}-fold tensor", m + 1, psi.slots())));
        }
        let mut out = TensorState::zero(psi.slots());
        for (ws, c) in psi.terms() {
            for (l, r, v) in self.apply_words(&ws[m], &ws[m + 1]) {
                let lp = self.engine.normal_form(&NCPoly::word(l))?;
                let rp = self.engine.normal_form(&NCPoly::word(r))?;
                let cv = c * &v;
                for (lw, lc) in lp.terms() {
                    for (rw, rc) in rp.terms() {
                        let mut key = ws.clone();
                        key[m] = lw.clone();
                        key[m + 1] = rw.clone();
                        out.add_term(key, &(&cv * &(lc * rc)));
                    }
                }
            }
        }
        Ok(out)
    }

    fn verify(&self) -> Result<Report> {
        let mut report = Report::new();
        let e = self.engine;
        let top = CHECK_DEGREE.min(e.cutoff());
        let words: Vec<Vec<Word>> = (0..=top).map(|d| e.complement_words(d)).collect();

        let mut res = Ok(());
        'outer: for da in 1..top {
            for db in 1..=top - da {
                for a in &words[da] {
                    for b in &words[db] {
                        let psi = TensorState::product(&[NCPoly::word(a.clone()), NCPoly::word(b.clone())]);
                        let back = self.apply_at(&self.apply_at(&psi, 0)?, 0)?;
                        if let Some(w) = back.first_difference(&psi) {
                            res = Err(w);
                            break 'outer;
                        }
                    }
                }
            }
        }
        report.push(Check::from_result(format!("K² = id on degree ≤ {top}"), res));

        let mut res = Ok(());
        if e.cutoff() >= 1 {
            'braid: for a in &words[1] {
                for b in &words[1] {
                    for c in &words[1] {
                        let psi = TensorState::product(&[NCPoly::word(a.clone()), NCPoly::word(b.clone()), NCPoly::word(c.clone())]);
                        let l = self.apply_at(&self.apply_at(&self.apply_at(&psi, 0)?, 1)?, 0)?;
                        let r = self.apply_at(&self.apply_at(&self.apply_at(&psi, 1)?, 0)?, 1)?;
                        if let Some(w) = l.first_difference(&r) {
                            res = Err(w);
                            break 'braid;
                        }
                    }
                }
            }
        }
        report.push(Check::from_result("K⁽¹⁾K⁽²⁾K⁽¹⁾ = K⁽²⁾K⁽¹⁾K⁽²⁾ on degree (1,1,1)", res));

        // K(q⊗x^k) and K(x^k⊗q) must vanish in 𝒞⊗𝒞.
        let mut res = Ok(());
        if top >= 3 {
            'ideal: for q in e.relations() {
                for k in 0..e.n() {
                    let xk = NCPoly::generator(k);
                    for pair in [[q.clone(), xk.clone()], [xk.clone(), q.clone()]] {
                        let mut out = TensorState::zero(2);
                        for (ws, c) in TensorState::product(&pair).terms() {
                            for (l, r, v) in self.apply_words(&ws[0], &ws[1]) {
                                let lp = e.normal_form(&NCPoly::word(l))?;
                                let rp = e.normal_form(&NCPoly::word(r))?;
                                out.axpy(&(c * &v), &TensorState::product(&[lp, rp]));
                            }
                        }
                        if let Some(w) = out.first_difference(&TensorState::zero(2)) {
                            res = Err(format!("k={k}: {w}"));
                            break 'ideal;
                        }
                    }
                }
            }
        }
        report.push(Check::from_result("K preserves relation⊗𝒞 + 𝒞⊗relation", res));
        Ok(report)
    }
}

/// Permutation in one-line notation: `σ(i) = images[i]`, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::InvalidArgument(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// The transposition exchanging `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut p: Vec<usize> = (0..n).collect();
        p.swap(i, j);
        Permutation(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `(self ∘ other)(i) = self(other(i))`
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }

    /// Reduced word `[i_1, …, i_k]` with `σ = s_{i_1} ⋯ s_{i_k}`, peeling right descents.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut p = self.0.clone();
        let mut rev = Vec::new();
        while let Some(i) = (0..p.len().saturating_sub(1)).find(|&i| p[i] > p[i + 1]) {
            p.swap(i, i + 1);
            rev.push(i);
        }
        rev.reverse();
        rev
    }

    /// Reduced word peeling the largest left descent; generally differs from
    /// [`Self::reduced_word`].
    pub fn reduced_word_left(&self) -> Vec<usize> {
        let mut inv = self.inverse().0;
        let mut word = Vec::new();
        while let Some(i) = (0..inv.len().saturating_sub(1)).rev().find(|&i| inv[i] > inv[i + 1]) {
            inv.swap(i, i + 1);
            word.push(i);
        }
        word
    }

    /// All permutations of `n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut cur: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation(cur.clone())];
        loop {
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                return out;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("successor exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
            out.push(Permutation(cur.clone()));
        }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `π_w ψ` for a word `w = [i_1, …, i_k]`: applies `K^{(i_k)}` first.
pub fn pi_word(k: &BraidOperator, word: &[usize], psi: &TensorState) -> Result<TensorState> {
    k.ensure_valid()?;
    let mut out = psi.clone();
    for &m in word.iter().rev() {
        out = k.apply_at(&out, m)?;
    }
    Ok(out)
}

/// `π_σ ψ`, moving the factor in slot `i` to slot `σ(i)`.
pub fn pi_sigma(k: &BraidOperator, sigma: &Permutation, psi: &TensorState) -> Result<TensorState> {
    if sigma.len() != psi.slots() {
        return Err(Error::InvalidArgument(format!("permutation of {} acting on {} slots", sigma.len(), psi.slots())));
    }
    pi_word(k, &sigma.reduced_word(), psi)
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_PARTICLES {
        return Err(Error::SizeExceeded { size: n, limit: MAX_PARTICLES });
    }
    Ok(())
}

/// `(1/n!) Σ_σ π_σ ψ`
pub fn symmetrize(k: &BraidOperator, psi: &TensorState) -> Result<TensorState> {
    let n = psi.slots();
    check_size(n)?;
    let mut out = TensorState::zero(n);
    for sigma in Permutation::all(n) {
        out.axpy(&Scalar::one(), &pi_sigma(k, &sigma, psi)?);
    }
    Ok(out.scale(&Scalar::from_ratio(1, factorial(n) as i64)))
}

/// `W^{(n)} = Σ_m π_{(1,m)} (W⊗1^{⊗(n-1)}) π_{(1,m)}`
pub fn lift_by_transpositions(
    k: &BraidOperator,
    w: &mut dyn FnMut(&NCPoly) -> Result<NCPoly>,
    psi: &TensorState,
) -> Result<TensorState> {
    let n = psi.slots();
    check_size(n)?;
    let mut out = TensorState::zero(n);
    for m in 0..n {
        let t = Permutation::transposition(n, 0, m);
        let moved = pi_sigma(k, &t, psi)?;
        let acted = moved.map_slot(0, &mut *w)?.normalize(k.engine())?;
        out.axpy(&Scalar::one(), &pi_sigma(k, &t, &acted)?);
    }
    Ok(out)
}

/// `W^{(n)} = (1/(n-1)!) Σ_σ π_σ (W⊗1^{⊗(n-1)}) π_σ⁻¹`
pub fn lift_by_average(
    k: &BraidOperator,
    w: &mut dyn FnMut(&NCPoly) -> Result<NCPoly>,
    psi: &TensorState,
) -> Result<TensorState> {
    let n = psi.slots();
    check_size(n)?;
    let mut out = TensorState::zero(n);
    for sigma in Permutation::all(n) {
        let moved = pi_sigma(k, &sigma.inverse(), psi)?;
        let acted = moved.map_slot(0, &mut *w)?.normalize(k.engine())?;
        out.axpy(&Scalar::one(), &pi_sigma(k, &sigma, &acted)?);
    }
    Ok(out.scale(&Scalar::from_ratio(1, factorial(n.max(1) - 1) as i64)))
}

/// `W^{(n)} ψ` for a symmetric state; both lift formulas are evaluated and must agree.
pub fn lift_operator(
    k: &BraidOperator,
    w: &mut dyn FnMut(&NCPoly) -> Result<NCPoly>,
    psi: &TensorState,
) -> Result<TensorState> {
    if psi.slots() == 0 {
        return Err(Error::InvalidArgument("lift needs at least one slot".into()));
    }
    if let Some(d) = symmetrize(k, psi)?.first_difference(psi) {
        return Err(Error::InvalidArgument(format!("state is not symmetric: {d}")));
    }
    let a = lift_by_transpositions(k, w, psi)?;
    let b = lift_by_average(k, w, psi)?;
    if let Some(d) = a.first_difference(&b) {
        return Err(Error::BraidInvalid(format!("lift formulas disagree: {d}")));
    }
    Ok(a)
}
