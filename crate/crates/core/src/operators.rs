//! Metric operators: raised derivatives, the Laplacian, gamma matrices and the Dirac operator.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::calculus::Calculus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ncalgebra::NCPoly;
use crate::report::{Check, Report};
use crate::scalar::Scalar;
use crate::structures::StructureData;

/// `∂^j a = g^{jb} ∂_b a`
pub fn partial_up(calc: &Calculus, j: usize, a: &NCPoly) -> Result<NCPoly> {
    Ok(partials_up(calc, a)?.swap_remove(j))
}

pub fn partials_up(calc: &Calculus, a: &NCPoly) -> Result<Vec<NCPoly>> {
    Ok(raise(calc.structure(), &calc.partials(a)?))
}

fn raise(sd: &StructureData, lower: &[NCPoly]) -> Vec<NCPoly> {
    let n = sd.n();
    (0..n)
        .map(|j| {
            let mut p = NCPoly::zero();
            for (b, l) in lower.iter().enumerate() {
                p.axpy(sd.g(j, b), l);
            }
            p
        })
        .collect()
}

/// `□a = g^{ij} ∂_j ∂_i a`
pub fn box_op(calc: &Calculus, a: &NCPoly) -> Result<NCPoly> {
    let sd = calc.structure();
    let second = calc.second_partials(a)?;
    let mut out = NCPoly::zero();
    for i in 0..sd.n() {
        for j in 0..sd.n() {
            out.axpy(sd.g(i, j), &second[j][i]);
        }
    }
    Ok(out)
}

/// `□a = g_{ij} ∂^i ∂^j a`, the second contraction form.
pub fn box_lowered(calc: &Calculus, a: &NCPoly) -> Result<NCPoly> {
    let sd = calc.structure();
    let up = partials_up(calc, a)?;
    let mut out = NCPoly::zero();
    for (j, u) in up.iter().enumerate() {
        let upup = partials_up(calc, u)?;
        for (i, p) in upup.iter().enumerate() {
            out.axpy(sd.g_lower(i, j), p);
        }
    }
    Ok(out)
}

fn lift_err<T>(r: Result<T>) -> core::result::Result<T, String> {
    r.map_err(|e| format!("{e}"))
}

/// `∂^j(x^k a) = g^{jk} a + R^{jk}_{ab} x^a ∂^b a - (RZ)^{jk}_b ∂^b a`
pub fn check_raised_exchange(calc: &Calculus, a: &NCPoly) -> core::result::Result<(), String> {
    let sd = calc.structure();
    let engine = calc.engine();
    let n = sd.n();
    let a_nf = lift_err(engine.normal_form(a))?;
    let up = lift_err(partials_up(calc, &a_nf))?;
    let x_up: Vec<Vec<NCPoly>> = (0..n)
        .map(|m| up.iter().map(|u| engine.left_generator_mul(m, u)).collect::<Result<_>>())
        .collect::<Result<_>>()
        .map_err(|e| format!("{e}"))?;
    for k in 0..n {
        let xa = lift_err(engine.left_generator_mul(k, &a_nf))?;
        let lhs = lift_err(partials_up(calc, &xa))?;
        for (j, l) in lhs.iter().enumerate() {
            let mut rhs = a_nf.scale(sd.g(j, k));
            for (m, xu) in x_up.iter().enumerate() {
                for (b, p) in xu.iter().enumerate() {
                    rhs.axpy(sd.r(j, k, m, b), p);
                }
            }
            for (b, u) in up.iter().enumerate() {
                rhs.axpy(&-&sd.rz(j, k, b), u);
            }
            if *l != rhs {
                return Err(format!("j={j} k={k} a={a}: {l} vs {rhs}"));
            }
        }
    }
    Ok(())
}

/// `∂^i ∂^j a = R^{ij}_{kl} ∂^k ∂^l a`
pub fn check_raised_braid(calc: &Calculus, a: &NCPoly) -> core::result::Result<(), String> {
    let sd = calc.structure();
    let n = sd.n();
    let up = lift_err(partials_up(calc, a))?;
    // second[i][j] = ∂^i ∂^j a
    let mut second = vec![vec![NCPoly::zero(); n]; n];
    for (j, u) in up.iter().enumerate() {
        for (i, p) in lift_err(partials_up(calc, u))?.into_iter().enumerate() {
            second[i][j] = p;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut rhs = NCPoly::zero();
            for k in 0..n {
                for l in 0..n {
                    rhs.axpy(sd.r(i, j, k, l), &second[k][l]);
                }
            }
            if second[i][j] != rhs {
                return Err(format!("i={i} j={j} a={a}: {} vs {rhs}", second[i][j]));
            }
        }
    }
    Ok(())
}

/// `□∂_k = ∂_k□` and `□∂^k = ∂^k□`, plus agreement of both contraction forms of `□`.
pub fn check_box_commutes(calc: &Calculus, a: &NCPoly) -> core::result::Result<(), String> {
    let boxed = lift_err(box_op(calc, a))?;
    let lowered = lift_err(box_lowered(calc, a))?;
    if boxed != lowered {
        return Err(format!("contractions differ on {a}: {boxed} vs {lowered}"));
    }
    let d_box = lift_err(calc.partials(&boxed))?;
    let up_box = raise(calc.structure(), &d_box);
    let da = lift_err(calc.partials(a))?;
    let up_a = raise(calc.structure(), &da);
    for (k, (p, q)) in da.iter().zip(&up_a).enumerate() {
        let bp = lift_err(box_op(calc, p))?;
        if bp != d_box[k] {
            return Err(format!("□∂_{k} on {a}: {bp} vs {}", d_box[k]));
        }
        let bq = lift_err(box_op(calc, q))?;
        if bq != up_box[k] {
            return Err(format!("□∂^{k} on {a}: {bq} vs {}", up_box[k]));
        }
    }
    Ok(())
}

/// `N` square matrices `γ^a` of a common size `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSet {
    d: usize,
    gammas: Vec<Matrix>,
}

impl GammaSet {
    pub fn new(gammas: Vec<Matrix>) -> Result<Self> {
        let d = gammas.first().map_or(0, Matrix::rows);
        if d == 0 || gammas.iter().any(|g| g.rows() != d || g.cols() != d) {
            return Err(Error::Shape("gamma matrices must be nonempty, square and of equal size".into()));
        }
        Ok(GammaSet { d, gammas })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn gamma(&self, a: usize) -> &Matrix {
        &self.gammas[a]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.gammas
    }
}

/// `γ^aγ^b + R^{ba}_{dc} γ^cγ^d = 2g^{ba}·1` for all `(a, b)`.
pub fn verify_gammas(sd: &StructureData, gs: &GammaSet) -> Report {
    let mut report = Report::new();
    let name = "γ^aγ^b + R^{ba}_{dc}γ^cγ^d = 2g^{ba}";
    let n = sd.n();
    if gs.len() != n {
        report.push(Check::fail(name, format!("expected {n} matrices, got {}", gs.len())));
        return report;
    }
    let d = gs.dim();
    let prods: Vec<Vec<Matrix>> =
        (0..n).map(|a| (0..n).map(|b| gs.gamma(a).mul(gs.gamma(b))).collect()).collect();
    let mut result = Ok(());
    'outer: for a in 0..n {
        for b in 0..n {
            let mut lhs = prods[a][b].clone();
            for c in 0..n {
                for dd in 0..n {
                    let r = sd.r(b, a, dd, c);
                    if !r.is_zero() {
                        lhs = lhs.add(&prods[c][dd].scale(r));
                    }
                }
            }
            let rhs = Matrix::identity(d).scale(&sd.g(b, a).scale_int(2));
            if let Some((i, j, diff)) = lhs.first_difference(&rhs) {
                result = Err(format!("(a,b)=({a},{b}) entry ({i},{j}) residual {diff}"));
                break 'outer;
            }
        }
    }
    report.push(Check::from_result(name, result));
    report
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let root = |x: &BigInt| {
        let s = x.sqrt();
        (&s * &s == *x).then_some(s)
    };
    Some(BigRational::new(root(r.numer())?, root(r.denom())?))
}

/// Symmetric elimination: invertible `P` and diagonal `D` with `P g Pᵀ = D`.
fn congruence_diagonalize(g: &Matrix) -> (Matrix, Vec<Scalar>) {
    let n = g.rows();
    let mut m = g.clone();
    let mut p = Matrix::identity(n);
    let add_row_col = |m: &mut Matrix, p: &mut Matrix, dst: usize, src: usize, f: &Scalar| {
        for c in 0..n {
            let v = &m[(src, c)] * f;
            m[(dst, c)] += &v;
            let v = &p[(src, c)] * f;
            p[(dst, c)] += &v;
        }
        for r in 0..n {
            let v = &m[(r, src)] * f;
            m[(r, dst)] += &v;
        }
    };
    for k in 0..n {
        if m[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[(j, j)].is_zero()) {
                for c in 0..n {
                    m.swap((k, c), (j, c));
                    p.swap((k, c), (j, c));
                }
                for r in 0..n {
                    m.swap((r, k), (r, j));
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[(k, j)].is_zero()) {
                // With m_jj = 0 this makes m_kk = 1.
                let f = m[(k, j)].scale_int(2).inv().expect("nonzero");
                add_row_col(&mut m, &mut p, k, j, &f);
            }
        }
        if m[(k, k)].is_zero() {
            continue;
        }
        let inv = m[(k, k)].inv().expect("nonzero pivot");
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = -&(&m[(i, k)] * &inv);
            add_row_col(&mut m, &mut p, i, k, &f);
        }
    }
    let diag = (0..n).map(|i| m[(i, i)].clone()).collect();
    (p, diag)
}

/// Euclidean Clifford generators `{Γ^α, Γ^β} = 2δ^{αβ}` of size `2^⌊N/2⌋` (Jordan–Wigner).
pub fn euclidean_gammas(n: usize) -> Vec<Matrix> {
    let m = n / 2;
    let s = |rows: &[[(i64, i64); 2]; 2]| {
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&(re, im)| Scalar::from_parts((re, 1), (im, 1))).collect()).collect(),
        )
        .unwrap()
    };
    let sx = s(&[[(0, 0), (1, 0)], [(1, 0), (0, 0)]]);
    let sy = s(&[[(0, 0), (0, -1)], [(0, 1), (0, 0)]]);
    let sz = s(&[[(1, 0), (0, 0)], [(0, 0), (-1, 0)]]);
    let chain = |k: usize, mid: &Matrix| {
        let mut out = Matrix::identity(1);
        for _ in 0..k {
            out = out.kron(&sz);
        }
        out = out.kron(mid);
        for _ in k + 1..m {
            out = out.kron(&Matrix::identity(2));
        }
        out
    };
    let mut out = Vec::with_capacity(n);
    for k in 0..m {
        out.push(chain(k, &sx));
        out.push(chain(k, &sy));
    }
    if n % 2 == 1 {
        let mut last = Matrix::identity(1);
        for _ in 0..m {
            last = last.kron(&sz);
        }
        out.push(last);
    }
    out
}

/// Gamma matrices for `R = τ` and real symmetric `g` exactly congruent to a `±1` diagonal.
pub fn make_classical_gammas(sd: &StructureData) -> Result<GammaSet> {
    if !sd.is_r_tau() {
        return Err(Error::NotRTau);
    }
    let g = sd.g_matrix();
    let n = sd.n();
    if (0..n).any(|a| (0..n).any(|b| !g[(a, b)].is_real() || g[(a, b)] != g[(b, a)])) {
        return Err(Error::NonSymmetricMetric);
    }
    let (p, diag) = congruence_diagonalize(g);
    let mut q = Matrix::zeros(n, n);
    let mut lambda = Vec::with_capacity(n);
    for (i, d) in diag.iter().enumerate() {
        if d.is_zero() {
            return Err(Error::SingularMetric);
        }
        let abs = d.re.abs();
        let root = exact_sqrt(&abs)
            .ok_or_else(|| Error::NotSquareCongruent(format!("|d_{i}| = {abs} is not a rational square")))?;
        q[(i, i)] = Scalar::real(root);
        lambda.push(!d.re.is_negative());
    }
    // g = P⁻¹ D P⁻ᵀ = Sᵀ Λ S with S = Q P⁻ᵀ.
    let s = q.mul(&p.inverse()?.transpose());
    let base: Vec<Matrix> = euclidean_gammas(n)
        .into_iter()
        .zip(&lambda)
        .map(|(m, &pos)| if pos { m } else { m.scale(&Scalar::i()) })
        .collect();
    let d = base[0].rows();
    let gammas = (0..n)
        .map(|a| {
            let mut acc = Matrix::zeros(d, d);
            for (alpha, b) in base.iter().enumerate() {
                let c = &s[(alpha, a)];
                if !c.is_zero() {
                    acc = acc.add(&b.scale(c));
                }
            }
            acc
        })
        .collect();
    let set = GammaSet::new(gammas)?;
    let report = verify_gammas(sd, &set);
    if !report.all_passed() {
        let w = report.failures().next().and_then(|c| c.witness.clone()).unwrap_or_default();
        return Err(Error::GammaMismatch(w));
    }
    Ok(set)
}

/// A `𝒞`-valued spinor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinorPoly(pub Vec<NCPoly>);

/// `(∂̸φ)^r = Σ_{a,s} (γ^a)^r_s ∂_a φ^s`
pub fn dirac(calc: &Calculus, gs: &GammaSet, phi: &SpinorPoly) -> Result<SpinorPoly> {
    let d = gs.dim();
    if phi.0.len() != d {
        return Err(Error::Shape(format!("spinor has {} entries, gamma size is {d}", phi.0.len())));
    }
    if gs.len() != calc.n() {
        return Err(Error::Shape("gamma set does not match N".into()));
    }
    let partials: Vec<Vec<NCPoly>> = phi.0.iter().map(|p| calc.partials(p)).collect::<Result<_>>()?;
    let mut out = vec![NCPoly::zero(); d];
    for (a, g) in gs.matrices().iter().enumerate() {
        for (r, o) in out.iter_mut().enumerate() {
            for (s, ps) in partials.iter().enumerate() {
                let c = &g[(r, s)];
                if !c.is_zero() {
                    o.axpy(c, &ps[a]);
                }
            }
        }
    }
    Ok(SpinorPoly(out))
}

/// `∂̸∂̸φ = □φ` entrywise.
pub fn check_dirac_square(calc: &Calculus, gs: &GammaSet, phi: &SpinorPoly) -> core::result::Result<(), String> {
    let twice = lift_err(dirac(calc, gs, &lift_err(dirac(calc, gs, phi))?))?;
    for (r, (t, p)) in twice.0.iter().zip(&phi.0).enumerate() {
        let b = lift_err(box_op(calc, p))?;
        if *t != b {
            return Err(format!("component {r}: {t} vs {b}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalgebra::Word;
    use crate::structures::presets::*;
    use crate::structures::StructureParts;

    fn word(ix: &[usize]) -> NCPoly {
        NCPoly::word(Word::from_indices(ix))
    }

    fn with_metric(n: usize, g: Vec<Vec<i64>>) -> StructureData {
        StructureData::new(StructureParts {
            n,
            r: crate::structures::flip_matrix(n),
            z: Matrix::zeros(n * n, n),
            t: vec![Scalar::zero(); n * n],
            g: Matrix::from_rows(g.into_iter().map(|r| r.into_iter().map(Scalar::from_int).collect()).collect()).unwrap(),
            gammas: None,
            f_tilde: None,
            degree_cutoff: Some(4),
            star: Some(true),
        })
        .unwrap()
    }

    #[test]
    fn raised_and_box_classical() {
        let calc = Calculus::new(&classical_minkowski(4)).unwrap();
        assert_eq!(partial_up(&calc, 1, &NCPoly::generator(1)).unwrap(), NCPoly::constant(Scalar::from_int(-1)));
        assert!(partial_up(&calc, 2, &NCPoly::one()).unwrap().is_zero());
        assert_eq!(box_op(&calc, &word(&[0, 0])).unwrap(), NCPoly::constant(Scalar::from_int(2)));
        for i in 0..4 {
            assert!(box_op(&calc, &NCPoly::generator(i)).unwrap().is_zero());
        }
        let a = word(&[0, 1, 2]);
        for k in 0..4 {
            assert_eq!(
                box_op(&calc, &calc.partial(k, &a).unwrap()).unwrap(),
                calc.partial(k, &box_op(&calc, &a).unwrap()).unwrap()
            );
        }
        check_raised_exchange(&calc, &NCPoly::generator(0)).unwrap();
    }

    /// Boost generators need `Z^{kl}_r g^{rj} = -Z^{kj}_s g^{ls}` for the raised exchange rule;
    /// on one generator that forces `Z = 0`, so the lattice step breaks it.
    #[test]
    fn raised_exchange_needs_metric_compatible_z() {
        let calc = Calculus::new(&epsilon(Scalar::from_ratio(1, 2), 4)).unwrap();
        check_raised_exchange(&calc, &word(&[1, 3])).unwrap();
        let lat = Calculus::new(&lattice(Scalar::from_ratio(1, 2), 4)).unwrap();
        assert!(check_raised_exchange(&lat, &NCPoly::one()).is_ok());
        assert!(check_raised_exchange(&lat, &NCPoly::generator(0)).is_err());
    }

    #[test]
    fn classical_gamma_sets() {
        let gs = make_classical_gammas(&classical_minkowski(4)).unwrap();
        assert_eq!(gs.dim(), 4);
        assert!(gs.gamma(0).mul(gs.gamma(0)).is_identity());
        assert_eq!(gs.gamma(1).mul(gs.gamma(1)), Matrix::identity(4).scale(&Scalar::from_int(-1)));

        let one = make_classical_gammas(&with_metric(1, vec![vec![1]])).unwrap();
        assert_eq!((one.dim(), one.gamma(0).clone()), (1, Matrix::identity(1)));

        let two = make_classical_gammas(&with_metric(2, vec![vec![1, 0], vec![0, 1]])).unwrap();
        assert_eq!(two.dim(), 2);
        assert!(two.matrices().iter().all(|g| g.mul(g).is_identity()));
    }

    #[test]
    fn gammas_for_non_diagonal_metrics() {
        for g in [vec![vec![0, 1], vec![1, 0]], vec![vec![1, 2], vec![2, 0]], vec![vec![4, 0, 0], vec![0, 9, 0], vec![0, 0, -1]]] {
            let n = g.len();
            let sd = with_metric(n, g);
            let gs = make_classical_gammas(&sd).unwrap();
            assert!(verify_gammas(&sd, &gs).all_passed());
        }
        assert!(matches!(
            make_classical_gammas(&with_metric(1, vec![vec![2]])),
            Err(Error::NotSquareCongruent(_))
        ));
    }

    #[test]
    fn gamma_failures_have_witness() {
        let sd = classical_minkowski(4);
        let zero = GammaSet::new(vec![Matrix::zeros(4, 4); 4]).unwrap();
        let r = verify_gammas(&sd, &zero);
        assert!(!r.all_passed());
        assert!(r.checks[0].witness.as_ref().unwrap().contains("(a,b)=(0,0)"));
    }

    #[test]
    fn non_flip_is_rejected() {
        let mut parts = classical_minkowski(4).to_parts();
        parts.r = parts.r.scale(&Scalar::from_int(-1));
        let sd = StructureData::new(parts).unwrap();
        assert_eq!(make_classical_gammas(&sd), Err(Error::NotRTau));
    }

    #[test]
    fn dirac_examples() {
        let calc = Calculus::new(&classical_minkowski(4)).unwrap();
        let gs = make_classical_gammas(calc.structure()).unwrap();
        let phi = SpinorPoly(vec![word(&[0, 1]); 4]);
        check_dirac_square(&calc, &gs, &phi).unwrap();
        let constant = SpinorPoly(vec![NCPoly::constant(Scalar::i()); 4]);
        assert!(dirac(&calc, &gs, &constant).unwrap().0.iter().all(NCPoly::is_zero));
        // φ = (x⁰, 0, 0, 0) picks out the first column of γ⁰.
        let mut e = vec![NCPoly::zero(); 4];
        e[0] = NCPoly::generator(0);
        let out = dirac(&calc, &gs, &SpinorPoly(e)).unwrap();
        for r in 0..4 {
            assert_eq!(out.0[r], NCPoly::constant(gs.gamma(0)[(r, 0)].clone()));
        }
    }
}
