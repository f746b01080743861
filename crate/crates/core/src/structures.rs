//! Structure data `(N, R, Z, T, g[, γ])` of a quantum space and its matrix-level validation.
//!
//! Index conventions: generators are numbered `0..N`, and a pair `(i, j)` is flattened
//! row-major to `i·N + j`. `R^{ij}_{kl}` is stored at `r[(iN+j, kN+l)]`, `Z^{ij}_k` at
//! `z[(iN+j, k)]`, `T^{ij}` at `t[iN+j]`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, SparseVec};
use crate::report::{Check, ValidationReport};
use crate::scalar::Scalar;

pub const DEFAULT_DEGREE_CUTOFF: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureData {
    n: usize,
    r: Matrix,
    z: Matrix,
    t: Vec<Scalar>,
    g: Matrix,
    g_inv: Matrix,
    gammas: Option<Vec<Matrix>>,
    f_tilde: Option<Matrix>,
    degree_cutoff: usize,
    star: bool,
    /// For each input pair `(a, b)`, the nonzero `R^{ij}_{ab}` as `(i·N+j, value)`.
    r_columns: Vec<Vec<(usize, Scalar)>>,
}

/// Raw tensors for [`StructureData::new`].
#[derive(Clone, Debug)]
pub struct StructureParts {
    pub n: usize,
    pub r: Matrix,
    pub z: Matrix,
    pub t: Vec<Scalar>,
    pub g: Matrix,
    pub gammas: Option<Vec<Matrix>>,
    pub f_tilde: Option<Matrix>,
    pub degree_cutoff: Option<usize>,
    pub star: Option<bool>,
}

impl StructureData {
    pub fn new(parts: StructureParts) -> Result<Self> {
        let StructureParts { n, r, z, t, g, gammas, f_tilde, degree_cutoff, star } = parts;
        if n == 0 {
            return Err(Error::Shape("N must be positive".into()));
        }
        if n > u8::MAX as usize {
            return Err(Error::Shape(format!("N = {n} exceeds {}", u8::MAX)));
        }
        let nn = n * n;
        expect_shape("r", &r, nn, nn)?;
        expect_shape("z", &z, nn, n)?;
        expect_shape("g", &g, n, n)?;
        if t.len() != nn {
            return Err(Error::Shape(format!("t has {} entries, expected {nn}", t.len())));
        }
        if let Some(gs) = &gammas {
            if gs.len() != n {
                return Err(Error::Shape(format!("{} gamma matrices, expected {n}", gs.len())));
            }
            let d = gs.first().map_or(0, Matrix::rows);
            for (a, gm) in gs.iter().enumerate() {
                expect_shape(&format!("gammas[{a}]"), gm, d, d)?;
            }
        }
        if let Some(f) = &f_tilde {
            expect_shape("f_tilde", f, n * n * n, n)?;
        }
        let degree_cutoff = degree_cutoff.unwrap_or(DEFAULT_DEGREE_CUTOFF);
        if degree_cutoff == 0 {
            return Err(Error::Shape("degree_cutoff must be positive".into()));
        }
        let g_inv = g.inverse().map_err(|_| Error::SingularMetric)?;
        let mut r_columns = vec![Vec::new(); nn];
        for row in 0..nn {
            for (col, entries) in r_columns.iter_mut().enumerate() {
                let v = &r[(row, col)];
                if !v.is_zero() {
                    entries.push((row, v.clone()));
                }
            }
        }
        Ok(StructureData {
            n,
            r,
            z,
            t,
            g,
            g_inv,
            gammas,
            f_tilde,
            degree_cutoff,
            star: star.unwrap_or(true),
            r_columns,
        })
    }

    pub fn to_parts(&self) -> StructureParts {
        StructureParts {
            n: self.n,
            r: self.r.clone(),
            z: self.z.clone(),
            t: self.t.clone(),
            g: self.g.clone(),
            gammas: self.gammas.clone(),
            f_tilde: self.f_tilde.clone(),
            degree_cutoff: Some(self.degree_cutoff),
            star: Some(self.star),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_cutoff(&self) -> usize {
        self.degree_cutoff
    }

    /// Same structure with a different symbolic degree cutoff.
    pub fn with_degree_cutoff(&self, d: usize) -> Self {
        let mut s = self.clone();
        s.degree_cutoff = d;
        s
    }

    /// Whether the star structure (and the metric conditions it brings) is requested.
    pub fn star(&self) -> bool {
        self.star
    }

    pub fn r_matrix(&self) -> &Matrix {
        &self.r
    }

    pub fn z_matrix(&self) -> &Matrix {
        &self.z
    }

    pub fn t_vector(&self) -> &[Scalar] {
        &self.t
    }

    pub fn g_matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn g_inv_matrix(&self) -> &Matrix {
        &self.g_inv
    }

    pub fn gammas(&self) -> Option<&[Matrix]> {
        self.gammas.as_deref()
    }

    pub fn f_tilde(&self) -> Option<&Matrix> {
        self.f_tilde.as_ref()
    }

    #[inline]
    pub fn pair(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    /// `R^{ij}_{kl}`
    #[inline]
    pub fn r(&self, i: usize, j: usize, k: usize, l: usize) -> &Scalar {
        &self.r[(self.pair(i, j), self.pair(k, l))]
    }

    /// `Z^{ij}_k`
    #[inline]
    pub fn z(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.z[(self.pair(i, j), k)]
    }

    /// `T^{ij}`
    #[inline]
    pub fn t(&self, i: usize, j: usize) -> &Scalar {
        &self.t[self.pair(i, j)]
    }

    /// `g^{ab}`
    #[inline]
    pub fn g(&self, a: usize, b: usize) -> &Scalar {
        &self.g[(a, b)]
    }

    /// `g_{ab}`, the inverse metric.
    #[inline]
    pub fn g_lower(&self, a: usize, b: usize) -> &Scalar {
        &self.g_inv[(a, b)]
    }

    /// Nonzero `R^{ij}_{ab}` for fixed `(a, b)`, as `(i·N+j, value)`.
    pub fn r_column(&self, a: usize, b: usize) -> &[(usize, Scalar)] {
        &self.r_columns[self.pair(a, b)]
    }

    pub fn is_r_tau(&self) -> bool {
        self.r == flip_matrix(self.n)
    }

    pub fn z_is_zero(&self) -> bool {
        self.z.is_zero()
    }

    /// `(RZ)^{jk}_b = R^{jk}_{mn} Z^{mn}_b`
    pub fn rz(&self, j: usize, k: usize, b: usize) -> Scalar {
        let mut acc = Scalar::zero();
        for m in 0..self.n {
            for n in 0..self.n {
                let r = self.r(j, k, m, n);
                let z = self.z(m, n, b);
                if !r.is_zero() && !z.is_zero() {
                    acc += &(r * z);
                }
            }
        }
        acc
    }

    /// Apply `R` at tensor positions `(k, k+1)` of a vector on `(C^N)^{⊗n}`.
    pub fn apply_r_at(&self, v: &SparseVec, n: usize, k: usize) -> SparseVec {
        assert!(k + 1 < n);
        let big = self.n.pow((n - k - 2) as u32);
        let block = self.n * self.n * big;
        let mut out = SparseVec::new();
        for (idx, c) in v.iter() {
            let hi = idx / block;
            let rem = idx % block;
            let ab = rem / big;
            let lo = rem % big;
            for (ij, r) in &self.r_columns[ab] {
                out.add_term((hi * self.n * self.n + ij) * big + lo, &(c * r));
            }
        }
        out
    }
}

fn expect_shape(name: &str, m: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::Shape(format!(
            "{name} is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// The flip `τ` on `C^N ⊗ C^N`: `τ^{ij}_{kl} = δ^i_l δ^j_k`.
pub fn flip_matrix(n: usize) -> Matrix {
    let mut r = Matrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            r[(i * n + j, j * n + i)] = Scalar::one();
        }
    }
    r
}

fn fmt_residual(s: &Scalar) -> String {
    format!("residual {}", s)
}

/// Exact matrix-level consistency checks. Failures are report entries, not errors.
pub fn validate(sd: &StructureData) -> ValidationReport {
    let n = sd.n;
    let nn = n * n;
    let mut report = ValidationReport::new();

    // (a) R^2 = 1
    let r2 = sd.r.mul(&sd.r);
    report.push(match r2.first_difference(&Matrix::identity(nn)) {
        None => Check::pass("R^2 = 1"),
        Some((row, col, d)) => {
            let (i, j, k, l) = (row / n, row % n, col / n, col % n);
            Check::fail("R^2 = 1", format!("(R^2)^{{{i}{j}}}_{{{k}{l}}}: {}", fmt_residual(&d)))
        }
    });

    // (b) RT = -T
    let rt = sd.r.mul_vec(&sd.t);
    let bad = (0..nn).find_map(|p| {
        let d = &rt[p] + &sd.t[p];
        (!d.is_zero()).then_some((p, d))
    });
    report.push(match bad {
        None => Check::pass("RT = -T"),
        Some((p, d)) => Check::fail("RT = -T", format!("(RT+T)^{{{}{}}}: {}", p / n, p % n, fmt_residual(&d))),
    });

    // (c) A3 (Z⊗1 - 1⊗Z) T = 0
    let mut v = SparseVec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut acc = Scalar::zero();
                for a in 0..n {
                    acc += &(sd.z(i, j, a) * sd.t(a, k));
                    acc -= &(sd.z(j, k, a) * sd.t(i, a));
                }
                v.add_term((i * n + j) * n + k, &acc);
            }
        }
    }
    let a3v = a3_apply(sd, &v);
    report.push(match a3v.first() {
        None => Check::pass("A3 (Z⊗1 - 1⊗Z) T = 0"),
        Some((idx, d)) => Check::fail(
            "A3 (Z⊗1 - 1⊗Z) T = 0",
            format!("component ({},{},{}): {}", idx / nn, (idx / n) % n, idx % n, fmt_residual(d)),
        ),
    });

    // (d) Rg = g, g read as a vector in C^{N^2}
    let gvec: Vec<Scalar> = (0..nn).map(|p| sd.g(p / n, p % n).clone()).collect();
    let rg = sd.r.mul_vec(&gvec);
    let bad = (0..nn).find_map(|p| {
        let d = &rg[p] - &gvec[p];
        (!d.is_zero()).then_some((p, d))
    });
    report.push(match bad {
        None => Check::pass("Rg = g"),
        Some((p, d)) => Check::fail("Rg = g", format!("(Rg-g)^{{{}{}}}: {}", p / n, p % n, fmt_residual(&d))),
    });

    if sd.star {
        // (e) g̃ = g with g̃^{ij} = conj(g^{ji})
        let bad = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find_map(|(i, j)| {
            let d = sd.g(i, j) - &sd.g(j, i).conj();
            (!d.is_zero()).then_some((i, j, d))
        });
        report.push(match bad {
            None => Check::pass("g~ = g"),
            Some((i, j, d)) => Check::fail("g~ = g", format!("(i,j)=({i},{j}): {}", fmt_residual(&d))),
        });

        // (f) Z^{kl}_r g^{rj} = -Z^{kj}_s g^{ls}, only where it is derived (R = τ)
        if sd.is_r_tau() {
            report.push(Check::from_result("Z^{kl}_r g^{rj} = -Z^{kj}_s g^{ls}", z_metric_residual(sd)));
        }
    }

    if let Some(f) = &sd.f_tilde {
        report.push(match f.first_difference(&Matrix::zeros(f.rows(), f.cols())) {
            None => Check::pass("F~ = 0"),
            Some((row, m, d)) => Check::fail(
                "F~ = 0",
                format!("F~^{{{}{}{}}}_{m}: {}", row / nn, (row / n) % n, row % n, fmt_residual(&d)),
            ),
        });
    }
    report
}

/// Residual of `Z^{kl}_r g^{rj} + Z^{kj}_s g^{ls}` at the first nonzero `(k, l, j)`.
pub fn z_metric_residual(sd: &StructureData) -> Result<(), String> {
    let n = sd.n;
    for k in 0..n {
        for l in 0..n {
            for j in 0..n {
                let mut acc = Scalar::zero();
                for r in 0..n {
                    acc += &(sd.z(k, l, r) * sd.g(r, j));
                    acc += &(sd.z(k, j, r) * sd.g(l, r));
                }
                if !acc.is_zero() {
                    return Err(format!("(k,l,j)=({k},{l},{j}): {}", fmt_residual(&acc)));
                }
            }
        }
    }
    Ok(())
}

/// `A3 v` for `v` on `(C^N)^{⊗3}`.
fn a3_apply(sd: &StructureData, v: &SparseVec) -> SparseVec {
    let r1 = |x: &SparseVec| sd.apply_r_at(x, 3, 0);
    let r2 = |x: &SparseVec| sd.apply_r_at(x, 3, 1);
    let mut out = v.clone();
    let one = Scalar::one();
    let m_one = -&one;
    out.axpy(&m_one, &r1(v));
    out.axpy(&m_one, &r2(v));
    out.axpy(&one, &r1(&r2(v)));
    out.axpy(&one, &r2(&r1(v)));
    out.axpy(&m_one, &r1(&r2(&r1(v))));
    out
}

/// Ready-made structures used by the shipped fixtures and the test suites.
pub mod presets {
    use super::*;

    fn diag(entries: &[i64]) -> Matrix {
        let mut g = Matrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            g[(i, i)] = Scalar::from_int(e);
        }
        g
    }

    fn build(n: usize, r: Matrix, z: Matrix, g: Matrix, cutoff: usize, star: bool) -> StructureData {
        StructureData::new(StructureParts {
            n,
            r,
            z,
            t: vec![Scalar::zero(); n * n],
            g,
            gammas: None,
            f_tilde: None,
            degree_cutoff: Some(cutoff),
            star: Some(star),
        })
        .expect("preset structure is well formed")
    }

    /// Commutative Minkowski space: `R = τ`, `Z = T = 0`, `g = diag(1,-1,-1,-1)`.
    pub fn classical_minkowski(cutoff: usize) -> StructureData {
        build(4, flip_matrix(4), Matrix::zeros(16, 4), diag(&[1, -1, -1, -1]), cutoff, true)
    }

    /// One-dimensional lattice calculus `x dx = dx x + l dx`: `N = 1`, `R = [1]`, `Z = [l]`.
    pub fn lattice(l: Scalar, cutoff: usize) -> StructureData {
        let mut z = Matrix::zeros(1, 1);
        z[(0, 0)] = l;
        build(1, Matrix::identity(1), z, diag(&[1]), cutoff, false)
    }

    /// `R = τ` Minkowski space with `Z^{13}_0 = Z^{10}_3 = iε/2`.
    pub fn epsilon(eps: Scalar, cutoff: usize) -> StructureData {
        let half = &(&eps * &Scalar::i()) * &Scalar::from_ratio(1, 2);
        let mut z = Matrix::zeros(16, 4);
        z[(4 + 3, 0)] = half.clone();
        z[(4, 3)] = half;
        build(4, flip_matrix(4), z, diag(&[1, -1, -1, -1]), cutoff, true)
    }

    /// `N = 2`, `R = τ`, `Z^{01}_0 = Z^{11}_0 = Z^{00}_1 = Z^{10}_1 = c`, `g = diag(1,-1)`.
    ///
    /// Coordinates satisfy `x¹x⁰ = x⁰x¹ - c x⁰ + c x¹`; the `Z` matrices act as a boost, so the
    /// calculus is well defined and metric compatible.
    pub fn n2twist(c: Scalar, cutoff: usize) -> StructureData {
        let mut z = Matrix::zeros(4, 2);
        z[(1, 0)] = c.clone();
        z[(3, 0)] = c.clone();
        z[(0, 1)] = c.clone();
        z[(2, 1)] = c;
        build(2, flip_matrix(2), z, diag(&[1, -1]), cutoff, true)
    }

    /// `N = 2`, `R = τ`, only `Z^{01}_0 = c`: `x¹x⁰ = x⁰x¹ - c x⁰`. Its derivative
    /// homomorphism is not well defined for `c ≠ 0`.
    pub fn n2_bare(c: Scalar, cutoff: usize) -> StructureData {
        let mut z = Matrix::zeros(4, 2);
        z[(1, 0)] = c;
        build(2, flip_matrix(2), z, Matrix::identity(2), cutoff, false)
    }
}

#[cfg(test)]
mod tests {
    use super::presets::*;
    use super::*;

    #[test]
    fn classical_passes_all_checks() {
        let sd = classical_minkowski(4);
        let rep = validate(&sd);
        assert!(rep.all_passed(), "{rep}");
        assert_eq!(rep.checks.len(), 6);
        assert_eq!(rep.summary(), "6/6 checks passed");
    }

    #[test]
    fn doubled_flip_fails_r_squared() {
        let mut parts = classical_minkowski(4).to_parts();
        parts.r = parts.r.scale(&Scalar::from_int(2));
        let rep = validate(&StructureData::new(parts).unwrap());
        let a = &rep.checks[0];
        assert_eq!(a.name, "R^2 = 1");
        assert!(!a.passed);
        assert!(a.witness.as_ref().unwrap().contains("residual 3"));
    }

    #[test]
    fn singular_metric_rejected() {
        let mut parts = classical_minkowski(4).to_parts();
        parts.g = Matrix::zeros(4, 4);
        assert_eq!(StructureData::new(parts), Err(Error::SingularMetric));
    }

    /// Brute force over all `(k, l, j)`: the two prescribed entries of the ε fixture are
    /// closed under the metric constraint, so no further `Z` entries are forced.
    #[test]
    fn epsilon_fixture_constraint_solved_by_enumeration() {
        let eps = Scalar::from_ratio(1, 2);
        let sd = epsilon(eps, 4);
        let n = 4;
        let mut forced = Vec::new();
        for k in 0..n {
            for l in 0..n {
                for j in 0..n {
                    // with diagonal g the constraint pairs Z^{kl}_j and Z^{kj}_l
                    let lhs = sd.z(k, l, j) * sd.g(j, j);
                    let rhs = -&(sd.z(k, j, l) * sd.g(l, l));
                    if lhs != rhs {
                        forced.push((k, l, j));
                    }
                }
            }
        }
        assert!(forced.is_empty(), "{forced:?}");
        let rep = validate(&sd);
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn lattice_and_twist_validate() {
        assert!(validate(&lattice(Scalar::from_ratio(1, 3), 4)).all_passed());
        let rep = validate(&n2twist(Scalar::from_parts((0, 1), (1, 2)), 4));
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn projectors_from_involutive_r() {
        for sd in [classical_minkowski(2), epsilon(Scalar::one(), 2), n2twist(Scalar::i(), 2)] {
            let nn = sd.n() * sd.n();
            let half = Scalar::from_ratio(1, 2);
            let id = Matrix::identity(nn);
            let p = id.sub(sd.r_matrix()).scale(&half);
            let q = id.add(sd.r_matrix()).scale(&half);
            assert_eq!(p.mul(&p), p);
            assert_eq!(q.mul(&q), q);
            assert!(p.add(&q).is_identity());
        }
    }

    #[test]
    fn validate_is_deterministic() {
        let sd = epsilon(Scalar::from_ratio(1, 2), 3);
        assert_eq!(validate(&sd), validate(&sd));
    }

    #[test]
    fn nonzero_f_tilde_fails() {
        let mut parts = classical_minkowski(4).to_parts();
        let mut f = Matrix::zeros(64, 4);
        f[(5, 2)] = Scalar::one();
        parts.f_tilde = Some(f);
        let rep = validate(&StructureData::new(parts).unwrap());
        assert!(!rep.checks.last().unwrap().passed);
    }
}
