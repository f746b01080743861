//! Dense complex floating-point matrices: LU inverse, complex Schur form, eigenvectors and
//! analytic matrix functions.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = CMatrix::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { n: self.n, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.n, |i, j| self[(j, i)])
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n).map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// LU with partial pivoting; `None` when a pivot underflows.
    pub fn inverse(&self) -> Option<CMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))?;
            if a[(p, k)].norm() <= 1e-300 * scale || a[(p, k)].norm() == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                    inv.data.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[(k, k)].inv();
            for j in 0..n {
                a.data[k * n + j] *= piv;
                inv.data[k * n + j] *= piv;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let (ak, ik) = (a.data[k * n + j], inv.data[k * n + j]);
                    a.data[i * n + j] -= f * ak;
                    inv.data[i * n + j] -= f * ik;
                }
            }
        }
        Some(inv)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// `A = Z T Z*` with `T` upper triangular, `Z` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: CMatrix,
    pub z: CMatrix,
}

/// Householder reduction to upper Hessenberg form: returns `(H, Q)` with `A = Q H Q*`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { C64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] += phase * norm;
        let vn: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for c in v.iter_mut() {
            *c /= vn;
        }
        // H ← P H P with P = I - 2vv* acting on rows/cols k+1..n.
        for j in 0..n {
            let s: C64 = v.iter().enumerate().map(|(t, vt)| vt.conj() * h[(k + 1 + t, j)]).sum();
            for (t, vt) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= 2.0 * vt * s;
            }
        }
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: C64 = v.iter().enumerate().map(|(t, vt)| m[(i, k + 1 + t)] * vt).sum();
                for (t, vt) in v.iter().enumerate() {
                    m[(i, k + 1 + t)] -= 2.0 * s * vt.conj();
                }
            }
        }
    }
    (h, q)
}

/// `(c, s)` with `[[c, s], [-s̄, c]] (a, b)ᵀ = (r, 0)ᵀ`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if a.norm() == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    let c = a.norm() / r;
    (c, (a / a.norm()) * b.conj() / r)
}

/// Complex Schur decomposition by shifted QR on the Hessenberg form.
pub fn schur(a: &CMatrix) -> Option<Schur> {
    let n = a.dim();
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Some(Schur { t: h, z });
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { h.norm1() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n {
            return None;
        }
        let (aa, bb, cc, dd) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break cycles.
            dd + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            let tr2 = (aa + dd) * 0.5;
            let disc = ((aa - dd) * 0.5 * ((aa - dd) * 0.5) + bb * cc).sqrt();
            let (e1, e2) = (tr2 + disc, tr2 - disc);
            if (e1 - dd).norm() < (e2 - dd).norm() { e1 } else { e2 }
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let (x, y) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let rows = (k + 2).min(hi) + 1;
            for i in 0..rows {
                let (x, y) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let (x, y) = (z[(i, k)], z[(i, k + 1)]);
                z[(i, k)] = x * c + y * s.conj();
                z[(i, k + 1)] = -x * s + y * c;
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Some(Schur { t: h, z })
}

/// Eigenvalues and unit eigenvectors (columns of `V`) of a diagonalizable matrix.
pub fn eigen(a: &CMatrix) -> Option<(Vec<C64>, CMatrix)> {
    let n = a.dim();
    let Schur { t, z } = schur(a)?;
    // Floor keeps |den|² representable in complex division.
    let small = (f64::EPSILON * t.norm1()).max(1e-150);
    let mut y = CMatrix::zeros(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[(j, k)]).sum();
            let mut den = t[(i, i)] - lambda;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            y[(i, k)] = -s / den;
        }
    }
    let mut v = z.mul(&y);
    for k in 0..n {
        let norm: f64 = (0..n).map(|i| v[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                v[(i, k)] /= norm;
            }
        }
    }
    Some(((0..n).map(|k| t[(k, k)]).collect(), v))
}

/// Condition number bound above which the eigenvector route is abandoned.
pub const EIGEN_CONDITION_LIMIT: f64 = 1e8;

/// `f(A) = V f(Λ) V⁻¹` when `A` is diagonalizable with well-conditioned `V`.
pub fn eigen_function(a: &CMatrix, f: impl Fn(C64) -> C64) -> Option<CMatrix> {
    let (vals, v) = eigen(a)?;
    let vinv = v.inverse()?;
    if v.norm1() * vinv.norm1() > EIGEN_CONDITION_LIMIT {
        return None;
    }
    let fl: Vec<C64> = vals.into_iter().map(f).collect();
    Some(v.mul(&CMatrix::diag(&fl)).mul(&vinv))
}

/// `e^A` by scaling and squaring with a Taylor series truncated once terms fall below `1e-18`.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let norm = a.norm1();
    let mut s = 0i32;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let b = a.scale(C64::new(2f64.powi(-s), 0.0));
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=40 {
        term = term.mul(&b).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.norm1() <= 1e-18 * sum.norm1() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

/// `ρ(z) = (e^z - 1)/z`, with the series near zero.
pub fn scalar_rho(z: C64) -> C64 {
    if z.norm() < 0.1 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..=14 {
            term = term * z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `h(z) = ρ(-z) ρ(z)`
pub fn scalar_h(z: C64) -> C64 {
    scalar_rho(-z) * scalar_rho(z)
}

/// `ρ(X)` as the top-right block of `exp([[X, 1], [0, 0]])`.
pub fn rho_series(x: &CMatrix) -> CMatrix {
    let n = x.dim();
    let mut aug = CMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = x[(i, j)];
        }
        aug[(i, n + i)] = C64::new(1.0, 0.0);
    }
    let e = expm(&aug);
    CMatrix::from_fn(n, |i, j| e[(i, n + j)])
}

/// How a matrix function is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MatrixFunctionMethod {
    /// Eigendecomposition, falling back to the series when `V` is ill conditioned.
    #[default]
    Auto,
    Eigen,
    Series,
}

/// `ρ(X) = Σ X^{k-1}/k!`
pub fn matrix_rho_with(x: &CMatrix, method: MatrixFunctionMethod) -> CMatrix {
    match method {
        MatrixFunctionMethod::Series => rho_series(x),
        MatrixFunctionMethod::Eigen | MatrixFunctionMethod::Auto => {
            eigen_function(x, scalar_rho).unwrap_or_else(|| rho_series(x))
        }
    }
}

/// `h(X) = ρ(-X) ρ(X)`
pub fn matrix_h_with(x: &CMatrix, method: MatrixFunctionMethod) -> CMatrix {
    match method {
        MatrixFunctionMethod::Series => rho_series(&x.scale(C64::new(-1.0, 0.0))).mul(&rho_series(x)),
        MatrixFunctionMethod::Eigen | MatrixFunctionMethod::Auto => eigen_function(x, scalar_h)
            .unwrap_or_else(|| rho_series(&x.scale(C64::new(-1.0, 0.0))).mul(&rho_series(x))),
    }
}

pub fn matrix_rho(x: &CMatrix) -> CMatrix {
    matrix_rho_with(x, MatrixFunctionMethod::Auto)
}

pub fn matrix_h(x: &CMatrix) -> CMatrix {
    matrix_h_with(x, MatrixFunctionMethod::Auto)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random(n: usize, rng: &mut ChaCha8Rng, re: bool, im: bool) -> CMatrix {
        CMatrix::from_fn(n, |_, _| {
            let a = if re { rng.gen_range(-1.0..1.0) } else { 0.0 };
            let b = if im { rng.gen_range(-1.0..1.0) } else { 0.0 };
            c(a, b)
        })
    }

    #[test]
    fn inverse_and_schur() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            let a = random(n, &mut rng, true, true);
            let inv = a.inverse().unwrap();
            assert!(a.mul(&inv).max_abs_diff(&CMatrix::identity(n)) < 1e-10);
            let Schur { t, z } = schur(&a).unwrap();
            let zt = CMatrix::from_fn(n, |i, j| z[(j, i)].conj());
            assert!(z.mul(&t).mul(&zt).max_abs_diff(&a) < 1e-10);
            assert!(zt.mul(&z).max_abs_diff(&CMatrix::identity(n)) < 1e-12);
        }
        assert!(CMatrix::zeros(2).inverse().is_none());
    }

    #[test]
    fn eigenpairs_of_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let a = random(n, &mut rng, true, false);
            let (vals, v) = eigen(&a).unwrap();
            for k in 0..n {
                let col: Vec<C64> = (0..n).map(|i| v[(i, k)]).collect();
                let av = a.mul_vec(&col);
                for i in 0..n {
                    assert!((av[i] - vals[k] * col[i]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rho_examples() {
        assert!(matrix_rho(&CMatrix::zeros(3)).max_abs_diff(&CMatrix::identity(3)) < 1e-15);
        let d = [c(0.3, 0.0), c(-1.2, 0.5), c(0.0, 2.0)];
        let r = matrix_rho(&CMatrix::diag(&d));
        for (i, z) in d.iter().enumerate() {
            assert!((r[(i, i)] - (z.exp() - 1.0) / z).norm() < 1e-14);
        }
        // [[0,a],[a,0]] = P diag(a,-a) P⁻¹ with P = [[1,1],[1,-1]].
        let a = 0.7;
        let x = CMatrix::from_fn(2, |i, j| if i != j { c(a, 0.0) } else { c(0.0, 0.0) });
        let (p, m) = (scalar_rho(c(a, 0.0)), scalar_rho(c(-a, 0.0)));
        let want = CMatrix::from_fn(2, |i, j| if i == j { (p + m) / 2.0 } else { (p - m) / 2.0 });
        assert!(matrix_rho(&x).max_abs_diff(&want) < 1e-14);
        assert!(rho_series(&x).max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn h_examples() {
        assert!(matrix_h(&CMatrix::zeros(2)).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
        for y in [0.01, 0.5, 3.0] {
            let h = matrix_h(&CMatrix::diag(&[c(0.0, y)]));
            let want = ((y / 2.0).sin() / (y / 2.0)).powi(2);
            assert!((h[(0, 0)] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn defective_matrix_uses_series() {
        // Jordan block: eigenvectors are parallel.
        let x = CMatrix::from_fn(2, |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let r = matrix_rho(&x);
        // ρ(N) = 1 + N/2 for N² = 0.
        let want = CMatrix::from_fn(2, |i, j| if i == j { c(1.0, 0.0) } else if j == i + 1 { c(0.5, 0.0) } else { c(0.0, 0.0) });
        assert!(r.max_abs_diff(&want) < 1e-14);
    }

    proptest! {
        #[test]
        fn h_is_even_and_factorizes(seed in 0u64..1000, n in 1usize..5, imag in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random(n, &mut rng, !imag, imag);
            let neg = x.scale(c(-1.0, 0.0));
            prop_assert!(matrix_h(&x).max_abs_diff(&matrix_h(&neg)) < 1e-12);
            let prod = matrix_rho(&neg).mul(&matrix_rho(&x));
            prop_assert!(prod.max_abs_diff(&matrix_h(&x)) < 1e-12);
            prop_assert!(matrix_rho_with(&x, MatrixFunctionMethod::Series).max_abs_diff(&matrix_rho(&x)) < 1e-12);
        }
    }
}
