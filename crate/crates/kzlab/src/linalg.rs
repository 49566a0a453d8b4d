//! Thin dense-linear-algebra layer over `faer` for the small complex
//! matrices used throughout the crate (eigendecomposition, SVD, nullspaces,
//! least squares, characteristic polynomials).

use crate::{C64, CMat, CVec, KzError, Result};
use faer::complex_native::c64 as Fc64;
use ndarray::{Array1, Array2};

fn to_faer(a: &CMat) -> faer::Mat<Fc64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        Fc64::new(a[[i, j]].re, a[[i, j]].im)
    })
}

pub fn identity(n: usize) -> CMat {
    Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn frob(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a.dot(b) - b.dot(a)
}

/// Eigenvalues and eigenvectors (columns) of a general complex matrix.
pub fn eig(a: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(KzError::DimensionMismatch("eig of non-square".into()));
    }
    if n == 0 {
        return Ok((vec![], Array2::zeros((0, 0))));
    }
    let m = to_faer(a);
    let evd = m.eigendecomposition::<Fc64>();
    let s = evd.s().column_vector();
    let u = evd.u();
    let vals: Vec<C64> = (0..n)
        .map(|i| {
            let z = s.read(i);
            C64::new(z.re, z.im)
        })
        .collect();
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| {
        let z = u.read(i, j);
        C64::new(z.re, z.im)
    });
    Ok((vals, vecs))
}

pub fn eigvals(a: &CMat) -> Result<Vec<C64>> {
    Ok(eig(a)?.0)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return vec![];
    }
    let svd = to_faer(a).svd();
    let s = svd.s_diagonal();
    (0..s.nrows()).map(|i| s.read(i).re).collect()
}

/// Orthonormal basis (columns) of the right nullspace of `a`, with the rank
/// decided at `rel_tol` relative to the largest singular value.
pub fn nullspace(a: &CMat, rel_tol: f64) -> CMat {
    let ncols = a.ncols();
    if a.nrows() == 0 || ncols == 0 {
        return identity(ncols);
    }
    let svd = to_faer(a).svd();
    let s = svd.s_diagonal();
    let v = svd.v();
    let smax = if s.nrows() > 0 { s.read(0).re } else { 0.0 };
    let tol = rel_tol * smax.max(1e-300);
    let rank = (0..s.nrows()).take_while(|&i| s.read(i).re > tol).count();
    Array2::from_shape_fn((ncols, ncols - rank), |(i, j)| {
        let z = v.read(i, rank + j);
        C64::new(z.re, z.im)
    })
}

/// Least squares solution of `a x = b` via the SVD pseudo-inverse.
pub fn lstsq(a: &CMat, b: &CVec) -> Result<CVec> {
    if a.nrows() != b.len() {
        return Err(KzError::DimensionMismatch("lstsq shapes".into()));
    }
    if a.ncols() == 0 {
        return Ok(Array1::zeros(0));
    }
    let svd = to_faer(a).svd();
    let s = svd.s_diagonal();
    let u = svd.u();
    let v = svd.v();
    let k = s.nrows();
    let smax = s.read(0).re;
    let tol = 1e-13 * smax.max(1e-300);
    let mut x = Array1::<C64>::zeros(a.ncols());
    for r in 0..k {
        let sr = s.read(r).re;
        if sr <= tol {
            break;
        }
        // coefficient = (u_r^* b) / s_r
        let mut coef = C64::new(0.0, 0.0);
        for i in 0..a.nrows() {
            let z = u.read(i, r);
            coef += C64::new(z.re, -z.im) * b[i];
        }
        coef /= sr;
        for j in 0..a.ncols() {
            let z = v.read(j, r);
            x[j] += C64::new(z.re, z.im) * coef;
        }
    }
    Ok(x)
}

/// Least squares with a matrix right-hand side, column by column.
pub fn lstsq_mat(a: &CMat, b: &CMat) -> Result<CMat> {
    let mut out = Array2::zeros((a.ncols(), b.ncols()));
    for j in 0..b.ncols() {
        let col = lstsq(a, &b.column(j).to_owned())?;
        out.column_mut(j).assign(&col);
    }
    Ok(out)
}

/// Solve the square system `a x = b`.
pub fn solve(a: &CMat, b: &CVec) -> Result<CVec> {
    lstsq(a, b)
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    let mut inv = Array2::zeros((n, n));
    for j in 0..n {
        let mut e = Array1::zeros(n);
        e[j] = C64::new(1.0, 0.0);
        let col = solve(a, &e)?;
        inv.column_mut(j).assign(&col);
    }
    Ok(inv)
}

/// Condition number from the singular value spectrum.
pub fn condition_number(a: &CMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Monic characteristic polynomial coefficients `c[0] + c[1] x + ... + x^n`
/// by the Faddeev-LeVerrier recursion.
pub fn char_poly(a: &CMat) -> Vec<C64> {
    let n = a.nrows();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    let mut m = identity(n);
    for k in 1..=n {
        let am = a.dot(&m);
        let tr: C64 = (0..n).map(|i| am[[i, i]]).sum();
        let c = -tr / (k as f64);
        coeffs[n - k] = c;
        m = am + c * identity(n);
    }
    coeffs
}

/// Minimal max-distance matching between two eigenvalue multisets of equal
/// size (brute force over permutations; intended for small spectra).
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    if n <= 7 {
        use itertools::Itertools;
        (0..n)
            .permutations(n)
            .map(|perm| {
                (0..n)
                    .map(|i| (a[i] - b[perm[i]]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    } else {
        // greedy fallback for larger spectra
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for &x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, &y)| (j, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }
}

/// Modified Gram-Schmidt; drops vectors whose residual falls below
/// `rel_tol` times their original norm. Vectors are rows of the input.
pub fn orthonormalize_rows(vectors: &CMat, rel_tol: f64) -> CMat {
    let mut kept: Vec<Array1<C64>> = Vec::new();
    for row in vectors.rows() {
        let orig = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if orig == 0.0 {
            continue;
        }
        let mut v = row.to_owned();
        for _ in 0..2 {
            for u in &kept {
                let proj: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v = v - u.mapv(|z| z * proj);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > rel_tol * orig {
            kept.push(v.mapv(|z| z / norm));
        }
    }
    let n = vectors.ncols();
    let mut out = Array2::zeros((kept.len(), n));
    for (i, v) in kept.iter().enumerate() {
        out.row_mut(i).assign(v);
    }
    out
}
