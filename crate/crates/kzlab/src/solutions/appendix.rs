//! Closed-form hypergeometric sections of the four-point KZ system on
//! `C[S_2]`: a two-parameter family `(f, g)` built from `₂F₁` in the
//! cross-ratio `u = z₁₄z₃₂ / (z₁₂z₃₄)`.

use crate::solutions::hyp2f1::{hyp2f1, hyp2f1_deriv};
use crate::{C64, CVec, KzError, Result};

#[derive(Debug, Clone, Copy)]
pub struct AppendixParams {
    pub t: C64,
    pub hbar: C64,
    pub c1: C64,
    pub c2: C64,
}

fn zij(z: &[C64], i: usize, j: usize) -> C64 {
    z[i - 1] - z[j - 1]
}

fn pow(base: C64, exp: C64) -> C64 {
    (exp * base.ln()).exp()
}

/// The cross-ratio `u = z₁₄ z₃₂ / (z₁₂ z₃₄)`.
pub fn cross_ratio(z: &[C64]) -> C64 {
    zij(z, 1, 4) * zij(z, 3, 2) / (zij(z, 1, 2) * zij(z, 3, 4))
}

/// `A(u)` and its `u`-derivative.
fn a_and_deriv(p: &AppendixParams, u: C64) -> Result<(C64, C64)> {
    let one = C64::new(1.0, 0.0);
    let delta = p.t * p.hbar;
    let (a1, b1, c1p) = (one - p.hbar - delta, one + p.hbar - delta, 2.0 * one - delta);
    let f1 = hyp2f1(a1, b1, c1p, u)?;
    let f1d = hyp2f1_deriv(a1, b1, c1p, u)?;
    let f2 = hyp2f1(-p.hbar, p.hbar, delta, u)?;
    let f2d = hyp2f1_deriv(-p.hbar, p.hbar, delta, u)?;
    let upow = pow(u, one - delta);
    let a = p.c1 * upow * f1 + p.c2 * f2;
    let da = p.c1 * ((one - delta) * upow / u * f1 + upow * f1d) + p.c2 * f2d;
    Ok((a, da))
}

/// The section `(f, g)` at a configuration `z = (z₁, z₂, z₃, z₄)`:
/// `f = A / (z₁₃^Δ z₂₄^Δ)`, `g = B / (z₁₄^Δ z₂₃^Δ)` with
/// `B = h⁻¹ z₁₄^Δ z₂₃^{Δ−1} z₁₃^{1−Δ} z₂₄^{−Δ} z₁₂ ∂₁A`.
pub fn section(p: &AppendixParams, z: &[C64]) -> Result<(C64, C64)> {
    if z.len() != 4 {
        return Err(KzError::DimensionMismatch(format!(
            "appendix section needs 4 points, got {}",
            z.len()
        )));
    }
    for i in 1..=4 {
        for j in (i + 1)..=4 {
            if zij(z, i, j).norm() < 1e-12 {
                return Err(KzError::CoincidentPoints(format!("z{i} = z{j}")));
            }
        }
    }
    let delta = p.t * p.hbar;
    let one = C64::new(1.0, 0.0);
    let u = cross_ratio(z);
    let (a, da) = a_and_deriv(p, u)?;
    // ∂₁u = u (1/z₁₄ − 1/z₁₂)
    let du1 = u * (one / zij(z, 1, 4) - one / zij(z, 1, 2));
    let d1a = da * du1;
    let b = (one / p.hbar)
        * pow(zij(z, 1, 4), delta)
        * pow(zij(z, 2, 3), delta - one)
        * pow(zij(z, 1, 3), one - delta)
        * pow(zij(z, 2, 4), -delta)
        * zij(z, 1, 2)
        * d1a;
    let f = a / (pow(zij(z, 1, 3), delta) * pow(zij(z, 2, 4), delta));
    let g = b / (pow(zij(z, 1, 4), delta) * pow(zij(z, 2, 3), delta));
    Ok((f, g))
}

/// Section as a vector in the `[e, (12)]` basis of `C[S₂]`.
pub fn section_vector(p: &AppendixParams, z: &[C64]) -> Result<CVec> {
    let (f, g) = section(p, z)?;
    Ok(CVec::from(vec![f, g]))
}

/// Relative residual of the full KZ system at `z`, with derivatives taken by
/// fourth-order central differences. The four equation pairs are the `∂₁`
/// pair and its images under `(12)(34)`, `(13)(24)`, `(14)(23)`.
pub fn kz_residual(p: &AppendixParams, z: &[C64]) -> Result<f64> {
    let h = 1e-4;
    let eval = |z: &[C64]| section(p, z);
    let (f, g) = eval(z)?;
    let scale = (f.norm() + g.norm()).max(1e-30);
    // (∂ᵢ index, pair (j_num, j_f) in the pattern
    //  h⁻¹∂ᵢf = g/z_{i,a} − (tf+g)/z_{i,b},  h⁻¹∂ᵢg = f/z_{i,a} − (f+tg)/z_{i,c})
    let rows: [(usize, usize, usize, usize); 4] =
        [(1, 2, 3, 4), (2, 1, 4, 3), (3, 4, 1, 2), (4, 3, 2, 1)];
    let mut worst = 0.0f64;
    for &(i, a, b, c) in &rows {
        let mut zp = z.to_vec();
        let mut samples = Vec::with_capacity(4);
        for &step in &[-2.0, -1.0, 1.0, 2.0] {
            zp[i - 1] = z[i - 1] + C64::new(step * h, 0.0);
            samples.push(eval(&zp)?);
        }
        let fd = |vals: [C64; 4]| (vals[0] - 8.0 * vals[1] + 8.0 * vals[2] - vals[3]) / (12.0 * h);
        let d_f = fd([samples[0].0, samples[1].0, samples[2].0, samples[3].0]);
        let d_g = fd([samples[0].1, samples[1].1, samples[2].1, samples[3].1]);
        let rhs_f = g / zij(z, i, a) - (p.t * f + g) / zij(z, i, b);
        let rhs_g = f / zij(z, i, a) - (f + p.t * g) / zij(z, i, c);
        worst = worst.max((d_f / p.hbar - rhs_f).norm() / scale);
        worst = worst.max((d_g / p.hbar - rhs_g).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_config(rng: &mut impl Rng) -> Vec<C64> {
        // spread points widely so u stays clear of the singular set
        loop {
            let z: Vec<C64> = (0..4)
                .map(|k| c(3.0 * k as f64 + rng.gen_range(-0.8..0.8), rng.gen_range(-0.5..0.5)))
                .collect();
            let u = cross_ratio(&z);
            if u.norm() > 0.05 && (u - c(1.0, 0.0)).norm() > 0.1 && u.im.abs() > 1e-3 {
                return z;
            }
        }
    }

    #[test]
    fn sections_satisfy_kz_system() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let t = c(0.8, 0.3);
        let hbar = c(0.27, 0.05);
        for &(c1, c2) in &[(c(1.0, 0.0), c(0.0, 0.0)), (c(0.0, 0.0), c(1.0, 0.0))] {
            let p = AppendixParams { t, hbar, c1, c2 };
            for _ in 0..5 {
                let z = random_config(&mut rng);
                let r = kz_residual(&p, &z).unwrap();
                assert!(r < 1e-8, "residual {r:.2e} at z = {z:?}");
            }
        }
    }

    #[test]
    fn section_is_linear_in_constants() {
        let t = c(0.8, 0.3);
        let hbar = c(0.27, 0.05);
        let z = [c(0.0, 0.1), c(2.5, -0.2), c(5.5, 0.3), c(8.0, 0.05)];
        let p1 = AppendixParams { t, hbar, c1: c(1.0, 0.0), c2: c(0.0, 0.0) };
        let p2 = AppendixParams { t, hbar, c1: c(0.0, 0.0), c2: c(1.0, 0.0) };
        let p12 = AppendixParams { t, hbar, c1: c(2.0, 1.0), c2: c(-0.5, 0.3) };
        let v1 = section_vector(&p1, &z).unwrap();
        let v2 = section_vector(&p2, &z).unwrap();
        let v12 = section_vector(&p12, &z).unwrap();
        let lin = v1.mapv(|x| x * c(2.0, 1.0)) + v2.mapv(|x| x * c(-0.5, 0.3));
        let err = (&v12 - &lin).iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn translation_invariance() {
        // the KZ residual uses only differences, and (f,g) itself is built
        // from differences, so a global shift leaves the section unchanged
        let t = c(0.6, 0.2);
        let hbar = c(0.31, 0.0);
        let p = AppendixParams { t, hbar, c1: c(1.0, 0.0), c2: c(0.7, -0.4) };
        let z = [c(0.0, 0.1), c(2.5, -0.2), c(5.5, 0.3), c(8.0, 0.05)];
        let shift = c(0.37, -0.21);
        let zs: Vec<C64> = z.iter().map(|&w| w + shift).collect();
        let (f1, g1) = section(&p, &z).unwrap();
        let (f2, g2) = section(&p, &zs).unwrap();
        assert!((f1 - f2).norm() < 1e-12 * f1.norm().max(1.0));
        assert!((g1 - g2).norm() < 1e-12 * g1.norm().max(1.0));
    }
}
