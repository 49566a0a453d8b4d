//! Master function data for the integral solutions: logarithm, gradient,
//! Hessian, and the rational `ω`-form with its summand table.

use crate::{C64, CVec, KzError, Result};
use itertools::Itertools;

/// Exponent data of the master function
/// `log Φ(t) = −Σ_k e_k log t_k + Σ_{k<l} p_{kl} log(t_k − t_l)`,
/// together with the color word `c` tying integration variables to
/// consecutive-point differences `z_{c(k)} − z_{c(k)+1}`.
#[derive(Debug, Clone)]
pub struct MasterData {
    pub m_bar: usize,
    /// Color of each integration variable.
    pub c: Vec<usize>,
    /// Single-variable exponents `e_k`.
    pub e: Vec<C64>,
    /// Symmetric pair exponents `p_{kl}`.
    pub p: Vec<Vec<f64>>,
}

/// Data for the trivial-weight `m = n = 1` case: one variable of color 1,
/// `Φ = t₁^{−t}`.
pub fn master_m1n1(t: C64) -> MasterData {
    MasterData {
        m_bar: 1,
        c: vec![1],
        e: vec![t],
        p: vec![vec![0.0]],
    }
}

/// Data for the `m = n = 2`, trivial-weight case: colors `(1,2,2,3)`,
/// single exponents `(0,t,t,0)`, pair exponents
/// `p₁₂ = p₁₃ = p₂₄ = p₃₄ = −1`, `p₂₃ = 2`, `p₁₄ = 0`.
pub fn master_m2n2(t: C64) -> MasterData {
    let zero = C64::new(0.0, 0.0);
    let mut p = vec![vec![0.0; 4]; 4];
    for &(k, l, v) in &[
        (0usize, 1usize, -1.0),
        (0, 2, -1.0),
        (0, 3, 0.0),
        (1, 2, 2.0),
        (1, 3, -1.0),
        (2, 3, -1.0),
    ] {
        p[k][l] = v;
        p[l][k] = v;
    }
    MasterData {
        m_bar: 4,
        c: vec![1, 2, 2, 3],
        e: vec![zero, t, t, zero],
        p,
    }
}

impl MasterData {
    fn check(&self, t: &[C64]) -> Result<()> {
        if t.len() != self.m_bar {
            return Err(KzError::DimensionMismatch(format!(
                "master function expects {} variables, got {}",
                self.m_bar,
                t.len()
            )));
        }
        Ok(())
    }

    /// Principal-branch `log Φ` (suitable only where no factor crosses its
    /// cut; contour evaluation tracks branches separately).
    pub fn log_phi(&self, t: &[C64]) -> Result<C64> {
        self.check(t)?;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.m_bar {
            if self.e[k].norm() > 0.0 {
                acc -= self.e[k] * t[k].ln();
            }
            for l in (k + 1)..self.m_bar {
                if self.p[k][l] != 0.0 {
                    acc += self.p[k][l] * (t[k] - t[l]).ln();
                }
            }
        }
        Ok(acc)
    }

    /// `∂_k log Φ` (rational, branch-free).
    pub fn grad_log_phi(&self, t: &[C64]) -> Result<Vec<C64>> {
        self.check(t)?;
        let mut g = vec![C64::new(0.0, 0.0); self.m_bar];
        for k in 0..self.m_bar {
            g[k] -= self.e[k] / t[k];
            for l in 0..self.m_bar {
                if l != k && self.p[k][l] != 0.0 {
                    g[k] += self.p[k][l] / (t[k] - t[l]);
                }
            }
        }
        Ok(g)
    }

    /// Hessian of `log Φ`.
    pub fn hess_log_phi(&self, t: &[C64]) -> Result<Vec<Vec<C64>>> {
        self.check(t)?;
        let zero = C64::new(0.0, 0.0);
        let mut h = vec![vec![zero; self.m_bar]; self.m_bar];
        for k in 0..self.m_bar {
            h[k][k] += self.e[k] / (t[k] * t[k]);
            for l in 0..self.m_bar {
                if l != k && self.p[k][l] != 0.0 {
                    let d = t[k] - t[l];
                    h[k][k] -= self.p[k][l] / (d * d);
                    h[k][l] += self.p[k][l] / (d * d);
                }
            }
        }
        Ok(h)
    }
}

/// `f_{c(σ(1))} ⋯ f_{c(σ(4))} v` in the `[e, (12)]` basis for colors
/// `c = (1,2,2,3)`: the six nonvanishing monomials.
pub fn lowering_word_vector(key: &[usize]) -> CVec {
    let v = |a: f64, b: f64| CVec::from(vec![C64::new(a, 0.0), C64::new(b, 0.0)]);
    match key {
        [2, 1, 3, 2] | [2, 3, 1, 2] => v(1.0, 0.0),
        [1, 3, 2, 2] | [3, 1, 2, 2] => v(2.0, 2.0),
        [1, 2, 3, 2] | [3, 2, 1, 2] => v(1.0, 1.0),
        _ => v(0.0, 0.0),
    }
}

/// The rational `ω`-form for the `m = n = 2` case, valued in `C[S₂]`:
/// `ω(t) = Σ_σ (f_{c(σ(1))}⋯f_{c(σ(4))}v) /
///         ((t_{σ(1)}−t_{σ(2)})(t_{σ(2)}−t_{σ(3)})(t_{σ(3)}−t_{σ(4)}) t_{σ(4)})`.
/// (No alternating sign: this convention reproduces the closed form of
/// [`omega_m2n2_closed_form`] verbatim.)
pub fn omega_m2n2(data: &MasterData, t: &[C64]) -> Result<CVec> {
    data.check(t)?;
    let mut acc = CVec::from(vec![C64::new(0.0, 0.0); 2]);
    for perm in (0..4).permutations(4) {
        let key: Vec<usize> = perm.iter().map(|&k| data.c[k]).collect();
        let vec = lowering_word_vector(&key);
        if vec.iter().all(|x| x.norm() == 0.0) {
            continue;
        }
        let denom = (t[perm[0]] - t[perm[1]])
            * (t[perm[1]] - t[perm[2]])
            * (t[perm[2]] - t[perm[3]])
            * t[perm[3]];
        acc = acc + vec.mapv(|x| x / denom);
    }
    Ok(acc)
}

/// A single summand `ω_σ(t) = 1/((t_{σ(1)}−t_{σ(2)})⋯(t_{σ(m̄−1)}−t_{σ(m̄)}) t_{σ(m̄)})`
/// of the symmetrized form, with `σ` given as 0-based images.
pub fn omega_summand(t: &[C64], sigma: &[usize]) -> C64 {
    let m = sigma.len();
    let mut denom = t[sigma[m - 1]];
    for k in 0..m - 1 {
        denom *= t[sigma[k]] - t[sigma[k + 1]];
    }
    C64::new(1.0, 0.0) / denom
}

/// The closed-form `ω` coefficients from the four-point analysis, used as an
/// independent oracle for [`omega_m2n2`].
pub fn omega_m2n2_closed_form(t: &[C64]) -> (C64, C64) {
    let (t1, t2, t3, t4) = (t[0], t[1], t[2], t[3]);
    let denom = t2 * t3 * (t4 - t2) * (t4 - t3) * (t1 - t2) * (t1 - t3);
    let num_e = 2.0 * t1 * t4 - (t1 + t4) * (t2 + t3) + t2 * t2 + t3 * t3;
    let num_s = 2.0 * t1 * t4 - (t1 + t4) * (t2 + t3) + 2.0 * t2 * t3;
    (num_e / denom, num_s / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = master_m2n2(c(0.8, 0.3));
        let t = [c(-0.3, 0.4), c(-1.1, -0.2), c(0.7, 0.9), c(-2.0, 0.6)];
        let g = data.grad_log_phi(&t).unwrap();
        let h = 1e-6;
        for k in 0..4 {
            let mut tp = t.to_vec();
            tp[k] = t[k] + c(h, 0.0);
            let up = data.log_phi(&tp).unwrap();
            tp[k] = t[k] - c(h, 0.0);
            let um = data.log_phi(&tp).unwrap();
            let fd = (up - um) / (2.0 * h);
            assert!((fd - g[k]).norm() < 1e-7 * g[k].norm().max(1.0));
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let data = master_m2n2(c(0.8, 0.3));
        let t = [c(-0.3, 0.4), c(-1.1, -0.2), c(0.7, 0.9), c(-2.0, 0.6)];
        let hess = data.hess_log_phi(&t).unwrap();
        let h = 1e-6;
        for k in 0..4 {
            let mut tp = t.to_vec();
            tp[k] = t[k] + c(h, 0.0);
            let gp = data.grad_log_phi(&tp).unwrap();
            tp[k] = t[k] - c(h, 0.0);
            let gm = data.grad_log_phi(&tp).unwrap();
            for l in 0..4 {
                let fd = (gp[l] - gm[l]) / (2.0 * h);
                assert!((fd - hess[l][k]).norm() < 1e-6 * hess[l][k].norm().max(1.0));
            }
        }
    }

    #[test]
    fn omega_matches_closed_form() {
        let data = master_m2n2(c(0.8, 0.3));
        for t in [
            [c(-0.3, 0.4), c(-1.1, -0.2), c(0.7, 0.9), c(-2.0, 0.6)],
            [c(1.3, 0.1), c(-0.4, 0.8), c(2.2, -0.5), c(0.6, 1.4)],
        ] {
            let got = omega_m2n2(&data, &t).unwrap();
            let (we, ws) = omega_m2n2_closed_form(&t);
            let err = (got[0] - we).norm() + (got[1] - ws).norm();
            assert!(
                err < 1e-12 * (we.norm() + ws.norm()).max(1e-10),
                "omega mismatch at {t:?}: got ({}, {}), closed form ({we}, {ws})",
                got[0],
                got[1]
            );
        }
    }

    #[test]
    fn m1n1_critical_point_closed_form() {
        let t = c(0.9, 0.4);
        let data = master_m1n1(t);
        let z12 = c(1.7, -0.3);
        // critical equation z₁₂ − ∂₁ log Φ = 0 ⇒ t₁ = −t / z₁₂
        let t1 = -t / z12;
        let g = data.grad_log_phi(&[t1]).unwrap();
        assert!((z12 - g[0]).norm() < 1e-14);
    }
}
