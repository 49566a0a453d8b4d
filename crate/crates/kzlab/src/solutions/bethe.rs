//! Bethe ansatz: critical points of the master function with the linear
//! exponential term, found by Newton iteration with the analytic Jacobian,
//! and the eigenvector property of `ω` at those points.

use crate::solutions::master::{omega_m2n2, MasterData};
use crate::{linalg, C64, CMat, CVec, KzError, Result};
use ndarray::Array2;
use serde::Serialize;

/// Bethe system `F_k(t) = z'_k − ∂_k log Φ(t) = 0`, where
/// `z'_k = z_{c(k)} − z_{c(k)+1}` are the consecutive-point differences
/// attached to each variable's color.
pub fn bethe_residual(data: &MasterData, z: &[C64], t: &[C64]) -> Result<Vec<C64>> {
    let grad = data.grad_log_phi(t)?;
    let mut out = Vec::with_capacity(data.m_bar);
    for k in 0..data.m_bar {
        let c = data.c[k];
        if c + 1 > z.len() {
            return Err(KzError::IndexRange(format!(
                "color {c} needs point z_{}, but only {} points given",
                c + 1,
                z.len()
            )));
        }
        out.push(z[c - 1] - z[c] - grad[k]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct BetheSolution {
    pub roots: Vec<[f64; 2]>,
    pub residual: f64,
    pub iterations: usize,
}

impl BetheSolution {
    pub fn roots_c64(&self) -> Vec<C64> {
        self.roots.iter().map(|r| C64::new(r[0], r[1])).collect()
    }
}

/// Newton iteration on the Bethe system from a starting guess.
pub fn solve_bethe(
    data: &MasterData,
    z: &[C64],
    start: &[C64],
    max_iter: usize,
) -> Result<BetheSolution> {
    let m = data.m_bar;
    if start.len() != m {
        return Err(KzError::DimensionMismatch(format!(
            "starting guess has {} entries, system has {m}",
            start.len()
        )));
    }
    let mut t = start.to_vec();
    for iter in 0..max_iter {
        let f = bethe_residual(data, z, &t)?;
        let res = f.iter().map(|x| x.norm()).fold(0.0, f64::max);
        if res < 1e-13 {
            return Ok(BetheSolution {
                roots: t.iter().map(|x| [x.re, x.im]).collect(),
                residual: res,
                iterations: iter,
            });
        }
        // Jacobian of F = z' − ∇logΦ is −Hess(logΦ)
        let hess = data.hess_log_phi(&t)?;
        let mut j: CMat = Array2::zeros((m, m));
        for k in 0..m {
            for l in 0..m {
                j[[k, l]] = -hess[k][l];
            }
        }
        let rhs = CVec::from(f.clone());
        let step = linalg::solve(&j, &rhs)?;
        // damped Newton keeps variables away from the coincidence divisor
        let mut lambda = 1.0;
        loop {
            let trial: Vec<C64> = t
                .iter()
                .zip(step.iter())
                .map(|(&tk, &sk)| tk - lambda * sk)
                .collect();
            let ok = bethe_residual(data, z, &trial)
                .map(|f| f.iter().map(|x| x.norm()).fold(0.0, f64::max) < res)
                .unwrap_or(false);
            if ok || lambda < 1.0 / 64.0 {
                t = trial;
                break;
            }
            lambda *= 0.5;
        }
    }
    let f = bethe_residual(data, z, &t)?;
    let res = f.iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(BetheSolution {
        roots: t.iter().map(|x| [x.re, x.im]).collect(),
        residual: res,
        iterations: max_iter,
    })
}

/// Rayleigh residuals `‖H_i ω − θ_i ω‖ / ‖ω‖` of the `ω`-vector at a Bethe
/// root against the Gaudin Hamiltonians of the symmetric `m = 2` model.
pub fn gaudin_eigenvector_residuals(
    data: &MasterData,
    z: &[C64],
    roots: &[C64],
    hamiltonians: &[crate::operator::LinearOperator],
) -> Result<Vec<f64>> {
    // align the lowering-word components of ω with the diagram basis the
    // Gaudin Hamiltonians act on
    let v = crate::solutions::integral::kz_alignment().dot(&omega_m2n2(data, roots)?);
    let mut out = Vec::with_capacity(hamiltonians.len());
    for h in hamiltonians {
        let (_, res) = crate::algebra::eigen_residual(&h.matrix, &v);
        out.push(res);
    }
    let _ = z;
    Ok(out)
}
