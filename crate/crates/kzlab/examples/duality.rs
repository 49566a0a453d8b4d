//! On the joint singular subspace of an integer-rank Fock space the KZ
//! Casimirs and the dual-side quadratic elements agree up to scalar shifts:
//!
//!   ℏ Ω_ij − ℏ (β_i + β_j)/2 = −(ℏ/2) κ_ij
//!   −(ℏ/2) κ_ij + ℏ (β_i − β_j)/2 = −ℏ e_{−α} e_α   (truncated Casimir)
//!
//! This example verifies both identities matrix-by-matrix.

use kzlab::connections::{gl_duality_subspace, gl_duality_weights};
use kzlab::fock::{kappa, omega_fock, truncated_casimir};
use kzlab::{linalg, C64};

fn main() {
    let (t_int, m, n) = (4usize, 2usize, 2usize);
    let hbar = C64::new(0.29, 0.11);
    let (space, sub) = gl_duality_subspace(t_int, m, n).unwrap();
    let (_, beta) = gl_duality_weights(t_int, m, n);
    let id = linalg::identity(sub.dim());
    println!("duality subspace: dim {} at t = {t_int}, m = {m}, n = {n}", sub.dim());

    let d = m + n;
    for i in 1..=d {
        for j in (i + 1)..=d {
            let om = sub.restrict(&omega_fock(&space, i, j).unwrap(), 1e-9).unwrap().matrix;
            let ka = sub.restrict(&kappa(&space, i, j).unwrap(), 1e-9).unwrap().matrix;
            let tc = truncated_casimir(&space, &sub, i, j).unwrap().matrix;

            let shift = hbar * ((beta[i - 1] + beta[j - 1]) as f64) / 2.0;
            let prefactor = linalg::max_abs(
                &(&(om.mapv(|x| x * hbar) - id.mapv(|x| x * shift))
                    - &ka.mapv(|x| x * (-hbar / 2.0))),
            );

            let gshift = hbar * ((beta[i - 1] as f64) - (beta[j - 1] as f64)) / 2.0;
            let gauge = linalg::max_abs(
                &(&(ka.mapv(|x| x * (-hbar / 2.0)) + id.mapv(|x| x * gshift))
                    - &tc.mapv(|x| x * (-hbar))),
            );
            println!("pair ({i},{j}): prefactor identity {prefactor:.3e}, gauge identity {gauge:.3e}");
        }
    }
}
