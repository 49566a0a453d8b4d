//! Orthogonal-side duality: the direct Casimir action on the n-point Fock
//! space equals its rewritten dual form, and on the invariant subspace the
//! prefactor identity ℏ Ω_ab + ℏ(1 − t)/2 = −ℏ (dual coefficient) holds.

use kzlab::connections::{
    flatness_check, make_connection, so_duality_subspace, ConnectionInputs, ConnectionKind,
};
use kzlab::fock::{
    max_action_difference, omega_so_direct, omega_so_dual_form, so_dual_coefficient, FockSpace,
};
use kzlab::{linalg, C64};

fn main() {
    let (t_int, n) = (3usize, 2usize);
    let hbar = C64::new(0.33, -0.09);

    let sp = FockSpace::new(t_int, n).unwrap();
    for a in 1..=n {
        for b in (a + 1)..=n {
            let direct = omega_so_direct(&sp, a, b).unwrap();
            let dual = omega_so_dual_form(&sp, a, b).unwrap();
            println!(
                "pair ({a},{b}): |direct − dual form| = {:.3e}",
                max_action_difference(&sp, &direct, &dual)
            );
        }
    }

    let (space, sub) = so_duality_subspace(t_int, n).unwrap();
    let id = linalg::identity(sub.dim());
    for a in 1..=n {
        for b in (a + 1)..=n {
            let om = sub
                .restrict(&omega_so_direct(&space, a, b).unwrap(), 1e-9)
                .unwrap()
                .matrix;
            let dual = so_dual_coefficient(&space, &sub, a, b).unwrap().matrix;
            let shift = hbar * (1.0 - t_int as f64) / 2.0;
            let err = linalg::max_abs(
                &(&(om.mapv(|x| x * hbar) + id.mapv(|x| x * shift))
                    - &dual.mapv(|x| x * (-hbar))),
            );
            println!("invariant subspace pair ({a},{b}): prefactor identity {err:.3e}");
        }
    }

    let spec = make_connection(
        ConnectionKind::DualSo,
        &ConnectionInputs::Subspace { space: &space, sub: &sub },
        hbar,
    )
    .unwrap();
    println!("dual connection flatness: {:.3e}", flatness_check(&spec).max_norm());
}
