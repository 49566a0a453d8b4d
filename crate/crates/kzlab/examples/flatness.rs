//! A connection of the form d + ℏ Σ A_ij dlog(z_i − z_j) is flat exactly
//! when the coefficients satisfy the infinitesimal braid relations. This
//! example builds each connection family and prints the largest bracket norm.

use kzlab::algebra::{matching_model, sym_model};
use kzlab::connections::{
    flatness_check, gl_duality_subspace, make_connection, so_duality_subspace, ConnectionInputs,
    ConnectionKind,
};
use kzlab::C64;

fn main() {
    let t = C64::new(0.8, 0.3);
    let hbar = C64::new(0.31, 0.07);

    let sym = sym_model(3, t, hbar).unwrap();
    let spec =
        make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&sym), hbar).unwrap();
    println!("kz-gl (m = 3):     {:.3e}", flatness_check(&spec).max_norm());

    let mat = matching_model(4, t, hbar).unwrap();
    let spec =
        make_connection(ConnectionKind::KzO, &ConnectionInputs::Model(&mat), hbar).unwrap();
    println!("kz-o (n = 4):      {:.3e}", flatness_check(&spec).max_norm());

    let (space, sub) = gl_duality_subspace(4, 2, 2).unwrap();
    for (kind, label) in [(ConnectionKind::Kappa, "kappa"), (ConnectionKind::Dynamical, "dynamical")]
    {
        let spec = make_connection(
            kind,
            &ConnectionInputs::Subspace { space: &space, sub: &sub },
            hbar,
        )
        .unwrap();
        println!("{label:<18} {:.3e}", flatness_check(&spec).max_norm());
    }

    let (space, sub) = so_duality_subspace(3, 2).unwrap();
    let spec = make_connection(
        ConnectionKind::DualSo,
        &ConnectionInputs::Subspace { space: &space, sub: &sub },
        hbar,
    )
    .unwrap();
    println!("dual-so (t = 3):   {:.3e}", flatness_check(&spec).max_norm());
}
