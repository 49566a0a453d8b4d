//! Drinfeld–Kohno comparison: the braiding matrices obtained by transporting
//! the KZ connection along half twists agree, up to one overall scalar, with
//! the Hecke algebra generators at q = exp(iπℏ). Detuning q breaks the match,
//! so the agreement is not an artifact of the comparison.

use kzlab::algebra::sym_model;
use kzlab::braiding::{dk_compare, hecke_generators, hecke_q, kz_braid_generator};
use kzlab::connections::{make_connection, ConnectionInputs, ConnectionKind};
use kzlab::transport::standard_basepoint;
use kzlab::C64;

fn main() {
    let t = C64::new(0.8, 0.2);
    let hbar = C64::new(0.17, 0.03);
    let q = hecke_q(hbar);
    println!("q = exp(i pi hbar) = {q:.6}");

    for m in [2usize, 3] {
        let space = sym_model(m, t, hbar).unwrap();
        let spec =
            make_connection(ConnectionKind::KzGl, &ConnectionInputs::Model(&space), hbar)
                .unwrap();
        let bp = standard_basepoint(space.strand_count());
        let hecke = hecke_generators(&space, q).unwrap();
        for k in 1..m {
            let kz = kz_braid_generator(&spec, &space, m + k, &bp).unwrap();
            let rep = dk_compare(&kz.matrix, &hecke[k - 1].matrix).unwrap();
            println!(
                "m = {m}, generator {k}: scalar {:+.6}{:+.6}i, deviation {:.3e}",
                rep.scalar[0], rep.scalar[1], rep.deviation
            );
        }
        let bad = hecke_generators(&space, q * C64::new(0.0, 0.1).exp()).unwrap();
        let kz1 = kz_braid_generator(&spec, &space, m + 1, &bp).unwrap();
        println!(
            "m = {m}, detuned q control: deviation {:.3e} (should be large)",
            dk_compare(&kz1.matrix, &bad[0].matrix).unwrap().deviation
        );
    }
}
