//! Collective spin and boson operators, tensor embedding and the parity symmetry.
//!
//!     cargo run --example spin_operators

use open_dicke::dicke::{self, DickeParams};
use open_dicke::operators::{self, SpinComponent};

fn main() -> open_dicke::Result<()> {
    let n = 4;
    let jz = operators::collective_spin(n, SpinComponent::Z)?;
    let jp = operators::collective_spin(n, SpinComponent::Plus)?;
    let jm = operators::collective_spin(n, SpinComponent::Minus)?;

    // [J+, J-] = 2 Jz
    let defect = jp.commutator(&jm).add(&jz.scale(-2.0)).data.max_abs();
    println!("N = {n}: |[J+, J-] - 2Jz|_max = {defect:.2e}");

    let p = DickeParams::resonant(0.4, n, 12)?;
    let basis = p.basis();
    println!("boson ⊗ spin dimension: {} = {:?}", basis.dimension(), basis.dims());

    let h = dicke::dicke_hamiltonian(&p)?;
    let parity = operators::parity_operator(n, p.n_max)?;
    println!(
        "H hermiticity defect {:.2e}, |[H, Π]|_max = {:.2e}",
        h.hermiticity_defect(),
        h.commutator(&parity).data.max_abs()
    );

    let a = operators::boson_annihilation(p.n_max)?;
    let num = operators::boson_number(p.n_max)?;
    let defect = a.adjoint().matmul(&a).add(&num.scale(-1.0)).data.max_abs();
    println!("|a†a - n|_max = {defect:.2e}");
    Ok(())
}
