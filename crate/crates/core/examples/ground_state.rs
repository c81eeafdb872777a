//! Finite-N ground-state photon number against the exact N → ∞ normal phase.
//!
//!     cargo run --release --example ground_state

use open_dicke::dicke::{self, DickeParams};
use open_dicke::eigen::EigenOptions;

fn main() -> open_dicke::Result<()> {
    let lambda = 0.4;
    let exact = dicke::normal_phase_occupation(1.0, 1.0, lambda)?;
    println!(
        "λ = {lambda}: ε₋ = {:.6}, ε₊ = {:.6}, ⟨a†a⟩_∞ = {:.8}",
        exact.eps_minus, exact.eps_plus, exact.occupation
    );

    for n in [2, 4, 8, 16, 24] {
        let p = DickeParams::resonant(lambda, n, 1)?;
        let n_max = dicke::cutoff_convergence(&p, 1e-8)?;
        let gs = dicke::dicke_ground_state(&p.with_n_max(n_max), &EigenOptions::default(), None)?;
        let occ = dicke::boson_occupation(&gs.state, &p.with_n_max(n_max).basis());
        println!(
            "N = {n:>2}  n_max = {n_max:>2}  E₀ = {:>12.8}  ⟨a†a⟩ = {occ:.8}  gap to ∞ = {:.2e}",
            gs.energy,
            (occ - exact.occupation).abs()
        );
    }

    let lc = dicke::critical_coupling(1.0, 1.0)?;
    for l in [0.45, 0.49, 0.499, 0.4999] {
        let occ = dicke::normal_phase_occupation(1.0, 1.0, l)?.occupation;
        println!("λ_c - λ = {:.0e}: ⟨a†a⟩_∞ = {occ:.4}", lc - l);
    }
    Ok(())
}
