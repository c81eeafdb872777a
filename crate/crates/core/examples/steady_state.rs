//! Stationary state of the transport qubit read out by a damped Dicke cavity.
//!
//!     cargo run --release --example steady_state

use open_dicke::open_system::{self, SteadyStateSolver, SystemSpec};
use open_dicke::transport;

fn main() -> open_dicke::Result<()> {
    let mut spec = SystemSpec::current_figure(2, 8, 0.45);
    spec.gamma_b = 0.1;

    let l = open_system::build_liouvillian(&spec)?;
    println!(
        "Hilbert dimension {}, Liouvillian {}×{}, {} nonzeros, trace defect {:.1e}",
        l.hilbert_dim(),
        l.data.nrows(),
        l.data.ncols(),
        l.data.nnz(),
        l.trace_defect()
    );

    let solver = SteadyStateSolver::new(&l)?;
    let rho = solver.steady_state();
    rho.validate()?;
    let [p0, pl, pr] = transport::tq_populations(rho)?;
    println!("TQ populations: empty {p0:.6}, left {pl:.6}, right {pr:.6}");
    println!("⟨a†a⟩ = {:.6}", rho.boson_occupation()?);
    println!("λ_min(ρ) = {:.2e}", rho.min_eigenvalue()?);
    Ok(())
}
