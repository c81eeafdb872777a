//! Current, zero-frequency noise and Fano factor of the transport qubit:
//! closed forms, counting-statistics forms and the full master equation.
//!
//!     cargo run --release --example transport_noise

use open_dicke::open_system::{self, SteadyStateSolver};
use open_dicke::transport::{self, TransportQubit};

fn main() -> open_dicke::Result<()> {
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "ε", "I closed", "I counting", "I master", "F master");
    for eps in [0.0, 0.02, 0.05, 0.1, 0.2] {
        let tq = TransportQubit {
            epsilon: eps,
            delta: 0.1,
            g: 0.0,
            gamma_l: 0.1,
            gamma_r: 0.05,
        };
        let closed = transport::passive_transport(&tq, 0.0)?;
        let counting = transport::counting_transport(&tq, 0.0)?;
        let solver = SteadyStateSolver::new(&open_system::tq_liouvillian(eps, tq.delta, tq.gamma_l, tq.gamma_r))?;
        let current = transport::me_current(solver.steady_state(), tq.gamma_r)?;
        let noise = transport::me_noise_with_solver(&solver, tq.gamma_r)?;
        println!(
            "{eps:>6} {:>12.8} {:>12.8} {current:>12.8} {:>10.6}",
            closed.current,
            counting.current,
            noise / (2.0 * current)
        );
    }

    // cavity photons detune the qubit: I falls as ⟨a†a⟩ grows
    let tq = TransportQubit {
        epsilon: 0.0,
        delta: 0.1,
        g: 0.1,
        gamma_l: 0.1,
        gamma_r: 0.1,
    };
    for occ in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let r = transport::passive_transport(&tq, occ)?;
        println!("⟨a†a⟩ = {occ}: ε_eff = {:.2}, I/e = {:.6}, F = {:.6}", r.effective_detuning, r.current, r.fano);
    }
    Ok(())
}
