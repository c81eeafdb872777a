//! Damped Dicke Liouvillian spectrum and the gap histogram against Wigner-Dyson and Poisson.
//!
//!     cargo run --release --example liouvillian_spectrum [n_max]

use open_dicke::chaos;
use open_dicke::dicke::DickeParams;

fn main() -> open_dicke::Result<()> {
    let n_max = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(6);
    for lambda in [0.5, 0.05] {
        let p = DickeParams::resonant(lambda, 6, n_max)?;
        let s = chaos::damped_spectrum(&p, 0.1)?;
        println!(
            "λ = {lambda}: {} eigenvalues, {} stationary, max Re = {:.1e}, S_max = {:.4}",
            s.eigenvalues.len(),
            s.stationary_count,
            s.max_real_part(),
            s.s_max
        );
        for w in [0.02, 0.05, 0.1] {
            println!("  mass with E/S_max ≤ {w}: {:.4}", s.low_gap_mass(w));
        }
    }

    let grid: Vec<f64> = (0..=8).map(|i| 0.5 * i as f64).collect();
    let r = chaos::reference_distributions(&grid)?;
    for (i, s) in grid.iter().enumerate() {
        println!("s = {s:.1}: P_WD = {:.4}, P_Poisson = {:.4}", r.wigner_dyson[i], r.poisson[i]);
    }
    Ok(())
}
