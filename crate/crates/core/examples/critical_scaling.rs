//! Minimum of dI/dλ near the superradiant transition and its finite-size scaling.
//!
//!     cargo run --release --example critical_scaling [N ...]

use open_dicke::criticality;
use open_dicke::dicke;
use open_dicke::open_system::SystemSpec;

fn main() -> open_dicke::Result<()> {
    let ns: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ns = if ns.is_empty() { vec![4, 8, 16, 24] } else { ns };
    let spec = SystemSpec::current_figure(1, 1, 0.0);
    let lc = dicke::critical_coupling(1.0, 1.0)?;
    let grid = criticality::default_lambda_grid();

    let mut offsets = Vec::new();
    let mut values = Vec::new();
    for n in ns {
        let (m, _) = criticality::current_derivative_minimum(&spec, n, &grid, 1e-6)?;
        println!(
            "N = {n:>3}  n_max = {:>3}  λ_m = {:.6}  dI/dλ = {:.6}",
            m.n_max, m.lambda_m, m.value
        );
        offsets.push((n as f64, m.lambda_m - lc));
        values.push((n as f64, m.value));
    }
    if offsets.len() >= 3 {
        let fit = criticality::fit_power_law(&offsets)?;
        println!("λ_m - λ_c ∝ N^({:.3} ± {:.3})", fit.exponent, fit.exponent_err);
        let fit = criticality::fit_log_scaling(&values)?;
        println!("dI/dλ|_min vs log₂N: slope {:.3} ± {:.3}", fit.exponent, fit.exponent_err);
    }
    Ok(())
}
