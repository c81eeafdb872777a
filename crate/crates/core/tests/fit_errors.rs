use open_dicke::criticality;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

const NS: [f64; 7] = [4.0, 8.0, 16.0, 20.0, 24.0, 40.0, 60.0];

fn spread(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

// the reported standard error should match the scatter of refitted slopes
#[test]
fn log_fit_standard_error_matches_monte_carlo_scatter() {
    let mut rng = StdRng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.03).unwrap();
    let (mut slopes, mut errors) = (Vec::new(), Vec::new());
    for _ in 0..4000 {
        let pts: Vec<(f64, f64)> = NS.iter().map(|&n| (n, 0.3 + 0.81 * n.log2() + noise.sample(&mut rng))).collect();
        let fit = criticality::fit_log_scaling(&pts).unwrap();
        slopes.push(fit.exponent);
        errors.push(fit.exponent_err);
    }
    let (mean, sd) = spread(&slopes);
    // E[s] is slightly below σ for 5 degrees of freedom; compare the variance instead
    let rms_err = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    assert!((mean - 0.81).abs() < 3.0 * sd / 4000f64.sqrt(), "mean slope {mean}");
    assert!((rms_err / sd - 1.0).abs() < 0.05, "rms SE {rms_err} vs scatter {sd}");
}

#[test]
fn power_law_standard_error_matches_monte_carlo_scatter() {
    let mut rng = StdRng::seed_from_u64(11);
    let noise: Normal<f64> = Normal::new(0.0, 0.02).unwrap();
    let (mut slopes, mut errors) = (Vec::new(), Vec::new());
    for _ in 0..4000 {
        let pts: Vec<(f64, f64)> = NS
            .iter()
            .map(|&n| (n, 0.9 * n.powf(-0.68) * noise.sample(&mut rng).exp()))
            .collect();
        let fit = criticality::fit_power_law(&pts).unwrap();
        slopes.push(fit.exponent);
        errors.push(fit.exponent_err);
    }
    let (mean, sd) = spread(&slopes);
    let rms_err = (errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt();
    assert!((mean + 0.68).abs() < 3.0 * sd / 4000f64.sqrt(), "mean exponent {mean}");
    assert!((rms_err / sd - 1.0).abs() < 0.05, "rms SE {rms_err} vs scatter {sd}");
}
