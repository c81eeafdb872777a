use open_dicke::chaos;
use open_dicke::criticality::{self, Observable, SweepMode, SweepParameter, SweepResult};
use open_dicke::dicke::{self, DickeParams};
use open_dicke::open_system::{self, SystemSpec, POSITIVITY_TOL, TRACE_TOL};
use open_dicke::operators::{self, SpinComponent};
use open_dicke::transport::{self, TransportQubit};
use open_dicke::C64;
use proptest::prelude::*;

fn small_spec() -> impl Strategy<Value = SystemSpec> {
    (
        (0.5f64..1.5, 0.2f64..1.5, 0.0f64..0.8, 1usize..=2, 1usize..=3),
        (-0.2f64..0.2, 0.02f64..0.2, -0.2f64..0.2),
        (0.01f64..0.5, 0.01f64..0.5, 0.01f64..0.3),
    )
        .prop_map(|((omega, omega0, lambda, n, n_max), (epsilon, delta, g), (gl, gr, gb))| SystemSpec {
            dicke: DickeParams {
                omega,
                omega0,
                lambda,
                n_qubits: n,
                n_max,
            },
            epsilon,
            delta,
            g,
            gamma_l: gl,
            gamma_r: gr,
            gamma_b: gb,
            include_tq: true,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spin_algebra_closes(n in 1usize..=40) {
        let jz = operators::collective_spin(n, SpinComponent::Z).unwrap();
        let jp = operators::collective_spin(n, SpinComponent::Plus).unwrap();
        let jm = operators::collective_spin(n, SpinComponent::Minus).unwrap();
        prop_assert!(jp.commutator(&jm).add(&jz.scale(-2.0)).data.max_abs() <= 1e-12);
        prop_assert!(jz.commutator(&jp).add(&jp.scale(-1.0)).data.max_abs() <= 1e-12);
        prop_assert!(jp.adjoint().add(&jm.scale(-1.0)).data.max_abs() == 0.0);
    }

    #[test]
    fn dicke_hamiltonian_is_hermitian_and_parity_even(
        omega in 0.1f64..3.0, omega0 in 0.0f64..3.0, lambda in 0.0f64..2.0,
        n in 1usize..=12, n_max in 1usize..=20,
    ) {
        let p = DickeParams::new(omega, omega0, lambda, n, n_max).unwrap();
        let h = dicke::dicke_hamiltonian(&p).unwrap();
        prop_assert!(h.hermiticity_defect() <= 1e-12);
        let parity = operators::parity_operator(n, n_max).unwrap();
        prop_assert!(h.commutator(&parity).data.max_abs() <= 1e-12);
    }

    #[test]
    fn normal_phase_branches_are_ordered(omega in 0.2f64..3.0, omega0 in 0.2f64..3.0, frac in 0.0f64..0.999) {
        let lc = dicke::critical_coupling(omega, omega0).unwrap();
        let s = dicke::normal_phase_occupation(omega, omega0, frac * lc).unwrap();
        prop_assert!(s.eps_plus >= s.eps_minus && s.eps_minus >= 0.0);
        prop_assert!((s.c * s.c + s.s * s.s - 1.0).abs() <= 1e-12);
        prop_assert!(s.occupation >= 0.0 && s.occupation.is_finite());
    }

    #[test]
    fn liouvillian_preserves_trace(spec in small_spec()) {
        let l = open_system::build_liouvillian(&spec).unwrap();
        prop_assert!(l.trace_defect() <= 1e-10, "defect {}", l.trace_defect());
    }

    #[test]
    fn steady_state_is_a_density_matrix(spec in small_spec()) {
        let rho = open_system::steady_state(&open_system::build_liouvillian(&spec).unwrap()).unwrap();
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() <= TRACE_TOL);
        prop_assert!(rho.hermiticity_defect() <= 1e-10);
        prop_assert!(rho.min_eigenvalue().unwrap() >= -POSITIVITY_TOL);
    }

    #[test]
    fn passive_current_falls_with_detuning(
        delta in 0.01f64..0.5, gl in 0.01f64..1.0, gr in 0.01f64..1.0,
        a in 0.0f64..2.0, b in 0.0f64..2.0,
    ) {
        prop_assume!((a - b).abs() > 1e-6);
        let tq = TransportQubit { epsilon: 0.0, delta, g: 1.0, gamma_l: gl, gamma_r: gr };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for current in [transport::passive_current, transport::counting_current] {
            let i_lo = current(&tq, lo).unwrap();
            let i_hi = current(&tq, hi).unwrap();
            prop_assert!(i_hi < i_lo);
            prop_assert!(i_lo >= 0.0 && i_lo <= gr);
            // ε_eff enters only through its square
            let flipped = TransportQubit { g: -1.0, ..tq };
            prop_assert!((current(&flipped, lo).unwrap() - i_lo).abs() <= 1e-15 * i_lo.max(1.0));
        }
    }

    #[test]
    fn power_law_exponent_ignores_ordinate_scale(
        b in -2.0f64..2.0, a in 0.01f64..10.0, k in 0.01f64..100.0,
        noise in proptest::collection::vec(-0.05f64..0.05, 6),
    ) {
        let ns: [f64; 6] = [4.0, 8.0, 16.0, 24.0, 40.0, 60.0];
        let pts: Vec<(f64, f64)> = ns.iter().zip(&noise).map(|(&n, e)| (n, a * n.powf(b) * (1.0 + e))).collect();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(n, y)| (n, k * y)).collect();
        let f1 = criticality::fit_power_law(&pts).unwrap();
        let f2 = criticality::fit_power_law(&scaled).unwrap();
        prop_assert!((f1.exponent - f2.exponent).abs() <= 1e-10);
        prop_assert!((f2.prefactor / f1.prefactor / k - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn derivative_is_exact_for_quadratics(
        steps in proptest::collection::vec(0.01f64..0.2, 3..12),
        c in proptest::array::uniform3(-3.0f64..3.0),
    ) {
        let mut x = vec![0.0];
        for h in &steps {
            x.push(x.last().unwrap() + h);
        }
        let f = |t: f64| c[0] + c[1] * t + c[2] * t * t;
        let curve = SweepResult {
            parameter: SweepParameter::Lambda,
            parameter_grid: x.clone(),
            observable: x.iter().map(|&t| f(t)).collect(),
            kind: Observable::Current,
            derivative_order: 0,
            mode: SweepMode::GroundState,
            spec: SystemSpec::current_figure(1, 1, 0.0),
        };
        let d = criticality::derivative(&curve).unwrap();
        for (t, v) in x.iter().zip(&d.observable) {
            prop_assert!((v - (c[1] + 2.0 * c[2] * t)).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn damped_spectra_are_stable_and_conjugate_symmetric(
        lambda in 0.0f64..1.0, gb in 0.01f64..0.5, n in 1usize..=2, n_max in 1usize..=3,
    ) {
        let p = DickeParams::resonant(lambda, n, n_max).unwrap();
        let s = chaos::damped_spectrum(&p, gb).unwrap();
        prop_assert!(s.max_real_part() <= 1e-8);
        prop_assert!(s.stationary_count >= 1);
        let scale = s.eigenvalues.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut unmatched: Vec<C64> = s.eigenvalues.clone();
        while let Some(z) = unmatched.pop() {
            if z.im.abs() <= 1e-9 * scale {
                continue;
            }
            let (k, dist) = unmatched
                .iter()
                .enumerate()
                .map(|(k, w)| (k, (w - z.conj()).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            prop_assert!(dist <= 1e-8 * scale, "no partner for {z}");
            unmatched.swap_remove(k);
        }
    }
}

#[test]
fn fano_approaches_one_far_from_resonance() {
    for (gl, gr) in [(0.1, 0.1), (0.05, 0.2), (1.0, 0.01)] {
        let tq = TransportQubit {
            epsilon: 0.0,
            delta: 0.1,
            g: 1.0,
            gamma_l: gl,
            gamma_r: gr,
        };
        let (_, f) = transport::passive_noise(&tq, 1e4).unwrap();
        assert!((f - 1.0).abs() < 1e-4, "F = {f}");
    }
}

#[test]
fn normal_phase_derivative_minimum_sits_at_the_transition() {
    let spec = SystemSpec::current_figure(1, 1, 0.0);
    let grid = criticality::uniform_grid(0.30, 0.4975, 2.5e-3).unwrap();
    let sw = criticality::sweep(&spec, SweepParameter::Lambda, &grid, SweepMode::NormalPhase).unwrap();
    let d = criticality::derivative(&sw.curve(Observable::Current)).unwrap();
    // the derivative diverges towards λ_c, so the most negative value is the last grid point
    let (k, _) = d
        .observable
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    assert!((0.5 - grid[k]).abs() <= 2.5e-3 + 1e-12);
}
