use nalgebra::DVector;

use super::*;
use crate::ltimodel::poles;
use crate::reduction::select_modes;

fn smib(h: f64, d: f64, e: f64, v: f64, bbar: f64, delta0: f64) -> NetworkModel {
    let t = e * v * bbar * delta0.sin();
    NetworkModel {
        machines: vec![MachineParams { h, d, e, t }],
        y_gen: Admittance::zeros(1, 1),
        y_boundary: Admittance {
            g: vec![vec![0.0]],
            b: vec![vec![bbar]],
        },
        boundary: vec![BoundaryBus { v, theta: 0.0 }],
        omega_s: 2.0 * std::f64::consts::PI * 60.0,
    }
}

fn three_machine(seed: u64) -> NetworkModel {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = 3;
    let mut y = Admittance::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let g = rng.random_range(0.0..0.2);
            let b = rng.random_range(0.5..2.0);
            y.g[i][j] = g;
            y.g[j][i] = g;
            y.b[i][j] = b;
            y.b[j][i] = b;
        }
        y.g[i][i] = rng.random_range(0.0..0.3);
        y.b[i][i] = -rng.random_range(1.0..3.0);
    }
    let mut yb = Admittance::zeros(n, 2);
    yb.b[0][0] = 1.2;
    yb.g[0][0] = 0.1;
    yb.b[2][1] = 0.8;
    yb.g[2][1] = 0.05;
    NetworkModel {
        machines: (0..n)
            .map(|_| MachineParams {
                h: rng.random_range(3.0..8.0),
                d: rng.random_range(0.0..0.05),
                e: rng.random_range(1.0..1.1),
                t: rng.random_range(0.2..0.6),
            })
            .collect(),
        y_gen: y,
        y_boundary: yb,
        boundary: vec![BoundaryBus { v: 1.0, theta: 0.05 }, BoundaryBus { v: 1.02, theta: -0.1 }],
        omega_s: 2.0 * std::f64::consts::PI * 50.0,
    }
}

#[test]
fn smib_equilibrium_at_zero() {
    let net = smib(5.0, 0.02, 1.1, 1.0, 1.5, 0.0);
    let eq = solve_equilibrium(&net, &[0.2]).unwrap();
    assert!(eq.delta0[0].abs() < 1e-10);
}

#[test]
fn smib_matrix_matches_hand_derivation() {
    let (h, d, e, v, bbar, d0) = (4.0, 0.03, 1.05, 1.0, 1.3, 0.4);
    let net = smib(h, d, e, v, bbar, d0);
    let eq = solve_equilibrium(&net, &[0.0]).unwrap();
    assert!((eq.delta0[0] - d0).abs() < 1e-9);
    let sys = linearize_classical(&net, &eq).unwrap();
    let ws = net.omega_s;
    let k = e * v * bbar;
    let a21 = -k * ws * eq.delta0[0].cos() / (2.0 * h);
    let a22 = -d * ws / (2.0 * h);
    let a = sys.a();
    assert_eq!(a[(0, 0)], 0.0);
    assert_eq!(a[(0, 1)], 1.0);
    assert!((a[(1, 0)] - a21).abs() < 1e-12 * a21.abs());
    assert!((a[(1, 1)] - a22).abs() < 1e-12 * a22.abs());
    // λ² - a22 λ - a21 = 0
    let disc = nalgebra::Complex::new(a22 * a22 + 4.0 * a21, 0.0).sqrt();
    let mut want = [(a22 + disc) / 2.0, (a22 - disc) / 2.0];
    want.sort_by(|x, y| y.im.total_cmp(&x.im));
    let got = poles(&sys);
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).norm() < 1e-10);
    }
}

#[test]
fn smib_undamped_is_oscillatory() {
    let (h, e, v, bbar, d0) = (6.0, 1.0, 1.0, 2.0, 0.3);
    let net = smib(h, 0.0, e, v, bbar, d0);
    let eq = solve_equilibrium(&net, &[0.0]).unwrap();
    let sys = linearize_classical(&net, &eq).unwrap();
    let w = (e * v * bbar * net.omega_s * eq.delta0[0].cos() / (2.0 * h)).sqrt();
    for z in poles(&sys) {
        assert!(z.re.abs() < 1e-12);
        assert!((z.im.abs() - w).abs() < 1e-10);
    }
}

#[test]
fn symmetric_pair_has_equal_angles() {
    let mut yg = Admittance::zeros(2, 2);
    yg.b[0][1] = 1.0;
    yg.b[1][0] = 1.0;
    let m = MachineParams { h: 5.0, d: 0.01, e: 1.0, t: 0.3 };
    let net = NetworkModel {
        machines: vec![m, m],
        y_gen: yg,
        y_boundary: Admittance { g: vec![vec![0.0], vec![0.0]], b: vec![vec![1.0], vec![1.0]] },
        boundary: vec![BoundaryBus { v: 1.0, theta: 0.0 }],
        omega_s: 377.0,
    };
    let eq = solve_equilibrium(&net, &[0.1, -0.2]).unwrap();
    assert!((eq.delta0[0] - eq.delta0[1]).abs() < 1e-10);
}

#[test]
fn pinned_reference_without_boundary() {
    let mut yg = Admittance::zeros(2, 2);
    yg.b[0][1] = 1.0;
    yg.b[1][0] = 1.0;
    let net = NetworkModel {
        machines: vec![
            MachineParams { h: 5.0, d: 0.0, e: 1.0, t: 0.5 },
            MachineParams { h: 5.0, d: 0.0, e: 1.0, t: -0.5 },
        ],
        y_gen: yg,
        y_boundary: Admittance { g: vec![vec![], vec![]], b: vec![vec![], vec![]] },
        boundary: vec![],
        omega_s: 377.0,
    };
    let eq = solve_equilibrium(&net, &[0.25, 0.0]).unwrap();
    assert_eq!(eq.delta0[0], 0.25);
    assert!(((eq.delta0[0] - eq.delta0[1]).sin() - 0.5).abs() < 1e-9);
    assert_eq!(linearize_classical(&net, &eq).unwrap_err().name(), "InvalidNetwork");
}

#[test]
fn random_three_machine_residual() {
    for seed in 0..5 {
        let net = three_machine(seed);
        let eq = solve_equilibrium(&net, &[0.0; 3]).unwrap();
        let (theta, v): (Vec<f64>, Vec<f64>) = net.boundary.iter().map(|b| (b.theta, b.v)).unzip();
        let pe = net.electrical_power(&eq.delta0, &theta, &v);
        let worst = net.machines.iter().zip(pe.iter()).map(|(m, p)| (m.t - p).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-8);
        let x = DVector::from_fn(6, |r, _| if r < 3 { eq.delta0[r] } else { net.omega_s });
        let u = DVector::from_iterator(4, theta.iter().chain(&v).copied());
        assert!(swing_rhs(&net, &x, &u).amax() <= 1e-8 * net.omega_s);
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    for seed in 10..15 {
        let net = three_machine(seed);
        let eq = solve_equilibrium(&net, &[0.0; 3]).unwrap();
        let sys = linearize_classical(&net, &eq).unwrap();
        let fd = finite_difference_jacobian(&net, &eq, 1e-5);
        let mut analytic = RealMatrix::zeros(6, 10);
        analytic.columns_mut(0, 6).copy_from(sys.a());
        analytic.columns_mut(6, 4).copy_from(sys.b());
        let scale = analytic.amax();
        for (x, y) in analytic.iter().zip(fd.iter()) {
            assert!((x - y).abs() <= 1e-6 * x.abs().max(scale), "{x} vs {y}");
        }
    }
}

#[test]
fn lossless_undamped_spectrum_is_imaginary() {
    let mut net = synth_network(8, 3).unwrap();
    for m in &mut net.machines {
        m.d = 0.0;
    }
    let eq = solve_equilibrium(&net, &[0.0; 8]).unwrap();
    let sys = linearize_classical(&net, &eq).unwrap();
    assert!(poles(&sys).iter().all(|z| z.re.abs() <= 1e-8));
}

#[test]
fn sixteen_machines_give_order_32() {
    let net = synth_network(16, 1).unwrap();
    let eq = solve_equilibrium(&net, &[0.0; 16]).unwrap();
    let sys = linearize_classical(&net, &eq).unwrap();
    assert_eq!(sys.order(), 32);
    assert!(sys.is_stable());
    assert_eq!(sys.inputs(), 2 * net.n_boundary());
    assert!(!select_modes(&sys, 0.1, 2.0, 0.05).is_empty());
}

#[test]
fn synth_network_is_deterministic_and_valid() {
    let a = synth_network(6, 42).unwrap();
    let b = synth_network(6, 42).unwrap();
    assert_eq!(a, b);
    a.validate().unwrap();
    assert_ne!(a, synth_network(6, 43).unwrap());
    assert!(synth_network(1, 0).is_err());
}

#[test]
fn benchmark_properties() {
    let p = DampingProfile::default();
    let a = synth_benchmark(8, 7, p).unwrap();
    let b = synth_benchmark(8, 7, p).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.order(), 16);
    assert!(a.is_stable());
    let modes = select_modes(&a, 0.1, 2.0, 0.05);
    assert!(modes.len() >= 4);
    assert!(synth_benchmark(1, 0, p).is_err());
}

#[test]
fn validation_rejects_bad_networks() {
    let mut net = smib(5.0, 0.0, 1.0, 1.0, 1.0, 0.0);
    net.machines[0].h = 0.0;
    assert_eq!(net.validate().unwrap_err().name(), "InvalidNetwork");
    let mut net = three_machine(0);
    net.y_gen.b[0][1] += 0.1;
    assert_eq!(net.validate().unwrap_err().name(), "InvalidNetwork");
    let mut net = three_machine(0);
    net.omega_s = 0.0;
    assert!(net.validate().is_err());
}

#[test]
fn newton_reports_failure() {
    // demanded power above the transfer limit has no equilibrium
    let mut net = smib(5.0, 0.0, 1.0, 1.0, 1.0, 0.0);
    net.machines[0].t = 2.0;
    assert_eq!(solve_equilibrium(&net, &[0.0]).unwrap_err().name(), "NoConvergence");
}
