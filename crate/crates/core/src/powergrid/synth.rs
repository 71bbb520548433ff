use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Admittance, BoundaryBus, MachineParams, NetworkModel};
use crate::error::{Error, Result};
use crate::ltimodel::StateSpace;
use crate::matfun::RealMatrix;

const OMEGA_S: f64 = 2.0 * PI * 60.0;
const AREA_SIZE: usize = 4;

/// Damping-ratio range for the oscillatory modes of synthetic benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingProfile {
    pub zeta_min: f64,
    pub zeta_max: f64,
}

impl Default for DampingProfile {
    fn default() -> Self {
        Self {
            zeta_min: 0.02,
            zeta_max: 0.3,
        }
    }
}

/// A lossless multi-area network: machines grouped in areas of four with
/// strong ties inside an area and weak ties between neighbouring areas,
/// one boundary bus per area. Two machines are lightly damped, the rest
/// well damped. Mechanical powers are set so that a random
/// set of small rotor angles is an equilibrium.
pub fn synth_network(n_machines: usize, seed: u64) -> Result<NetworkModel> {
    if n_machines < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 machines, got {n_machines}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n_machines;
    let areas = n.div_ceil(AREA_SIZE);
    let area = |i: usize| i / AREA_SIZE;

    // two lightly damped machines carry the poorly damped modes
    let light_a = rng.random_range(0..n);
    let light_b = (light_a + 1 + rng.random_range(0..n - 1)) % n;
    let mut machines: Vec<MachineParams> = (0..n)
        .map(|i| {
            let h = rng.random_range(4.0..8.0);
            // D ω_s / (2H) is twice the decay rate of a mode local to machine i
            let rate = if i == light_a || i == light_b {
                rng.random_range(0.05..0.15)
            } else {
                rng.random_range(1.0..1.5)
            };
            let d = rate * 2.0 * h / OMEGA_S;
            let e = rng.random_range(1.0..1.1);
            MachineParams { h, d, e, t: 0.0 }
        })
        .collect();

    let mut y_gen = Admittance::zeros(n, n);
    let connect = |y: &mut Admittance, i: usize, j: usize, b: f64| {
        y.b[i][j] += b;
        y.b[j][i] += b;
        y.b[i][i] -= b;
        y.b[j][j] -= b;
    };
    for i in 0..n {
        for j in i + 1..n {
            let tie = if area(i) == area(j) {
                // a ring inside each area plus one random chord
                let k = j - i;
                if k == 1 || (k == AREA_SIZE - 1 && i % AREA_SIZE == 0) {
                    rng.random_range(0.6..1.4)
                } else if rng.random_bool(0.3) {
                    rng.random_range(0.2..0.6)
                } else {
                    0.0
                }
            } else if area(j) == area(i) + 1 && j % AREA_SIZE == 0 && i % AREA_SIZE == AREA_SIZE - 1 {
                rng.random_range(0.05..0.2)
            } else {
                0.0
            };
            if tie > 0.0 {
                connect(&mut y_gen, i, j, tie);
            }
        }
    }

    let mut y_boundary = Admittance::zeros(n, areas);
    let boundary: Vec<BoundaryBus> = (0..areas)
        .map(|k| {
            let first = k * AREA_SIZE;
            let i = first + rng.random_range(0..AREA_SIZE.min(n - first));
            y_boundary.b[i][k] = rng.random_range(0.5..1.5);
            BoundaryBus {
                v: rng.random_range(0.98..1.05),
                theta: rng.random_range(-0.1..0.1),
            }
        })
        .collect();

    let mut net = NetworkModel {
        machines: machines.clone(),
        y_gen,
        y_boundary,
        boundary,
        omega_s: OMEGA_S,
    };
    let delta: Vec<f64> = (0..n).map(|_| rng.random_range(-0.3..0.3)).collect();
    let theta: Vec<f64> = net.boundary.iter().map(|b| b.theta).collect();
    let v: Vec<f64> = net.boundary.iter().map(|b| b.v).collect();
    let pe = net.electrical_power(&delta, &theta, &v);
    for (m, p) in machines.iter_mut().zip(pe.iter()) {
        m.t = *p;
    }
    net.machines = machines;
    Ok(net)
}

/// A stable system with prescribed modal structure, hidden by a random
/// orthogonal similarity. Oscillatory pairs have frequencies between 0.1 and
/// 3 Hz and damping ratios drawn from `profile`, except that the first two
/// pairs sit in 0.2–1.5 Hz with damping at most 0.05. An odd order adds one
/// real pole.
pub fn synth_modal(order: usize, inputs: usize, outputs: usize, seed: u64, profile: DampingProfile) -> Result<StateSpace> {
    if order < 2 || inputs == 0 || outputs == 0 {
        return Err(Error::InvalidArgument(format!(
            "need order >= 2 and at least one input and output, got {order}, {inputs}, {outputs}"
        )));
    }
    if !(profile.zeta_min > 0.0 && profile.zeta_min <= profile.zeta_max && profile.zeta_max < 1.0) {
        return Err(Error::InvalidArgument("damping profile needs 0 < zeta_min <= zeta_max < 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = order / 2;
    let mut m = RealMatrix::zeros(order, order);
    for k in 0..pairs {
        let (f, zeta) = if k < 2 {
            (rng.random_range(0.2..1.5), rng.random_range(profile.zeta_min.min(0.01)..=profile.zeta_min.min(0.05)))
        } else {
            let lf = rng.random_range(0.1_f64.ln()..3.0_f64.ln());
            (lf.exp(), rng.random_range(profile.zeta_min..=profile.zeta_max))
        };
        let wn = 2.0 * PI * f / (1.0 - zeta * zeta).sqrt();
        let (re, im) = (-zeta * wn, 2.0 * PI * f);
        let i = 2 * k;
        m[(i, i)] = re;
        m[(i, i + 1)] = im;
        m[(i + 1, i)] = -im;
        m[(i + 1, i + 1)] = re;
    }
    if order % 2 == 1 {
        m[(order - 1, order - 1)] = -rng.random_range(0.5..5.0);
    }
    let g = RealMatrix::from_fn(order, order, |_, _| rng.sample::<f64, _>(StandardNormal));
    let q = g.qr().q();
    let a = q.transpose() * m * &q;
    let b = RealMatrix::from_fn(order, inputs, |_, _| rng.sample::<f64, _>(StandardNormal));
    let c = RealMatrix::from_fn(outputs, order, |_, _| rng.sample::<f64, _>(StandardNormal));
    StateSpace::new(a, b, c)
}

/// Order `2·n_machines`, two inputs and two outputs, with at least two
/// lightly damped electromechanical-style pairs.
pub fn synth_benchmark(n_machines: usize, seed: u64, profile: DampingProfile) -> Result<StateSpace> {
    if n_machines < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 machines, got {n_machines}")));
    }
    synth_modal(2 * n_machines, 2, 2, seed, profile)
}
