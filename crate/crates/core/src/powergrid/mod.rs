//! Classical swing-equation models of multi-machine networks and seeded
//! synthetic benchmarks.
//!
//! Machine `i` obeys
//! `δ̇ᵢ = ωᵢ - ω_s` and `(2Hᵢ/ω_s) ω̇ᵢ = Tᵢ - Dᵢ(ωᵢ - ω_s) - Pᵢ` with
//! `Pᵢ = Eᵢ Σⱼ Eⱼ (Gᵢⱼ cos δᵢⱼ + Bᵢⱼ sin δᵢⱼ) + Eᵢ Σₖ V̄ₖ (Ḡᵢₖ cos(δᵢ-θ̄ₖ) + B̄ᵢₖ sin(δᵢ-θ̄ₖ))`.

mod synth;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ltimodel::StateSpace;
use crate::matfun::RealMatrix;

pub use synth::{synth_benchmark, synth_modal, synth_network, DampingProfile};

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    /// Inertia constant (s).
    #[serde(rename = "H")]
    pub h: f64,
    /// Damping coefficient (pu).
    #[serde(rename = "D")]
    pub d: f64,
    /// Internal voltage magnitude (pu).
    #[serde(rename = "E")]
    pub e: f64,
    /// Mechanical input power (pu).
    #[serde(rename = "T")]
    pub t: f64,
}

/// Complex admittance `G + jB` stored as two row-major real tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admittance {
    pub g: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl Admittance {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            g: vec![vec![0.0; cols]; rows],
            b: vec![vec![0.0; cols]; rows],
        }
    }

    fn shape(&self) -> Option<(usize, usize)> {
        let rows = self.g.len();
        let cols = self.g.first().map_or(0, Vec::len);
        let ok = self.b.len() == rows && self.g.iter().chain(&self.b).all(|r| r.len() == cols);
        ok.then_some((rows, cols))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBus {
    /// Voltage magnitude (pu).
    pub v: f64,
    /// Voltage angle (rad).
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel {
    pub machines: Vec<MachineParams>,
    pub y_gen: Admittance,
    pub y_boundary: Admittance,
    pub boundary: Vec<BoundaryBus>,
    pub omega_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub delta0: Vec<f64>,
    /// Largest power imbalance `|Tᵢ - Pᵢ|` (pu).
    pub residual: f64,
    pub iterations: usize,
}

impl NetworkModel {
    pub fn n_machines(&self) -> usize {
        self.machines.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_machines();
        let bad = |msg: String| Err(Error::InvalidNetwork(msg));
        if n == 0 {
            return bad("no machines".into());
        }
        if !(self.omega_s > 0.0 && self.omega_s.is_finite()) {
            return bad(format!("omega_s = {} must be positive", self.omega_s));
        }
        for (i, m) in self.machines.iter().enumerate() {
            if !(m.h > 0.0 && m.d >= 0.0 && m.e > 0.0 && m.t.is_finite() && m.h.is_finite() && m.d.is_finite() && m.e.is_finite()) {
                return bad(format!("machine {i} needs H > 0, D >= 0, E > 0"));
            }
        }
        match self.y_gen.shape() {
            Some((r, c)) if r == n && c == n => {}
            _ => return bad(format!("y_gen must be {n}x{n}")),
        }
        for i in 0..n {
            for j in 0..n {
                let (g, b) = (&self.y_gen.g, &self.y_gen.b);
                if (g[i][j] - g[j][i]).abs() > 1e-12 * (1.0 + g[i][j].abs()) || (b[i][j] - b[j][i]).abs() > 1e-12 * (1.0 + b[i][j].abs()) {
                    return bad(format!("y_gen is not symmetric at ({i}, {j})"));
                }
            }
        }
        let nb = self.n_boundary();
        if nb > 0 {
            match self.y_boundary.shape() {
                Some((r, c)) if r == n && c == nb => {}
                _ => return bad(format!("y_boundary must be {n}x{nb}")),
            }
        } else if self.y_boundary.g.iter().any(|r| !r.is_empty()) {
            return bad("y_boundary has columns but there are no boundary buses".into());
        }
        let all = self.y_gen.g.iter().chain(&self.y_gen.b).chain(&self.y_boundary.g).chain(&self.y_boundary.b);
        if all.flatten().any(|v| !v.is_finite()) || self.boundary.iter().any(|bus| !bus.v.is_finite() || !bus.theta.is_finite()) {
            return bad("non-finite network data".into());
        }
        Ok(())
    }

    /// Machines with a nonzero admittance to some boundary bus.
    pub fn boundary_machines(&self) -> Vec<usize> {
        (0..self.n_machines())
            .filter(|&i| (0..self.n_boundary()).any(|k| self.y_boundary.g[i][k] != 0.0 || self.y_boundary.b[i][k] != 0.0))
            .collect()
    }

    /// Electrical power `Pᵢ` at rotor angles `delta` and boundary voltages
    /// `(theta, v)`.
    pub fn electrical_power(&self, delta: &[f64], theta: &[f64], v: &[f64]) -> DVector<f64> {
        let n = self.n_machines();
        DVector::from_fn(n, |i, _| {
            let ei = self.machines[i].e;
            let mut p = 0.0;
            for j in 0..n {
                let d = delta[i] - delta[j];
                p += ei * self.machines[j].e * (self.y_gen.g[i][j] * d.cos() + self.y_gen.b[i][j] * d.sin());
            }
            for k in 0..self.n_boundary() {
                let d = delta[i] - theta[k];
                p += ei * v[k] * (self.y_boundary.g[i][k] * d.cos() + self.y_boundary.b[i][k] * d.sin());
            }
            p
        })
    }

    fn boundary_values(&self) -> (Vec<f64>, Vec<f64>) {
        (self.boundary.iter().map(|b| b.theta).collect(), self.boundary.iter().map(|b| b.v).collect())
    }

    /// `∂P/∂δ` (n×n).
    fn power_jacobian_delta(&self, delta: &[f64], theta: &[f64], v: &[f64]) -> RealMatrix {
        let n = self.n_machines();
        let mut j = RealMatrix::zeros(n, n);
        for i in 0..n {
            let ei = self.machines[i].e;
            let mut diag = 0.0;
            for k in 0..n {
                if k == i {
                    continue;
                }
                let d = delta[i] - delta[k];
                let (g, b) = (self.y_gen.g[i][k], self.y_gen.b[i][k]);
                let ee = ei * self.machines[k].e;
                diag += ee * (-g * d.sin() + b * d.cos());
                j[(i, k)] = ee * (g * d.sin() - b * d.cos());
            }
            for k in 0..self.n_boundary() {
                let d = delta[i] - theta[k];
                let (g, b) = (self.y_boundary.g[i][k], self.y_boundary.b[i][k]);
                diag += ei * v[k] * (-g * d.sin() + b * d.cos());
            }
            j[(i, i)] = diag;
        }
        j
    }

    /// `[∂P/∂θ̄, ∂P/∂V̄]` (n×2n_b).
    fn power_jacobian_boundary(&self, delta: &[f64], theta: &[f64], v: &[f64]) -> RealMatrix {
        let (n, nb) = (self.n_machines(), self.n_boundary());
        let mut j = RealMatrix::zeros(n, 2 * nb);
        for i in 0..n {
            let ei = self.machines[i].e;
            for k in 0..nb {
                let d = delta[i] - theta[k];
                let (g, b) = (self.y_boundary.g[i][k], self.y_boundary.b[i][k]);
                j[(i, k)] = ei * v[k] * (g * d.sin() - b * d.cos());
                j[(i, nb + k)] = ei * (g * d.cos() + b * d.sin());
            }
        }
        j
    }
}

/// Right-hand side of the swing equations for state `x = [δ; ω]` and
/// boundary input `u = [θ̄; V̄]` (absolute values).
pub fn swing_rhs(net: &NetworkModel, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
    let (n, nb) = (net.n_machines(), net.n_boundary());
    let delta: Vec<f64> = x.rows(0, n).iter().copied().collect();
    let theta: Vec<f64> = u.rows(0, nb).iter().copied().collect();
    let v: Vec<f64> = u.rows(nb, nb).iter().copied().collect();
    let pe = net.electrical_power(&delta, &theta, &v);
    DVector::from_fn(2 * n, |r, _| {
        if r < n {
            x[n + r] - net.omega_s
        } else {
            let i = r - n;
            let m = &net.machines[i];
            net.omega_s / (2.0 * m.h) * (m.t - m.d * (x[n + i] - net.omega_s) - pe[i])
        }
    })
}

/// Newton iteration for `Tᵢ = Pᵢ(δ)` with `ω = ω_s`.
///
/// Without boundary buses the angles are defined only up to a common shift,
/// so machine 0 is pinned at `guess[0]` and its balance equation dropped.
pub fn solve_equilibrium(net: &NetworkModel, guess: &[f64]) -> Result<Equilibrium> {
    net.validate()?;
    let n = net.n_machines();
    if guess.len() != n || guess.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidArgument(format!("guess needs {n} finite angles")));
    }
    let (theta, v) = net.boundary_values();
    let t = DVector::from_iterator(n, net.machines.iter().map(|m| m.t));
    let pin = net.n_boundary() == 0;
    let free: Vec<usize> = if pin { (1..n).collect() } else { (0..n).collect() };
    let mut delta = guess.to_vec();
    let mismatch = |d: &[f64]| &t - net.electrical_power(d, &theta, &v);
    let mut f = mismatch(&delta);
    for iter in 0..=NEWTON_MAX_ITER {
        let residual = f.amax();
        if residual <= NEWTON_TOL {
            return Ok(Equilibrium {
                delta0: delta,
                residual,
                iterations: iter,
            });
        }
        if iter == NEWTON_MAX_ITER || free.is_empty() {
            break;
        }
        let jac = net.power_jacobian_delta(&delta, &theta, &v);
        let k = free.len();
        let j_red = RealMatrix::from_fn(k, k, |r, c| jac[(free[r], free[c])]);
        let f_red = DVector::from_fn(k, |r, _| f[free[r]]);
        // f = T - P, so the Newton step solves (∂P/∂δ) Δ = f
        let Some(step) = j_red.lu().solve(&f_red) else {
            return Err(Error::NoConvergence(residual));
        };
        // backtrack on the max-norm of the mismatch
        let mut alpha = 1.0;
        loop {
            let mut trial = delta.clone();
            for (r, &i) in free.iter().enumerate() {
                trial[i] += alpha * step[r];
            }
            let ft = mismatch(&trial);
            if ft.amax() < residual || alpha < 1e-4 {
                delta = trial;
                f = ft;
                break;
            }
            alpha *= 0.5;
        }
    }
    Err(Error::NoConvergence(f.amax()))
}

/// Linearization about `eq`: states `(Δδ, Δω)`, inputs `(Δθ̄, ΔV̄)` for each
/// boundary bus, outputs the rotor angles of boundary-connected machines.
pub fn linearize_classical(net: &NetworkModel, eq: &Equilibrium) -> Result<StateSpace> {
    net.validate()?;
    let (n, nb) = (net.n_machines(), net.n_boundary());
    if eq.delta0.len() != n {
        return Err(Error::DimensionMismatch(format!("equilibrium has {} angles for {n} machines", eq.delta0.len())));
    }
    if nb == 0 {
        return Err(Error::InvalidNetwork("linearization needs at least one boundary bus".into()));
    }
    let outputs = net.boundary_machines();
    if outputs.is_empty() {
        return Err(Error::InvalidNetwork("no machine is connected to a boundary bus".into()));
    }
    let (theta, v) = net.boundary_values();
    let jd = net.power_jacobian_delta(&eq.delta0, &theta, &v);
    let ju = net.power_jacobian_boundary(&eq.delta0, &theta, &v);
    let mut a = RealMatrix::zeros(2 * n, 2 * n);
    let mut b = RealMatrix::zeros(2 * n, 2 * nb);
    for i in 0..n {
        let m = &net.machines[i];
        let gain = net.omega_s / (2.0 * m.h);
        a[(i, n + i)] = 1.0;
        a[(n + i, n + i)] = -m.d * gain;
        for k in 0..n {
            a[(n + i, k)] = -gain * jd[(i, k)];
        }
        for k in 0..2 * nb {
            b[(n + i, k)] = -gain * ju[(i, k)];
        }
    }
    let mut c = RealMatrix::zeros(outputs.len(), 2 * n);
    for (r, &i) in outputs.iter().enumerate() {
        c[(r, i)] = 1.0;
    }
    StateSpace::new(a, b, c)
}

/// Central finite-difference Jacobian `[∂f/∂x, ∂f/∂u]` of [`swing_rhs`] at
/// the equilibrium.
pub fn finite_difference_jacobian(net: &NetworkModel, eq: &Equilibrium, step: f64) -> RealMatrix {
    let (n, nb) = (net.n_machines(), net.n_boundary());
    let x0 = DVector::from_fn(2 * n, |r, _| if r < n { eq.delta0[r] } else { net.omega_s });
    let (theta, v) = net.boundary_values();
    let u0 = DVector::from_iterator(2 * nb, theta.into_iter().chain(v));
    let mut jac = RealMatrix::zeros(2 * n, 2 * n + 2 * nb);
    for col in 0..2 * n + 2 * nb {
        let (mut xp, mut xm, mut up, mut um) = (x0.clone(), x0.clone(), u0.clone(), u0.clone());
        if col < 2 * n {
            let h = step * x0[col].abs().max(1.0);
            xp[col] += h;
            xm[col] -= h;
            let d = (swing_rhs(net, &xp, &u0) - swing_rhs(net, &xm, &u0)) / (2.0 * h);
            jac.set_column(col, &d);
        } else {
            let k = col - 2 * n;
            let h = step * u0[k].abs().max(1.0);
            up[k] += h;
            um[k] -= h;
            let d = (swing_rhs(net, &x0, &up) - swing_rhs(net, &x0, &um)) / (2.0 * h);
            jac.set_column(col, &d);
        }
    }
    jac
}

#[cfg(test)]
mod tests;
