//! The state-space model carrier and its system-theoretic quantities:
//! transfer evaluation, poles, Gramians, `H2` and band-limited `H2` norms,
//! cross Gramians and error systems.
//!
//! The feedthrough term is identically zero: every model is strictly proper.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matfun::{
    compute_f, eigenvalues, ensure_stable, solve_lyapunov, solve_sylvester, to_complex,
    ComplexMatrix, FrequencyBand, RealMatrix, Tolerances,
};

/// `G(s) = C (sI - A)⁻¹ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: RealMatrix,
    b: RealMatrix,
    c: RealMatrix,
}

impl StateSpace {
    pub fn new(a: RealMatrix, b: RealMatrix, c: RealMatrix) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n || b.ncols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "B is {}x{}, expected {n}xm with m >= 1",
                b.nrows(),
                b.ncols()
            )));
        }
        if c.ncols() != n || c.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "C is {}x{}, expected px{n} with p >= 1",
                c.nrows(),
                c.ncols()
            )));
        }
        if a.iter().chain(b.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("state-space matrices must be finite".into()));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn b(&self) -> &RealMatrix {
        &self.b
    }

    pub fn c(&self) -> &RealMatrix {
        &self.c
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    /// The dual system `(Aᵀ, Cᵀ, Bᵀ)`, whose transfer function is `G(s)ᵀ`.
    pub fn dual(&self) -> Self {
        Self {
            a: self.a.transpose(),
            b: self.c.transpose(),
            c: self.b.transpose(),
        }
    }

    pub fn into_parts(self) -> (RealMatrix, RealMatrix, RealMatrix) {
        (self.a, self.b, self.c)
    }

    pub fn is_stable(&self) -> bool {
        ensure_stable(&self.a, &Tolerances::default()).is_ok()
    }

    pub(crate) fn ensure_stable(&self) -> Result<()> {
        ensure_stable(&self.a, &Tolerances::default())
    }
}

/// Frequency-limited Gramians `(P_ω, Q_ω)`, or the ordinary Gramians when
/// `band` is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramianPair {
    pub p: RealMatrix,
    pub q: RealMatrix,
    pub band: Option<FrequencyBand>,
}

/// Cross Gramians between a full model and a reduced model:
/// `P̂_ω` (n×r) and `Q̂_ω` (r×n).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossGramians {
    pub p_hat: RealMatrix,
    pub q_hat: RealMatrix,
    pub band: FrequencyBand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Input,
    Output,
}

/// A model with the band-weighted channel appended:
/// input side `B_ω = [B, F(A)B]`, output side `C_ω = [C; C F(A)]`.
#[derive(Debug, Clone)]
pub struct AugmentedSystem {
    pub base: StateSpace,
    pub band: FrequencyBand,
    pub side: Side,
    pub f: RealMatrix,
    pub augmented: StateSpace,
}

impl AugmentedSystem {
    pub fn new(base: &StateSpace, band: &FrequencyBand, side: Side) -> Result<Self> {
        let f = compute_f(base.a(), band)?;
        Ok(Self::with_f(base, band, side, f))
    }

    pub(crate) fn with_f(base: &StateSpace, band: &FrequencyBand, side: Side, f: RealMatrix) -> Self {
        let (a, b, c) = (base.a(), base.b(), base.c());
        let augmented = match side {
            Side::Input => {
                let fb = &f * b;
                let mut b_aug = RealMatrix::zeros(b.nrows(), 2 * b.ncols());
                b_aug.columns_mut(0, b.ncols()).copy_from(b);
                b_aug.columns_mut(b.ncols(), b.ncols()).copy_from(&fb);
                StateSpace { a: a.clone(), b: b_aug, c: c.clone() }
            }
            Side::Output => {
                let cf = c * &f;
                let mut c_aug = RealMatrix::zeros(2 * c.nrows(), c.ncols());
                c_aug.rows_mut(0, c.nrows()).copy_from(c);
                c_aug.rows_mut(c.nrows(), c.nrows()).copy_from(&cf);
                StateSpace { a: a.clone(), b: b.clone(), c: c_aug }
            }
        };
        Self {
            base: base.clone(),
            band: *band,
            side,
            f,
            augmented,
        }
    }

    /// `G_ω(s)` (input side, p×2m) or `Ḡ_ω(s)` (output side, 2p×m).
    pub fn transfer_eval(&self, s: Complex64) -> Result<ComplexMatrix> {
        transfer_eval(&self.augmented, s)
    }
}

/// `C (sI - A)⁻¹ B` via an LU solve.
pub fn transfer_eval(sys: &StateSpace, s: Complex64) -> Result<ComplexMatrix> {
    let n = sys.order();
    let shifted = ComplexMatrix::identity(n, n) * s - to_complex(sys.a());
    let scale = shifted.norm().max(f64::MIN_POSITIVE);
    let lu = shifted.lu();
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    let singular = Error::SingularShift { re: s.re, im: s.im };
    if min_pivot <= (n as f64) * f64::EPSILON * scale {
        return Err(singular);
    }
    let x = lu.solve(&to_complex(sys.b())).ok_or(singular)?;
    Ok(to_complex(sys.c()) * x)
}

/// Eigenvalues of `A`, sorted by real part descending, then imaginary part
/// descending.
pub fn poles(sys: &StateSpace) -> Vec<Complex64> {
    let mut ev = eigenvalues(sys.a());
    sort_poles(&mut ev);
    ev
}

pub(crate) fn sort_poles(ev: &mut [Complex64]) {
    ev.sort_by(|x, y| {
        y.re.partial_cmp(&x.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Infinite-horizon Gramians: `AP + PAᵀ + BBᵀ = 0`, `AᵀQ + QA + CᵀC = 0`.
pub fn gramians_unlimited(sys: &StateSpace) -> Result<GramianPair> {
    sys.ensure_stable()?;
    let (a, b, c) = (sys.a(), sys.b(), sys.c());
    let p = solve_lyapunov(a, &(b * b.transpose()))?;
    let q = solve_lyapunov(&a.transpose(), &(c.transpose() * c))?;
    Ok(GramianPair { p, q, band: None })
}

/// Frequency-limited Gramians:
/// `AP_ω + P_ωAᵀ + F(A)BBᵀ + BBᵀF(A)ᵀ = 0` and its dual.
pub fn gramians_limited(sys: &StateSpace, band: &FrequencyBand) -> Result<GramianPair> {
    sys.ensure_stable()?;
    let f = compute_f(sys.a(), band)?;
    gramians_limited_with_f(sys, band, &f)
}

pub(crate) fn gramians_limited_with_f(
    sys: &StateSpace,
    band: &FrequencyBand,
    f: &RealMatrix,
) -> Result<GramianPair> {
    let (a, b, c) = (sys.a(), sys.b(), sys.c());
    let bb = b * b.transpose();
    let fbb = f * &bb;
    let p = solve_lyapunov(a, &(&fbb + fbb.transpose()))?;
    let cc = c.transpose() * c;
    let ccf = &cc * f;
    let q = solve_lyapunov(&a.transpose(), &(&ccf + ccf.transpose()))?;
    Ok(GramianPair {
        p,
        q,
        band: Some(*band),
    })
}

/// `trace(C P Cᵀ)` cross-checked against `trace(Bᵀ Q B)`.
fn squared_norm_from(sys: &StateSpace, g: &GramianPair) -> Result<f64> {
    let (b, c) = (sys.b(), sys.c());
    let primal = (c * &g.p * c.transpose()).trace();
    let dual = (b.transpose() * &g.q * b).trace();
    let floor = 1e-12 * (c.norm_squared() * g.p.norm() + b.norm_squared() * g.q.norm());
    if (primal - dual).abs() > 1e-8 * primal.abs().max(dual.abs()) + floor {
        return Err(Error::NormCrossCheck { primal, dual });
    }
    Ok(primal.max(0.0))
}

/// `‖G‖²_{H2}`.
pub fn h2_norm_squared(sys: &StateSpace) -> Result<f64> {
    squared_norm_from(sys, &gramians_unlimited(sys)?)
}

pub fn h2_norm(sys: &StateSpace) -> Result<f64> {
    h2_norm_squared(sys).map(f64::sqrt)
}

/// `‖G‖²_{H2,ω}`.
pub fn h2w_norm_squared(sys: &StateSpace, band: &FrequencyBand) -> Result<f64> {
    squared_norm_from(sys, &gramians_limited(sys, band)?)
}

pub fn h2w_norm(sys: &StateSpace, band: &FrequencyBand) -> Result<f64> {
    h2w_norm_squared(sys, band).map(f64::sqrt)
}

/// Cross Gramians
/// `A P̂ + P̂ Ãᵀ + F(A) B B̃ᵀ + B B̃ᵀ F(Ã)ᵀ = 0` and
/// `Ãᵀ Q̂ + Q̂ A + F(Ã)ᵀ C̃ᵀ C + C̃ᵀ C F(A) = 0`.
pub fn cross_gramians(full: &StateSpace, rom: &StateSpace, band: &FrequencyBand) -> Result<CrossGramians> {
    check_io(full, rom)?;
    full.ensure_stable()?;
    rom.ensure_stable()?;
    let f = compute_f(full.a(), band)?;
    let fr = compute_f(rom.a(), band)?;
    let (a, b, c) = (full.a(), full.b(), full.c());
    let (ar, br, cr) = (rom.a(), rom.b(), rom.c());
    let bbr = b * br.transpose();
    let wp = &f * &bbr + &bbr * fr.transpose();
    let p_hat = solve_sylvester(a, &ar.transpose(), &wp)?;
    let crc = cr.transpose() * c;
    let wq = fr.transpose() * &crc + &crc * &f;
    let q_hat = solve_sylvester(&ar.transpose(), a, &wq)?;
    Ok(CrossGramians {
        p_hat,
        q_hat,
        band: *band,
    })
}

fn check_io(full: &StateSpace, rom: &StateSpace) -> Result<()> {
    if full.inputs() != rom.inputs() || full.outputs() != rom.outputs() {
        return Err(Error::DimensionMismatch(format!(
            "systems have {}x{} and {}x{} transfer functions",
            full.outputs(),
            full.inputs(),
            rom.outputs(),
            rom.inputs()
        )));
    }
    Ok(())
}

/// Realisation of `G - G̃` of order `n + r`.
pub fn error_system(full: &StateSpace, rom: &StateSpace) -> Result<StateSpace> {
    check_io(full, rom)?;
    let (n, r) = (full.order(), rom.order());
    let (m, p) = (full.inputs(), full.outputs());
    let mut a = DMatrix::zeros(n + r, n + r);
    a.view_mut((0, 0), (n, n)).copy_from(full.a());
    a.view_mut((n, n), (r, r)).copy_from(rom.a());
    let mut b = DMatrix::zeros(n + r, m);
    b.rows_mut(0, n).copy_from(full.b());
    b.rows_mut(n, r).copy_from(rom.b());
    let mut c = DMatrix::zeros(p, n + r);
    c.columns_mut(0, n).copy_from(full.c());
    c.columns_mut(n, r).copy_from(&(-rom.c()));
    StateSpace::new(a, b, c)
}

/// `(ν, σ_max(G(jν)))` for every grid point, in grid order.
pub fn freq_response_samples(sys: &StateSpace, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    grid.iter()
        .map(|&nu| {
            let g = transfer_eval(sys, Complex64::new(0.0, nu))?;
            Ok((nu, max_singular_value(&g)))
        })
        .collect()
}

pub(crate) fn max_singular_value(g: &ComplexMatrix) -> f64 {
    g.clone().svd(false, false).singular_values.max()
}
