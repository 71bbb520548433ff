//! Frequency-domain quadrature oracles, independent of the logarithm and
//! Lyapunov paths.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::Result;
use crate::ltimodel::{GramianPair, StateSpace};
use crate::matfun::{eigenvalues, ensure_stable, to_complex, ComplexMatrix, FrequencyBand, RealMatrix, Tolerances};

pub const DEFAULT_NODES: usize = 256;
const MIN_NODES: usize = 8;
const MAX_PANELS: usize = 20_000;
const IMAG_TOL: f64 = 1e-9;

/// `(sI - A)⁻¹ X` through a single Hessenberg reduction `A = U H Uᵀ`.
pub(crate) struct Resolvent {
    u: ComplexMatrix,
    h: ComplexMatrix,
}

impl Resolvent {
    pub(crate) fn new(a: &RealMatrix) -> Self {
        let hess = a.clone().hessenberg();
        let (u, h) = hess.unpack();
        Self {
            u: to_complex(&u),
            h: to_complex(&h),
        }
    }

    /// `(sI - A)⁻¹ x` for a right-hand side already expressed as `Uᵀ x`;
    /// the result is returned in the same rotated coordinates.
    fn solve_rotated(&self, s: Complex64, rhs: &mut ComplexMatrix) {
        let n = self.h.nrows();
        // upper Hessenberg: eliminate the single subdiagonal with row pivoting
        let mut m = -&self.h;
        for i in 0..n {
            m[(i, i)] += s;
        }
        for k in 0..n.saturating_sub(1) {
            if m[(k + 1, k)].norm() > m[(k, k)].norm() {
                m.swap_rows(k, k + 1);
                rhs.swap_rows(k, k + 1);
            }
            let pivot = m[(k, k)];
            if pivot.norm() == 0.0 {
                continue;
            }
            let l = m[(k + 1, k)] / pivot;
            if l.norm() == 0.0 {
                continue;
            }
            for j in k..n {
                let v = m[(k, j)];
                m[(k + 1, j)] -= l * v;
            }
            for j in 0..rhs.ncols() {
                let v = rhs[(k, j)];
                rhs[(k + 1, j)] -= l * v;
            }
        }
        for j in 0..rhs.ncols() {
            for i in (0..n).rev() {
                let mut acc = rhs[(i, j)];
                for k in i + 1..n {
                    acc -= m[(i, k)] * rhs[(k, j)];
                }
                rhs[(i, j)] = acc / m[(i, i)];
            }
        }
    }

    pub(crate) fn rotate(&self, x: &RealMatrix) -> ComplexMatrix {
        self.u.transpose() * to_complex(x)
    }

    pub(crate) fn unrotate(&self, y: &ComplexMatrix) -> ComplexMatrix {
        &self.u * y
    }

    /// `(sI - A)⁻¹ X` given `Uᵀ X`, in rotated coordinates.
    pub(crate) fn apply(&self, s: Complex64, rotated_rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut y = rotated_rhs.clone();
        self.solve_rotated(s, &mut y);
        y
    }
}

/// Panels `[a, b]` of `[lo, hi]` with each panel no wider than twice its
/// distance to the nearest pole, so that every Gauss–Legendre rule sees an
/// analytic integrand on a comfortable Bernstein ellipse.
pub(crate) fn panels(lo: f64, hi: f64, poles: &[Complex64]) -> Vec<(f64, f64)> {
    let dist = |a: f64, b: f64| {
        poles
            .iter()
            .map(|z| {
                let nearest = z.im.clamp(a, b);
                (z.re * z.re + (z.im - nearest).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut cuts: Vec<f64> = vec![lo, hi];
    for z in poles {
        let (b, w) = (z.im.abs(), z.re.abs());
        for k in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let x = b + k * w;
            if x > lo && x < hi {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::new();
    let mut stack: Vec<(f64, f64)> = cuts.windows(2).rev().map(|w| (w[0], w[1])).collect();
    while let Some((a, b)) = stack.pop() {
        if b - a <= 2.0 * dist(a, b) || out.len() + stack.len() > MAX_PANELS {
            out.push((a, b));
        } else {
            let mid = 0.5 * (a + b);
            stack.push((mid, b));
            stack.push((a, mid));
        }
    }
    out
}

fn rule(nodes: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(nodes.max(MIN_NODES)).expect("positive");
    let gl = GaussLegendre::new(n);
    gl.nodes().copied().zip(gl.weights().copied()).collect()
}

/// `(1/2π) ∫_band f(ν) dν` over the symmetric band, i.e. both half-bands.
fn integrate<F>(band: &FrequencyBand, poles: &[Complex64], nodes: usize, rows: usize, cols: usize, mut f: F) -> ComplexMatrix
where
    F: FnMut(f64) -> ComplexMatrix,
{
    let rule = rule(nodes);
    let mut total = ComplexMatrix::zeros(rows, cols);
    for (a, b) in panels(band.omega_lo, band.omega_hi, poles) {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut panel = ComplexMatrix::zeros(rows, cols);
        for &(x, w) in &rule {
            let nu = mid + half * x;
            let weight = Complex64::from(w * half);
            panel += (f(nu) + f(-nu)) * weight;
        }
        total += panel;
    }
    total / Complex64::from(2.0 * PI)
}

fn ensure_real(m: &ComplexMatrix, what: &str) -> RealMatrix {
    let re = m.map(|z| z.re);
    let im = m.map(|z| z.im).amax();
    assert!(
        im <= IMAG_TOL * re.amax().max(1.0),
        "{what}: quadrature left an imaginary part of {im:e}"
    );
    re
}

/// `F(A) = (1/2π) ∫_band (jνI - A)⁻¹ dν` by composite Gauss–Legendre
/// quadrature with `nodes` points per panel.
pub fn oracle_f(a: &RealMatrix, band: &FrequencyBand, nodes: usize) -> Result<RealMatrix> {
    band.validate()?;
    ensure_stable(a, &Tolerances::default())?;
    let n = a.nrows();
    let res = Resolvent::new(a);
    let eye = res.rotate(&RealMatrix::identity(n, n));
    let poles = eigenvalues(a);
    let integral = integrate(band, &poles, nodes, n, n, |nu| {
        res.unrotate(&res.apply(Complex64::new(0.0, nu), &eye))
    });
    Ok(ensure_real(&integral, "F(A)"))
}

/// `(1/2π) ∫_band f(ν) dν` for a real, even integrand: twice the integral
/// over the positive half-band. Panel sums are added pairwise.
fn integrate_even<F, const K: usize>(band: &FrequencyBand, poles: &[Complex64], nodes: usize, mut f: F) -> [f64; K]
where
    F: FnMut(f64) -> [f64; K],
{
    let rule = rule(nodes);
    let sums: Vec<[f64; K]> = panels(band.omega_lo, band.omega_hi, poles)
        .into_iter()
        .map(|(a, b)| {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let mut acc = [0.0; K];
            for &(x, w) in &rule {
                let v = f(mid + half * x);
                for k in 0..K {
                    acc[k] += w * half * v[k];
                }
            }
            acc
        })
        .collect();
    pairwise(&sums).map(|v| 2.0 * v / (2.0 * PI))
}

fn pairwise<const K: usize>(xs: &[[f64; K]]) -> [f64; K] {
    match xs.len() {
        0 => [0.0; K],
        1 => xs[0],
        n => {
            let (l, r) = (pairwise(&xs[..n / 2]), pairwise(&xs[n / 2..]));
            std::array::from_fn(|k| l[k] + r[k])
        }
    }
}

/// `‖G‖²_{H2,ω} = (1/2π) ∫_band ‖G(jν)‖²_F dν`. For a real system
/// `‖G(-jν)‖_F = ‖G(jν)‖_F`, so only the positive half-band is sampled.
pub fn oracle_h2w_squared(sys: &StateSpace, band: &FrequencyBand, nodes: usize) -> Result<f64> {
    band.validate()?;
    sys.ensure_stable()?;
    let res = Resolvent::new(sys.a());
    let rb = res.rotate(sys.b());
    let cu = to_complex(sys.c()) * &res.u;
    let poles = eigenvalues(sys.a());
    let [v] = integrate_even(band, &poles, nodes, |nu| {
        [(&cu * res.apply(Complex64::new(0.0, nu), &rb)).norm_squared()]
    });
    Ok(v.max(0.0))
}

/// `‖G‖²`, `‖G̃‖²` and `‖G - G̃‖²` in the band-limited norm from one sweep:
/// both transfer functions are sampled at the same nodes on panels built
/// from the poles of both models.
pub(crate) fn oracle_h2w_triple(
    full: &StateSpace,
    rom: &StateSpace,
    band: &FrequencyBand,
    nodes: usize,
) -> Result<[f64; 3]> {
    band.validate()?;
    full.ensure_stable()?;
    rom.ensure_stable()?;
    let eval = |sys: &StateSpace| {
        let res = Resolvent::new(sys.a());
        let rb = res.rotate(sys.b());
        let cu = to_complex(sys.c()) * &res.u;
        (res, rb, cu)
    };
    let (res, rb, cu) = eval(full);
    let (rres, rrb, rcu) = eval(rom);
    let mut poles = eigenvalues(full.a());
    poles.extend(eigenvalues(rom.a()));
    let v = integrate_even(band, &poles, nodes, |nu| {
        let s = Complex64::new(0.0, nu);
        let g = &cu * res.apply(s, &rb);
        let gr = &rcu * rres.apply(s, &rrb);
        [g.norm_squared(), gr.norm_squared(), (g - gr).norm_squared()]
    });
    Ok(v.map(|x| x.max(0.0)))
}

/// `‖G‖_{H2,ω}` by quadrature.
pub fn oracle_h2w(sys: &StateSpace, band: &FrequencyBand, nodes: usize) -> Result<f64> {
    oracle_h2w_squared(sys, band, nodes).map(f64::sqrt)
}

/// Band-limited Gramians as frequency integrals:
/// `P_ω = (1/2π) ∫ (jνI-A)⁻¹ B Bᵀ (jνI-A)⁻ᴴ dν` and the dual `Q_ω`.
pub fn oracle_gramians(sys: &StateSpace, band: &FrequencyBand, nodes: usize) -> Result<GramianPair> {
    band.validate()?;
    sys.ensure_stable()?;
    let n = sys.order();
    let res = Resolvent::new(sys.a());
    let rb = res.rotate(sys.b());
    let poles = eigenvalues(sys.a());
    let p = integrate(band, &poles, nodes, n, n, |nu| {
        let x = res.unrotate(&res.apply(Complex64::new(0.0, nu), &rb));
        &x * x.adjoint()
    });
    let dual = Resolvent::new(&sys.a().transpose());
    let rc = dual.rotate(&sys.c().transpose());
    let q = integrate(band, &poles, nodes, n, n, |nu| {
        // (jνI - A)⁻ᴴ Cᵀ = (-jνI - Aᵀ)⁻¹ Cᵀ
        let y = dual.unrotate(&dual.apply(Complex64::new(0.0, -nu), &rc));
        &y * y.adjoint()
    });
    Ok(GramianPair {
        p: ensure_real(&p, "P_ω"),
        q: ensure_real(&q, "Q_ω"),
        band: Some(*band),
    })
}

