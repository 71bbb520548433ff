use super::report::{Method, ReductionReport};
use crate::error::{Error, Result};
use crate::ltimodel::{gramians_limited, StateSpace};
use crate::matfun::{FrequencyBand, RealMatrix};

// σ̄_r below this fraction of σ̄₁ cannot be balanced
const HANKEL_FLOOR: f64 = 1e-14;

/// Frequency-limited balanced truncation to order `r` (`1 ≤ r ≤ n`).
///
/// The reduced model need not be stable; `rom_stable` records the outcome.
pub fn flbt(sys: &StateSpace, r: usize, band: &FrequencyBand) -> Result<ReductionReport> {
    band.validate()?;
    sys.ensure_stable()?;
    let n = sys.order();
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!("target order {r} must lie in 1..={n}")));
    }
    let g = gramians_limited(sys, band)?;
    let l = sqrt_factor(&g.p);
    let rq = sqrt_factor(&g.q);
    // square-root balancing: Rᵀ L = U Σ Yᵀ
    let svd = (rq.transpose() * &l).svd(true, true);
    let (u, yt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let hankel: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    if hankel[r - 1] <= HANKEL_FLOOR * hankel[0] || hankel[0] == 0.0 {
        return Err(Error::RankDeficientGramians(r));
    }
    let mut v = RealMatrix::zeros(n, r);
    let mut w = RealMatrix::zeros(n, r);
    for (k, &i) in order.iter().take(r).enumerate() {
        let s = hankel[k].powf(-0.5);
        v.set_column(k, &(&l * yt.row(i).transpose() * s));
        w.set_column(k, &(&rq * u.column(i) * s));
    }
    // WᵀV = I up to round-off amplified by 1/σ̄_r; restore it exactly
    let wt = (w.transpose() * &v)
        .lu()
        .solve(&w.transpose())
        .ok_or(Error::RankDeficientGramians(r))?;
    let rom = StateSpace::new(&wt * sys.a() * &v, &wt * sys.b(), sys.c() * &v)?;

    let mut report = ReductionReport::new(rom, Method::Flbt, Some(*band));
    report.hankel_values = hankel;
    report.with_norms(sys, Some(band))
}

/// `L` with `P = L Lᵀ`: Cholesky when it succeeds, otherwise the symmetric
/// eigendecomposition with negative round-off clipped to zero.
fn sqrt_factor(p: &RealMatrix) -> RealMatrix {
    let sym = (p + p.transpose()) * 0.5;
    if let Some(ch) = sym.clone().cholesky() {
        return ch.l();
    }
    let eig = sym.symmetric_eigen();
    let d = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * RealMatrix::from_diagonal(&d)
}
