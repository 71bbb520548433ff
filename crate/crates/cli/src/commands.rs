//! The four subcommands.

use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use morlim::ltimodel::{error_system, freq_response_samples, h2_norm_squared, h2w_norm_squared, poles, Side};
use morlim::powergrid::{linearize_classical, solve_equilibrium, synth_network};
use morlim::reduction::{InterpolationSet, Method, ReductionReport};
use morlim::verify::{verdict, Certificate, VerifyOptions};
use morlim::{Complex64, FrequencyBand, RealMatrix, StateSpace};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::{Pair, RunConfig};
use crate::io::{ensure_dir, model_paths, read_json, read_mtx, write_csv, write_json, write_mtx};
use crate::run::{self, certify, mode_metrics, plan, plan_for, selected_mode_error, to_c, to_pair, Plan, PRESERVE_TOL};
use crate::{CliError, ExitStatus};

/// Points of the log-spaced response grid.
pub const GRID_POINTS: usize = 400;

/// Tangential interpolation data as stored in `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationRecord {
    pub side: Side,
    pub points: Vec<Pair>,
    pub directions: Vec<Vec<Pair>>,
}

impl InterpolationRecord {
    pub fn from_set(set: &InterpolationSet) -> Self {
        Self {
            side: set.side(),
            points: set.points().iter().map(to_pair).collect(),
            directions: set.directions().iter().map(|d| d.iter().map(to_pair).collect()).collect(),
        }
    }

    pub fn to_set(&self) -> morlim::Result<InterpolationSet> {
        let points = self.points.iter().map(to_c).collect();
        let dirs = self
            .directions
            .iter()
            .map(|d| DVector::from_iterator(d.len(), d.iter().map(to_c)))
            .collect();
        InterpolationSet::new(points, dirs, self.side)
    }
}

/// Contents of `report.json`. Non-finite numbers are written as `null`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub band: Option<FrequencyBand>,
    pub order: usize,
    pub nodes: usize,
    pub seed: u64,
    pub interpolation: Option<InterpolationRecord>,
    pub selected_modes: Vec<Pair>,
    #[serde(default)]
    pub preserved_poles: Vec<Pair>,
    #[serde(default)]
    pub rom_poles: Vec<Pair>,
    #[serde(default)]
    pub interpolation_residuals: Vec<f64>,
    #[serde(default)]
    pub full_norm_sq: Option<f64>,
    #[serde(default)]
    pub rom_norm_sq: Option<f64>,
    #[serde(default)]
    pub error_norm_sq: Option<f64>,
    #[serde(default)]
    pub energy_identity_gap: Option<f64>,
    #[serde(default)]
    pub pseudo_gramian_definite: Option<bool>,
    #[serde(default)]
    pub hankel_values: Vec<f64>,
    #[serde(default)]
    pub rom_stable: bool,
    #[serde(default)]
    pub tangential_rank: Option<usize>,
    #[serde(default)]
    pub augmented_rank: Option<usize>,
    #[serde(default, skip_deserializing)]
    pub certificates: Vec<Certificate>,
    #[serde(default)]
    pub verdict: String,
}

impl RunRecord {
    fn new(cfg: &RunConfig, plan: &Plan, report: &ReductionReport, certs: Vec<Certificate>) -> Self {
        let pairs = |v: &[Complex64]| v.iter().map(to_pair).collect::<Vec<_>>();
        Self {
            method: report.method,
            band: plan.band,
            order: plan.order,
            nodes: cfg.nodes,
            seed: cfg.seed,
            interpolation: plan.interp.as_ref().map(InterpolationRecord::from_set),
            selected_modes: pairs(&plan.selected),
            preserved_poles: pairs(&report.preserved_poles),
            rom_poles: pairs(&report.rom_poles),
            interpolation_residuals: report.interpolation_residuals.clone(),
            full_norm_sq: report.full_norm_sq,
            rom_norm_sq: report.rom_norm_sq,
            error_norm_sq: report.error_norm_sq,
            energy_identity_gap: report.energy_identity_gap,
            pseudo_gramian_definite: report.pseudo_gramian_definite,
            hankel_values: report.hankel_values.clone(),
            rom_stable: report.rom_stable,
            tangential_rank: report.tangential_rank,
            augmented_rank: report.augmented_rank,
            verdict: verdict_name(&certs).to_string(),
            certificates: certs,
        }
    }

    fn plan(&self) -> morlim::Result<Plan> {
        Ok(Plan {
            band: self.band,
            order: self.order,
            selected: self.selected_modes.iter().map(to_c).collect(),
            interp: self.interpolation.as_ref().map(InterpolationRecord::to_set).transpose()?,
        })
    }
}

fn verdict_name(certs: &[Certificate]) -> &'static str {
    match verdict(certs) {
        morlim::verify::Verdict::Pass => "pass",
        morlim::verify::Verdict::Fail => "fail",
        morlim::verify::Verdict::Inconclusive => "inconclusive",
    }
}

pub fn load_model(dir: &Path, prefix: &str) -> Result<StateSpace, CliError> {
    let [a, b, c] = model_paths(dir, prefix);
    let (a, b, c) = (read_mtx(&a)?, read_mtx(&b)?, read_mtx(&c)?);
    Ok(StateSpace::new(a, b, c)?)
}

pub fn save_model(dir: &Path, prefix: &str, sys: &StateSpace) -> Result<(), CliError> {
    let [a, b, c] = model_paths(dir, prefix);
    write_mtx(&a, sys.a())?;
    write_mtx(&b, sys.b())?;
    write_mtx(&c, sys.c())
}

/// 400 log-spaced points over `[1e-2, 1e2]` rad/s plus the band edges,
/// sorted, without duplicates.
pub fn response_grid(band: Option<&FrequencyBand>) -> Vec<f64> {
    let mut grid: Vec<f64> = (0..GRID_POINTS)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (GRID_POINTS - 1) as f64))
        .collect();
    if let Some(b) = band {
        grid.push(b.omega_lo);
        grid.push(b.omega_hi);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn print_certificates(certs: &[Certificate]) {
    for c in certs {
        let state = if c.inconclusive {
            "INCONCLUSIVE"
        } else if c.pass {
            "PASS"
        } else {
            "FAIL"
        };
        println!("{state:<12} {:<28} measured {:.3e} bound {:.1e}", c.name, c.measured, c.bound);
    }
    println!("verdict: {}", verdict_name(certs));
}

/// Reduce the model in `model_dir` as configured and write the run
/// artifacts to `out`.
pub fn cmd_reduce(cfg: &RunConfig, model_dir: &Path, out: &Path) -> Result<ExitStatus, CliError> {
    let sys = load_model(model_dir, "")?;
    let plan = plan(cfg, &sys)?;
    info!(
        "reducing order {} to {} with {}",
        sys.order(),
        plan.order,
        cfg.method.as_str()
    );
    let report = run::reduce(&sys, cfg.method, &plan)?;
    let opts = VerifyOptions { nodes: cfg.nodes };
    let certs = certify(&sys, &report, cfg.method, &plan, &opts);

    ensure_dir(out)?;
    save_model(out, "rom_", &report.rom)?;
    if let Some(g) = &report.pseudo_gramian {
        write_mtx(&out.join("pseudo_gramian.mtx"), g)?;
    }
    let record = RunRecord::new(cfg, &plan, &report, certs.clone());
    write_json(&out.join("report.json"), &record)?;

    let grid = response_grid(plan.band.as_ref());
    let err = error_system(&sys, &report.rom)?;
    let rows: Vec<Vec<String>> = freq_response_samples(&err, &grid)?
        .into_iter()
        .map(|(nu, s)| vec![format!("{nu:e}"), format!("{s:e}")])
        .collect();
    write_csv(&out.join("error_response.csv"), &["omega_rad_s", "sigma_max_error"], &rows)?;

    print_certificates(&certs);
    Ok(ExitStatus::from_verdict(verdict(&certs)))
}

/// Recompute all certificates of a finished run from its files.
pub fn cmd_verify(model_dir: &Path, run_dir: &Path) -> Result<ExitStatus, CliError> {
    let certs = verify_run(model_dir, run_dir)?;
    print_certificates(&certs);
    Ok(ExitStatus::from_verdict(verdict(&certs)))
}

pub fn verify_run(model_dir: &Path, run_dir: &Path) -> Result<Vec<Certificate>, CliError> {
    let sys = load_model(model_dir, "")?;
    let rom = load_model(run_dir, "rom_")?;
    let record: RunRecord = read_json(&run_dir.join("report.json"))?;
    let gram_path = run_dir.join("pseudo_gramian.mtx");
    let pseudo: Option<RealMatrix> = if gram_path.exists() {
        Some(read_mtx(&gram_path)?)
    } else {
        None
    };
    if rom.inputs() != sys.inputs() || rom.outputs() != sys.outputs() {
        return Err(CliError::usage(format!(
            "reduced model in {} does not match the channels of {}",
            run_dir.display(),
            model_dir.display()
        )));
    }
    let plan = record.plan()?;
    let report = ReductionReport::from_parts(rom, record.method, record.band, pseudo);
    Ok(certify(&sys, &report, record.method, &plan, &VerifyOptions { nodes: record.nodes }))
}

/// Write a synthetic network, its linearization and its spectrum to `out`.
pub fn cmd_synth(machines: usize, seed: u64, out: &Path) -> Result<ExitStatus, CliError> {
    if machines < 2 {
        return Err(CliError::usage(format!("a network needs at least 2 machines, got {machines}")));
    }
    let net = synth_network(machines, seed)?;
    let eq = solve_equilibrium(&net, &vec![0.0; machines])?;
    info!("equilibrium after {} Newton steps, residual {:.2e}", eq.iterations, eq.residual);
    let sys = linearize_classical(&net, &eq)?;
    ensure_dir(out)?;
    write_json(&out.join("network.json"), &net)?;
    save_model(out, "", &sys)?;
    let rows: Vec<Vec<String>> = poles(&sys)
        .iter()
        .map(|z| {
            let (f, zeta) = mode_metrics(z);
            vec![format!("{:e}", z.re), format!("{:e}", z.im), format!("{f:e}"), format!("{zeta:e}")]
        })
        .collect();
    write_csv(&out.join("spectrum.csv"), &["re", "im", "freq_hz", "damping"], &rows)?;
    println!("order {} model with {} inputs and {} outputs", sys.order(), sys.inputs(), sys.outputs());
    Ok(ExitStatus::Ok)
}

/// One line of `compare.csv`. Errors are absolute; `None` marks an unstable
/// reduced model or a failed run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub method: Method,
    pub order: usize,
    pub h2w_error: Option<f64>,
    pub h2w_rel_error: Option<f64>,
    pub h2_error: Option<f64>,
    /// `None` when no modes were selected.
    pub preserved: Option<bool>,
    pub preservation_error: Option<f64>,
    pub wall_time_s: f64,
    pub status: String,
}

impl CompareRow {
    fn fields(&self) -> Vec<String> {
        let num = |v: Option<f64>| v.map_or("nan".to_string(), |x| format!("{x:e}"));
        vec![
            self.method.as_str().to_string(),
            self.order.to_string(),
            num(self.h2w_error),
            num(self.h2w_rel_error),
            num(self.h2_error),
            self.preserved.map_or("n/a".to_string(), |p| p.to_string()),
            num(self.preservation_error),
            format!("{:.6}", self.wall_time_s),
            self.status.clone(),
        ]
    }
}

pub const COMPARE_METHODS: [Method; 4] = [Method::Flpork, Method::Pork, Method::Flbt, Method::Modal];

/// Run every method of [`COMPARE_METHODS`] on `sys` with the configured
/// band and order.
pub fn compare(cfg: &RunConfig, sys: &StateSpace) -> Result<Vec<CompareRow>, CliError> {
    let base = plan_for(cfg, Method::Flpork, sys)?;
    let band = base
        .band
        .ok_or_else(|| CliError::usage("compare needs a band"))?;
    if base.order >= sys.order() {
        return Err(CliError::usage(format!(
            "order {} must be below the model order {}",
            base.order,
            sys.order()
        )));
    }
    let mut modal_cfg = cfg.clone();
    modal_cfg.order = Some(base.order);
    let modal = plan_for(&modal_cfg, Method::Modal, sys)?;
    let selected: Vec<Complex64> = match &cfg.interpolation {
        Some(crate::config::InterpolationSpec::Explicit { .. }) => Vec::new(),
        _ => base.selected.clone(),
    };
    let full_w = h2w_norm_squared(sys, &band)?;

    let mut rows = Vec::new();
    for method in COMPARE_METHODS {
        let plan = if method == Method::Modal { &modal } else { &base };
        let start = Instant::now();
        let result = run::reduce(sys, method, plan);
        let wall_time_s = start.elapsed().as_secs_f64();
        let row = match result {
            Ok(report) => {
                let err = error_system(sys, &report.rom)?;
                let stable = report.rom_stable;
                let h2w = stable.then(|| h2w_norm_squared(&err, &band)).transpose()?.map(f64::sqrt);
                let h2 = stable.then(|| h2_norm_squared(&err)).transpose()?.map(f64::sqrt);
                let pe = (!selected.is_empty()).then(|| selected_mode_error(&selected, &report.rom_poles));
                CompareRow {
                    method,
                    order: report.rom.order(),
                    h2w_error: h2w,
                    h2w_rel_error: h2w.map(|e| e / full_w.sqrt()),
                    h2_error: h2,
                    preserved: pe.map(|e| e <= PRESERVE_TOL),
                    preservation_error: pe,
                    wall_time_s,
                    status: if stable { "ok" } else { "unstable" }.to_string(),
                }
            }
            Err(e) => {
                warn!("{} failed: {e}", method.as_str());
                CompareRow {
                    method,
                    order: plan.order,
                    h2w_error: None,
                    h2w_rel_error: None,
                    h2_error: None,
                    preserved: None,
                    preservation_error: None,
                    wall_time_s,
                    status: e.name().to_string(),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn cmd_compare(cfg: &RunConfig, model_dir: &Path, out: &Path) -> Result<ExitStatus, CliError> {
    let sys = load_model(model_dir, "")?;
    let rows = compare(cfg, &sys)?;
    ensure_dir(out)?;
    let header = [
        "method",
        "order",
        "h2w_error",
        "h2w_rel_error",
        "h2_error",
        "preserved",
        "preservation_error",
        "wall_time_s",
        "status",
    ];
    let table: Vec<Vec<String>> = rows.iter().map(CompareRow::fields).collect();
    write_csv(&out.join("compare.csv"), &header, &table)?;
    for r in &table {
        println!("{}", r.join("  "));
    }
    let failed = rows.iter().any(|r| r.status != "ok" && r.status != "unstable");
    Ok(if failed { ExitStatus::Numerical } else { ExitStatus::Ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_band_edges() {
        let band = FrequencyBand::new(0.5, 8.93).unwrap();
        let g = response_grid(Some(&band));
        assert_eq!(g.len(), GRID_POINTS + 2);
        assert!(g.contains(&0.5) && g.contains(&8.93));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g[0], 0.01);
        assert!((g[g.len() - 1] - 100.0).abs() < 1e-12);
        // a low-pass band adds 0 and deduplicates an edge already on the grid
        let g = response_grid(Some(&FrequencyBand::lowpass(100.0).unwrap()));
        assert_eq!(g.len(), GRID_POINTS + 1);
        assert_eq!(g[0], 0.0);
        assert_eq!(response_grid(None).len(), GRID_POINTS);
    }

    #[test]
    fn interpolation_record_round_trip() {
        let set = InterpolationSet::scalar(
            vec![Complex64::new(1.0, 2.0), Complex64::new(1.0, -2.0), Complex64::new(0.3, 0.0)],
            Side::Output,
        )
        .unwrap();
        let rec = InterpolationRecord::from_set(&set);
        let text = serde_json::to_string(&rec).unwrap();
        let back: InterpolationRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_set().unwrap().points(), set.points());
    }
}
