//! Executes a [`RunConfig`]: load or generate, optionally row-scale,
//! factor or precondition, solve, and measure.

use std::time::Instant;

use frontal_core::krylov::{diagonal_preconditioner, gmres, ilut, NoPreconditioner};
use frontal_core::multifrontal::analyze_and_factorize;
use frontal_core::problems::{gen_elasticity_hex, gen_poisson7};
use frontal_core::sparse::row_scale;
use frontal_core::{ConvergenceHistory, FactorMode, Preconditioner, SparseMatrix};

use crate::config::{GenSpec, PrecondKind, ProblemSource, RunConfig, SolverMode};
use crate::error::{Error, Result};
use crate::mm::read_matrix_market;
use crate::report::RunReport;

/// A problem read from disk gets `b = A 1`.
pub fn load_problem(source: &ProblemSource) -> Result<(SparseMatrix, Vec<f64>)> {
    match source {
        ProblemSource::File(path) => {
            let a = read_matrix_market(path)?;
            let b = a.spmv(&vec![1.0; a.ncols()])?;
            Ok((a, b))
        }
        ProblemSource::Gen(GenSpec::Poisson { nx, ny, nz }) => Ok(gen_poisson7(*nx, *ny, *nz)),
        ProblemSource::Gen(g) => Ok(gen_elasticity_hex(&g.mesh().expect("elasticity spec"))?),
    }
}

/// Everything a run produces besides files.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub x: Vec<f64>,
    pub history: Option<ConvergenceHistory>,
    pub fronts_csv: Option<String>,
}

pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let (a, b) = load_problem(&config.source)?;
    run_on(config, &a, &b)
}

/// Runs every config on one shared problem.
pub fn compare(configs: &[RunConfig]) -> Result<Vec<RunOutcome>> {
    let Some(first) = configs.first() else {
        return Ok(Vec::new());
    };
    if let Some(c) = configs.iter().find(|c| c.source != first.source) {
        return Err(Error::Config(format!(
            "mismatched problem sources: {} and {}",
            first.source, c.source
        )));
    }
    for c in configs {
        c.validate()?;
    }
    let (a, b) = load_problem(&first.source)?;
    configs.iter().map(|c| run_on(c, &a, &b)).collect()
}

/// Runs `config` on an already loaded system.
pub fn run_on(config: &RunConfig, a: &SparseMatrix, b: &[f64]) -> Result<RunOutcome> {
    config.validate()?;
    let p = &config.params;
    let scaled;
    let (sa, sb) = if config.scale_rows {
        let (m, v, _) = row_scale(a, b)?;
        scaled = (m, v);
        (&scaled.0, &scaled.1[..])
    } else {
        (a, b)
    };

    let mut report = RunReport {
        source: config.source.to_string(),
        mode: config.mode.label(),
        n: a.nrows(),
        nnz: a.nnz(),
        scaled_rows: config.scale_rows,
        params: *p,
        factor_seconds: 0.0,
        solve_seconds: 0.0,
        peak_stored_reals: 0,
        stored_reals: 0,
        iterations: None,
        converged: None,
        relative_residual: 0.0,
        structured_fronts: None,
        full_outer_products: None,
        front_stats: None,
    };
    let mut history = None;
    let mut fronts_csv = None;

    let factor_mode = match config.mode {
        SolverMode::Direct(m) => Some(m),
        SolverMode::Gmres(PrecondKind::Amf) => Some(FactorMode::Accelerated),
        SolverMode::Gmres(_) => None,
    };
    let t = Instant::now();
    let factor = factor_mode
        .map(|m| analyze_and_factorize(sa, p.nd_leaf, m, p.mf_params()).map(|(_, f)| f))
        .transpose()?;
    if let Some(f) = &factor {
        report.factor_seconds = t.elapsed().as_secs_f64();
        report.peak_stored_reals = f.peak_stored_reals();
        report.stored_reals = f.stored_reals();
        report.structured_fronts = Some(f.structured_fronts());
        report.full_outer_products = Some(f.full_outer_products());
        fronts_csv = Some(f.stats_csv());
    }

    let x = match (config.mode, &factor) {
        (SolverMode::Direct(_), Some(f)) => {
            let t = Instant::now();
            let x = f.solve(sb)?;
            report.solve_seconds = t.elapsed().as_secs_f64();
            x
        }
        (SolverMode::Gmres(kind), _) => {
            let opts = p.gmres_options();
            let mut solve = |m: &dyn Preconditioner| -> Result<Vec<f64>> {
                let t = Instant::now();
                let (x, h) = gmres(sa, sb, m, &opts)?;
                report.solve_seconds = t.elapsed().as_secs_f64();
                report.iterations = Some(h.iterations);
                report.converged = Some(h.converged);
                history = Some(h);
                Ok(x)
            };
            match (kind, &factor) {
                (PrecondKind::Amf, Some(f)) => solve(f)?,
                (PrecondKind::None, _) => solve(&NoPreconditioner)?,
                (PrecondKind::Diag, _) => {
                    let t = Instant::now();
                    let m = diagonal_preconditioner(sa)?;
                    report.factor_seconds = t.elapsed().as_secs_f64();
                    report.peak_stored_reals = a.nrows();
                    report.stored_reals = a.nrows();
                    solve(&m)?
                }
                (PrecondKind::Ilut, _) => {
                    let t = Instant::now();
                    let m = ilut(sa, p.k, p.drop_tol)?;
                    report.factor_seconds = t.elapsed().as_secs_f64();
                    report.peak_stored_reals = m.stored_reals();
                    report.stored_reals = m.stored_reals();
                    solve(&m)?
                }
                (PrecondKind::Amf, None) => unreachable!("factor built above"),
            }
        }
        (SolverMode::Direct(_), None) => unreachable!("factor built above"),
    };
    report.relative_residual = relative_residual(a, &x, b)?;
    Ok(RunOutcome {
        report,
        x,
        history,
        fronts_csv,
    })
}

/// `‖b - A x‖₂ / ‖b‖₂`, or `‖A x‖₂` when `b = 0`.
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = a.spmv(x)?;
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(if nb > 0.0 { r / nb } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(n: usize) -> ProblemSource {
        ProblemSource::Gen(GenSpec::Poisson { nx: n, ny: n, nz: n })
    }

    #[test]
    fn direct_conventional_is_exact() {
        let out = run(&RunConfig::new(
            poisson(4),
            SolverMode::Direct(FactorMode::Conventional),
        ))
        .unwrap();
        assert!(out.report.relative_residual <= 1e-10);
        assert!(out.report.iterations.is_none());
        assert!(out.fronts_csv.unwrap().starts_with("node,front_size"));
    }

    #[test]
    fn every_preconditioner_converges() {
        for kind in [
            PrecondKind::None,
            PrecondKind::Diag,
            PrecondKind::Ilut,
            PrecondKind::Amf,
        ] {
            let mut c = RunConfig::new(poisson(6), SolverMode::Gmres(kind));
            c.params.n_c = 32;
            c.scale_rows = kind == PrecondKind::Diag;
            let out = run(&c).unwrap();
            assert_eq!(out.report.converged, Some(true), "{kind:?}");
            assert!(out.report.relative_residual <= 1e-6, "{kind:?}");
            assert_eq!(out.history.unwrap().iterations, out.report.iterations.unwrap());
        }
    }

    #[test]
    fn compare_rejects_mixed_sources() {
        let a = RunConfig::new(poisson(3), SolverMode::Gmres(PrecondKind::Ilut));
        let b = RunConfig::new(poisson(4), SolverMode::Gmres(PrecondKind::Ilut));
        let e = compare(&[a.clone(), b]).unwrap_err();
        assert!(e.to_string().contains("mismatched problem sources"));
        assert_eq!(compare(&[a]).unwrap().len(), 1);
    }

    #[test]
    fn missing_file_names_path() {
        let c = RunConfig::new(
            ProblemSource::File("/no/such/dir/m.mtx".into()),
            SolverMode::Direct(FactorMode::Conventional),
        );
        let e = run(&c).unwrap_err();
        assert!(e.to_string().contains("/no/such/dir/m.mtx"), "{e}");
    }
}
