//! The `estimate` subcommand and the method runner it shares with `bench`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, ValueEnum};
use vnentropy::densmat::{read_matrix_market, read_spectrum};
use vnentropy::sketch::default_s_sketch_scaled;
use vnentropy::{
    check_assumptions, chebyshev_entropy_with_model, exact_entropy, sketch_entropy, taylor_entropy_with_model,
    EstimateReport, EstimatorConfig, Method, ProjectionKind, ProjectionSpec, RngStream, SparseSymMatrix,
    SpectralModel, UMode,
};

use crate::record::EstimateRecord;
use crate::{parse_seed, sidecar_path, CliError};

/// Stream index of the sketch projection under the root seed; 0 and 1 belong
/// to the power method and the probes.
const SKETCH_STREAM: u64 = 2;

/// Tolerance for the oracle against a supplied spectrum in `exact` runs.
const ORACLE_AGREEMENT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Taylor,
    Chebyshev,
    Sketch,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Matrix Market file.
    matrix: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Lower bound on the nonzero probabilities; needed unless --m is given.
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    /// Probe count (taylor, chebyshev) or sketch width (sketch).
    #[arg(long)]
    s: Option<usize>,
    /// six, raw or manual:<value>.
    #[arg(long, default_value = "six", value_parser = parse_u_mode)]
    u_mode: UMode,
    /// Exact trace of the polynomial instead of random probes.
    #[arg(long)]
    nte: bool,
    /// gaussian, srht, countsketch or exact.
    #[arg(long, value_parser = parse_proj)]
    proj: Option<ProjectionKind>,
    #[arg(long)]
    rank: Option<usize>,
    /// Multiplier on the default sketch width.
    #[arg(long, default_value_t = 1.0)]
    sketch_constant: f64,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    /// Spectrum file; defaults to `<matrix>.spectrum` when that exists.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Report `wall_ms` as null so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

pub fn parse_u_mode(s: &str) -> Result<UMode, String> {
    s.parse().map_err(|e: vnentropy::Error| e.to_string())
}

pub fn parse_proj(s: &str) -> Result<ProjectionKind, String> {
    s.parse().map_err(|e: vnentropy::Error| e.to_string())
}

#[derive(Debug, Clone)]
pub enum MethodSpec {
    Exact,
    Taylor(EstimatorConfig),
    Chebyshev(EstimatorConfig),
    Sketch { kind: ProjectionKind, s: Option<usize>, rank: usize, epsilon: f64, constant: f64, seed: u64 },
}

/// Reads the spectrum at `explicit`, or the sidecar next to `matrix` if one exists.
pub fn load_spectrum(matrix: &Path, explicit: Option<&Path>) -> Result<Option<SpectralModel>, CliError> {
    let path = match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let p = sidecar_path(matrix);
            if !p.exists() {
                return Ok(None);
            }
            p
        }
    };
    let probs = read_spectrum(&path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(Some(SpectralModel::new(probs, None)?))
}

pub fn run_method(
    r: &SparseSymMatrix,
    model: Option<&SpectralModel>,
    spec: &MethodSpec,
) -> Result<EstimateRecord, CliError> {
    let (n, nnz) = (r.dim(), r.nnz());
    let record = match spec {
        MethodSpec::Exact => {
            let started = Instant::now();
            let (h, _) = exact_entropy(r)?;
            // The oracle is its own reference; a supplied spectrum is only cross-checked.
            let mut report = EstimateReport::new(Method::Exact, h, 0);
            report.attach_exact(h);
            if let Some(model) = model {
                let want = model.entropy();
                if (h - want).abs() > ORACLE_AGREEMENT * want.max(1.0) {
                    report.warnings.push(format!("oracle entropy {h} disagrees with the supplied spectrum ({want})"));
                }
            }
            let mut rec = EstimateRecord::bare("exact", n, nnz, 0, h);
            rec.exact = report.exact;
            rec.rel_err = report.rel_err;
            rec.abs_err = report.abs_err;
            rec.warnings = report.warnings;
            rec.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            rec
        }
        MethodSpec::Taylor(cfg) => {
            let report = taylor_entropy_with_model(r, cfg, model)?;
            EstimateRecord::from_report(report, n, nnz, cfg.u_mode.to_string())
        }
        MethodSpec::Chebyshev(cfg) => {
            let report = chebyshev_entropy_with_model(r, cfg, model)?;
            EstimateRecord::from_report(report, n, nnz, cfg.u_mode.to_string())
        }
        &MethodSpec::Sketch { kind, s, rank, epsilon, constant, seed } => {
            let started = Instant::now();
            let s = match s {
                Some(s) => s,
                None => default_s_sketch_scaled(kind, n, rank, epsilon, constant)?,
            };
            let spec = ProjectionSpec { kind, s, stream: RngStream::from_seed(seed).derive(SKETCH_STREAM) };
            let out = sketch_entropy(r, rank, &spec)?;
            let mut report = EstimateReport::new(Method::Sketch, out.entropy_tilde, seed);
            if let Some(model) = model {
                report.attach_exact(model.entropy());
                report.attach_assumptions(check_assumptions(Some(model), None, None, Some(rank)));
            }
            let mut rec = EstimateRecord::bare("sketch", n, nnz, seed, out.entropy_tilde);
            rec.s = Some(out.s);
            rec.proj = Some(kind.as_str());
            rec.rank = Some(rank);
            rec.probs = Some(out.probs_tilde);
            rec.exact = report.exact;
            rec.rel_err = report.rel_err;
            rec.abs_err = report.abs_err;
            rec.assumptions = report.assumptions.into();
            rec.warnings = report.warnings;
            rec.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
            rec
        }
    };
    if !record.estimate.is_finite() {
        return Err(CliError::Numerical(format!("non-finite estimate {}", record.estimate)));
    }
    Ok(record)
}

impl EstimateArgs {
    fn method_spec(&self) -> Result<MethodSpec, CliError> {
        let cfg = || EstimatorConfig {
            epsilon: self.eps,
            delta: self.delta,
            ell: self.ell,
            u_mode: self.u_mode,
            m_override: self.m,
            s_override: self.s,
            nte: self.nte,
            seed: self.seed,
            ..Default::default()
        };
        Ok(match self.method {
            MethodArg::Exact => MethodSpec::Exact,
            MethodArg::Taylor => MethodSpec::Taylor(cfg()),
            MethodArg::Chebyshev => MethodSpec::Chebyshev(cfg()),
            MethodArg::Sketch => {
                let kind = self.proj.ok_or_else(|| CliError::Usage("sketch requires --proj".into()))?;
                let rank = self.rank.ok_or_else(|| CliError::Usage("sketch requires --rank".into()))?;
                MethodSpec::Sketch { kind, s: self.s, rank, epsilon: self.eps, constant: self.sketch_constant, seed: self.seed }
            }
        })
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let spec = args.method_spec()?;
    let r = read_matrix_market(&args.matrix).map_err(|e| CliError::Usage(format!("{}: {e}", args.matrix.display())))?;
    let model = load_spectrum(&args.matrix, args.spectrum.as_deref())?;
    let mut record = run_method(&r, model.as_ref(), &spec)?;
    if args.no_timing {
        record.wall_ms = None;
    }
    println!("{}", record.to_json());
    Ok(())
}
