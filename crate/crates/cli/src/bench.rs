//! The `bench` subcommand: a TOML grid of estimator runs written as CSV.
//!
//! Rows follow grid order (method, m, s, u mode, seed, repetition) whatever
//! the thread count. Axes a method does not use collapse to a single blank
//! value, so `exact` yields one row per seed and repetition.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Deserialize;
use vnentropy::densmat::{read_matrix_market, Decay};
use vnentropy::{EstimatorConfig, ProjectionKind, SparseSymMatrix, SpectralModel, UMode};

use crate::generate::{build, DecayArg, Family};
use crate::record::EstimateRecord;
use crate::run::{load_spectrum, parse_proj, parse_u_mode, run_method, MethodSpec};
use crate::CliError;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Grid description (TOML).
    grid: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the wall_ms column empty so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    matrix: MatrixSource,
    methods: Vec<String>,
    m: Option<Vec<usize>>,
    s: Option<Vec<usize>>,
    #[serde(default = "default_u_modes")]
    u_modes: Vec<String>,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    #[serde(default = "one")]
    repetitions: usize,
    #[serde(default = "tenth")]
    eps: f64,
    #[serde(default = "tenth")]
    delta: f64,
    ell: Option<f64>,
    rank: Option<usize>,
    #[serde(default = "unit")]
    sketch_constant: f64,
}

fn default_u_modes() -> Vec<String> {
    vec!["six".into()]
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn one() -> usize {
    1
}
fn tenth() -> f64 {
    0.1
}
fn unit() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSource {
    family: Option<Family>,
    n: Option<usize>,
    k: Option<usize>,
    decay: Option<DecayArg>,
    #[serde(default)]
    seed: u64,
    path: Option<PathBuf>,
    spectrum: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BenchMethod {
    Exact,
    Taylor { nte: bool },
    Chebyshev { nte: bool },
    Sketch(ProjectionKind),
}

impl BenchMethod {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "exact" => BenchMethod::Exact,
            "taylor" => BenchMethod::Taylor { nte: false },
            "taylor-nte" => BenchMethod::Taylor { nte: true },
            "chebyshev" => BenchMethod::Chebyshev { nte: false },
            "chebyshev-nte" => BenchMethod::Chebyshev { nte: true },
            _ => match s.strip_prefix("sketch-") {
                Some(kind) => BenchMethod::Sketch(parse_proj(kind).map_err(CliError::Usage)?),
                None => return Err(CliError::Usage(format!("unknown bench method '{s}'"))),
            },
        })
    }

    fn uses_m(self) -> bool {
        matches!(self, BenchMethod::Taylor { .. } | BenchMethod::Chebyshev { .. })
    }

    fn uses_s(self) -> bool {
        matches!(self, BenchMethod::Taylor { nte: false } | BenchMethod::Chebyshev { nte: false } | BenchMethod::Sketch(_))
    }
}

#[derive(Debug, Clone)]
struct Cell {
    label: String,
    method: BenchMethod,
    /// Outer `None`: axis unused. Inner `None`: derived default.
    m: Option<Option<usize>>,
    s: Option<Option<usize>>,
    u_mode: Option<UMode>,
    seed: u64,
    rep: usize,
}

impl Cell {
    fn key(&self) -> [String; 4] {
        [
            self.label.clone(),
            axis(self.m),
            axis(self.s),
            self.u_mode.map(|u| u.to_string()).unwrap_or_default(),
        ]
    }
}

fn axis(v: Option<Option<usize>>) -> String {
    match v {
        None => String::new(),
        Some(None) => "auto".into(),
        Some(Some(x)) => x.to_string(),
    }
}

/// Seed for repetition `rep`; repetition 0 uses the seed itself.
fn cell_seed(seed: u64, rep: usize) -> u64 {
    seed.wrapping_add((rep as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Usage(format!("grid field '{name}' must not be empty")));
    }
    Ok(())
}

fn expand(grid: &Grid) -> Result<Vec<Cell>, CliError> {
    nonempty("methods", &grid.methods)?;
    nonempty("u_modes", &grid.u_modes)?;
    nonempty("seeds", &grid.seeds)?;
    if let Some(m) = &grid.m {
        nonempty("m", m)?;
    }
    if let Some(s) = &grid.s {
        nonempty("s", s)?;
    }
    if grid.repetitions == 0 {
        return Err(CliError::Usage("grid field 'repetitions' must be at least 1".into()));
    }
    let u_modes = grid.u_modes.iter().map(|u| parse_u_mode(u).map_err(CliError::Usage)).collect::<Result<Vec<_>, _>>()?;
    let ms: Vec<Option<usize>> = grid.m.as_ref().map_or(vec![None], |v| v.iter().copied().map(Some).collect());
    let ss: Vec<Option<usize>> = grid.s.as_ref().map_or(vec![None], |v| v.iter().copied().map(Some).collect());

    let mut cells = Vec::new();
    for label in &grid.methods {
        let method = BenchMethod::parse(label)?;
        if matches!(method, BenchMethod::Sketch(_)) && grid.rank.is_none() {
            return Err(CliError::Usage(format!("method '{label}' needs 'rank' in the grid")));
        }
        let m_axis: Vec<Option<Option<usize>>> = if method.uses_m() { ms.iter().map(|&m| Some(m)).collect() } else { vec![None] };
        let s_axis: Vec<Option<Option<usize>>> = if method.uses_s() { ss.iter().map(|&s| Some(s)).collect() } else { vec![None] };
        let u_axis: Vec<Option<UMode>> = if method.uses_m() { u_modes.iter().map(|&u| Some(u)).collect() } else { vec![None] };
        for &m in &m_axis {
            for &s in &s_axis {
                for &u_mode in &u_axis {
                    for &seed in &grid.seeds {
                        for rep in 0..grid.repetitions {
                            cells.push(Cell { label: label.clone(), method, m, s, u_mode, seed, rep });
                        }
                    }
                }
            }
        }
    }
    Ok(cells)
}

fn load_matrix(src: &MatrixSource, base: &Path) -> Result<(SparseSymMatrix, Option<SpectralModel>), CliError> {
    match (&src.family, &src.path) {
        (Some(family), None) => {
            let n = src.n.ok_or_else(|| CliError::Usage("matrix.n is required with matrix.family".into()))?;
            let decay: Decay = src.decay.unwrap_or(DecayArg::Exponential).into();
            build(*family, n, src.k, decay, src.seed)
        }
        (None, Some(path)) => {
            let path = base.join(path);
            let r = read_matrix_market(&path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let spectrum = src.spectrum.as_ref().map(|p| base.join(p));
            if let Some(p) = &spectrum {
                if !p.exists() {
                    return Err(CliError::Usage(format!("spectrum file {} does not exist", p.display())));
                }
            }
            let model = load_spectrum(&path, spectrum.as_deref())?;
            Ok((r, model))
        }
        _ => Err(CliError::Usage("matrix needs exactly one of 'family' or 'path'".into())),
    }
}

struct Row {
    cell: Cell,
    outcome: Result<EstimateRecord, CliError>,
}

fn run_cell(grid: &Grid, r: &SparseSymMatrix, model: Option<&SpectralModel>, cell: &Cell) -> Row {
    let seed = cell_seed(cell.seed, cell.rep);
    let cfg = |nte: bool| EstimatorConfig {
        epsilon: grid.eps,
        delta: grid.delta,
        ell: grid.ell.or_else(|| model.map(SpectralModel::p_min)),
        u_mode: cell.u_mode.unwrap_or(UMode::SixTimesPower),
        m_override: cell.m.flatten(),
        s_override: cell.s.flatten(),
        nte,
        seed,
        ..Default::default()
    };
    let spec = match cell.method {
        BenchMethod::Exact => MethodSpec::Exact,
        BenchMethod::Taylor { nte } => MethodSpec::Taylor(cfg(nte)),
        BenchMethod::Chebyshev { nte } => MethodSpec::Chebyshev(cfg(nte)),
        BenchMethod::Sketch(kind) => MethodSpec::Sketch {
            kind,
            s: cell.s.flatten(),
            rank: grid.rank.expect("checked during expansion"),
            epsilon: grid.eps,
            constant: grid.sketch_constant,
            seed,
        },
    };
    Row { cell: cell.clone(), outcome: run_method(r, model, &spec) }
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn fmt_f64(x: f64) -> String {
    if x == 0.0 || (1e-4..1e16).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn num(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn clean(msg: &str) -> String {
    msg.replace([',', '\n', '\r'], ";")
}

fn render(rows: &[Row], no_timing: bool) -> String {
    let mut out = String::from("method,m,s,u_mode,seed,rep,m_used,s_used,estimate,exact,rel_err,wall_ms,error\n");
    for row in rows {
        let [label, m, s, u] = row.cell.key();
        let _ = write!(out, "{label},{m},{s},{u},{},{},", row.cell.seed, row.cell.rep);
        match &row.outcome {
            Ok(rec) => {
                let wall = if no_timing { String::new() } else { num(rec.wall_ms) };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{wall},",
                    rec.m.map(|v| v.to_string()).unwrap_or_default(),
                    rec.s.map(|v| v.to_string()).unwrap_or_default(),
                    fmt_f64(rec.estimate),
                    num(rec.exact),
                    num(rec.rel_err),
                );
            }
            Err(e) => {
                let code = match e {
                    CliError::Usage(_) => "usage",
                    CliError::Numerical(_) => "numerical",
                };
                let _ = writeln!(out, ",,,,,,{code}: {}", clean(&e.to_string()));
            }
        }
    }
    out.push_str("\n# summary\nmethod,m,s,u_mode,runs,failures,mean_rel_err,max_rel_err\n");
    let mut groups: Vec<([String; 4], Vec<&Row>)> = Vec::new();
    for row in rows {
        let key = row.cell.key();
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    for (key, members) in &groups {
        let errs: Vec<f64> = members.iter().filter_map(|r| r.outcome.as_ref().ok().and_then(|rec| rec.rel_err)).collect();
        let failures = members.iter().filter(|r| r.outcome.is_err()).count();
        let (mean, max) = if errs.is_empty() {
            (String::new(), String::new())
        } else {
            let mean = errs.iter().sum::<f64>() / errs.len() as f64;
            (fmt_f64(mean), fmt_f64(errs.iter().copied().fold(0.0, f64::max)))
        };
        let _ = writeln!(out, "{},{},{},{},{},{failures},{mean},{max}", key[0], key[1], key[2], key[3], members.len());
    }
    out
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.grid).map_err(|e| CliError::Usage(format!("{}: {e}", args.grid.display())))?;
    let grid: Grid = toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.grid.display())))?;
    let cells = expand(&grid)?;
    let base = args.grid.parent().unwrap_or(Path::new("."));
    let (r, model) = load_matrix(&grid.matrix, base)?;
    let rows: Vec<Row> = cells.par_iter().map(|cell| run_cell(&grid, &r, model.as_ref(), cell)).collect();
    let csv = render(&rows, args.no_timing);
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
