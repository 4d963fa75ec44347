use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use vnentropy::densmat::{
    generate_haar_like_density, generate_linear_plus_uniform, generate_low_rank_density, generate_tridiagonal_poisson,
    write_matrix_market, write_spectrum, Decay,
};
use vnentropy::{RngStream, SparseSymMatrix, SpectralModel};

use crate::{parse_seed, sidecar_path, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Haar,
    Tridiagonal,
    Lowrank,
    LinearUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayArg {
    Exponential,
    Linear,
}

impl From<DecayArg> for Decay {
    fn from(d: DecayArg) -> Self {
        match d {
            DecayArg::Exponential => Decay::Exponential,
            DecayArg::Linear => Decay::Linear,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Rank (lowrank) or number of linearly decaying values (linear-uniform).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "exponential")]
    decay: DecayArg,
    #[arg(long, value_parser = parse_seed, default_value = "0")]
    seed: u64,
    /// Matrix Market output; the spectrum goes to `<out>.spectrum`.
    #[arg(long)]
    out: PathBuf,
}

/// Builds a family member. The spectrum is absent only for large Haar-like
/// matrices beyond the exact oracle.
pub fn build(
    family: Family,
    n: usize,
    k: Option<usize>,
    decay: Decay,
    seed: u64,
) -> Result<(SparseSymMatrix, Option<SpectralModel>), CliError> {
    let stream = RngStream::from_seed(seed);
    let need_k = || k.ok_or_else(|| CliError::Usage(format!("--k is required for family {family:?}")));
    Ok(match family {
        Family::Haar => generate_haar_like_density(n, &stream)?,
        Family::Tridiagonal => {
            let (r, m) = generate_tridiagonal_poisson(n)?;
            (r, Some(m))
        }
        Family::Lowrank => {
            let (r, m) = generate_low_rank_density(n, need_k()?, decay, &stream)?;
            (r, Some(m))
        }
        Family::LinearUniform => {
            let (r, m) = generate_linear_plus_uniform(n, need_k()?, &stream)?;
            (r, Some(m))
        }
    })
}

#[derive(Serialize)]
struct Summary<'a> {
    family: &'a str,
    n: usize,
    nnz: usize,
    seed: u64,
    matrix: String,
    spectrum: Option<String>,
    entropy: Option<f64>,
}

pub fn run(args: &GenerateArgs) -> Result<(), CliError> {
    let (r, model) = build(args.family, args.n, args.k, args.decay.into(), args.seed)?;
    write_matrix_market(&r, &args.out)?;
    let spectrum = match &model {
        Some(m) => {
            let path = sidecar_path(&args.out);
            write_spectrum(m.probs(), &path)?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let family = args.family.to_possible_value().expect("no skipped variants");
    let summary = Summary {
        family: family.get_name(),
        n: r.dim(),
        nnz: r.nnz(),
        seed: args.seed,
        matrix: args.out.display().to_string(),
        spectrum,
        entropy: model.as_ref().map(SpectralModel::entropy),
    };
    println!("{}", serde_json::to_string(&summary).expect("serializable"));
    Ok(())
}
