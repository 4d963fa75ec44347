//! Matrix Market coordinate format (real or integer, symmetric or general)
//! and the plain-text spectrum sidecar.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::SparseSymMatrix;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseSymMatrix> {
    read_matrix_market_from(BufReader::new(File::open(path)?))
}

/// Parses a coordinate-format stream.
///
/// `symmetric` files list one triangle and are mirrored on load. `general`
/// files must already be exactly symmetric. Indices are 1-based on disk.
pub fn read_matrix_market_from(reader: impl BufRead) -> Result<SparseSymMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(parse_err(1, "empty file")),
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(hline, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>' header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(hline, format!("unsupported format '{}'", tokens[2])));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(hline, format!("unsupported field '{}'", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(parse_err(hline, format!("unsupported symmetry '{other}'"))),
    };

    let mut size = None;
    let mut triplets = Vec::new();
    let mut line_of = Vec::new();
    let mut expected = 0usize;
    for (lineno, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let Some(n) = size else {
            if fields.len() != 3 {
                return Err(parse_err(lineno, "size line needs 'rows cols nnz'"));
            }
            let nums: Vec<usize> = fields
                .iter()
                .map(|f| f.parse::<usize>().map_err(|_| parse_err(lineno, format!("bad integer '{f}'"))))
                .collect::<Result<_>>()?;
            if nums[0] != nums[1] {
                return Err(parse_err(lineno, format!("matrix is {}x{}, expected square", nums[0], nums[1])));
            }
            if nums[0] == 0 {
                return Err(parse_err(lineno, "dimension must be at least 1"));
            }
            size = Some(nums[0]);
            expected = nums[2];
            continue;
        };
        if fields.len() != 3 {
            return Err(parse_err(lineno, "entry line needs 'row col value'"));
        }
        let index = |f: &str| -> Result<usize> {
            let i: usize = f.parse().map_err(|_| parse_err(lineno, format!("bad index '{f}'")))?;
            if i == 0 || i > n {
                return Err(parse_err(lineno, format!("index {i} outside 1..={n}")));
            }
            Ok(i - 1)
        };
        let (i, j) = (index(fields[0])?, index(fields[1])?);
        let v: f64 = fields[2].parse().map_err(|_| parse_err(lineno, format!("bad value '{}'", fields[2])))?;
        if !v.is_finite() {
            return Err(parse_err(lineno, "non-finite value"));
        }
        if symmetric && i < j {
            return Err(parse_err(lineno, "symmetric files must list the lower triangle only"));
        }
        triplets.push((i, j, v));
        line_of.push(lineno);
        if symmetric && i != j {
            triplets.push((j, i, v));
            line_of.push(lineno);
        }
    }
    let n = size.ok_or_else(|| parse_err(hline, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|t| t.0 >= t.1).count()
    } else {
        triplets.len()
    };
    if stored != expected {
        return Err(parse_err(hline, format!("header declares {expected} entries, found {stored}")));
    }

    // Re-run the constructor's checks here so failures carry a line number.
    let locate = |row: usize, col: usize| {
        triplets.iter().position(|t| (t.0, t.1) == (row, col)).map(|k| line_of[k]).unwrap_or(hline)
    };
    SparseSymMatrix::from_triplets(n, triplets.clone()).map_err(|e| match e {
        Error::NotSymmetric { row, col } => {
            parse_err(locate(row, col), format!("entry ({}, {}) has no matching transpose", row + 1, col + 1))
        }
        Error::DuplicateEntry { row, col } => {
            let lines: Vec<usize> = triplets
                .iter()
                .zip(&line_of)
                .filter(|(t, _)| (t.0, t.1) == (row, col))
                .map(|(_, &l)| l)
                .collect();
            parse_err(*lines.last().unwrap_or(&hline), format!("duplicate entry ({}, {})", row + 1, col + 1))
        }
        other => other,
    })
}

pub fn write_matrix_market(r: &SparseSymMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix_market_to(r, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Writes the lower triangle with 17 significant digits, which round-trips
/// every `f64` exactly.
pub fn write_matrix_market_to(r: &SparseSymMatrix, mut w: impl Write) -> Result<()> {
    let lower: Vec<(usize, usize, f64)> = r.triplets().filter(|t| t.0 >= t.1).collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", r.dim(), r.dim(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// One probability per line; blank lines and `#` comments are skipped.
pub fn read_spectrum(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut probs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let p: f64 = t.parse().map_err(|_| parse_err(i + 1, format!("bad probability '{t}'")))?;
        probs.push(p);
    }
    Ok(probs)
}

pub fn write_spectrum(probs: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in probs {
        writeln!(w, "{p:.16e}")?;
    }
    w.flush()?;
    Ok(())
}
