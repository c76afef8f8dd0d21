//! MatrixMarket coordinate and array formats for real matrices and vectors.

use std::fmt::Write as _;

use phss_core::sparse::{CsrMatrix, TripletBuilder};

use crate::error::{HarnessError, Result};

/// `%%MatrixMarket matrix coordinate real general`, 1-based, one entry per
/// stored nonzero. Values use the shortest representation that round-trips.
pub fn write_matrix(a: &CsrMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.dim(), a.dim(), a.nnz());
    for (i, j, v) in a.iter() {
        let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, v);
    }
    out
}

/// `%%MatrixMarket matrix array real general` with a single column.
pub fn write_vector(v: &[f64]) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} 1", v.len());
    for x in v {
        let _ = writeln!(out, "{x:?}");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

/// Reads a square coordinate matrix (`real` or `integer`; `general`,
/// `symmetric` or `skew-symmetric`). Duplicate entries are summed.
pub fn read_matrix(text: &str) -> Result<CsrMatrix> {
    const SRC: &str = "mtx";
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, banner) = lines.next().ok_or_else(|| HarnessError::parse(SRC, 1, "empty file"))?;
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(HarnessError::parse(SRC, 1, "expected a `%%MatrixMarket matrix` banner"));
    }
    if words[2] != "coordinate" {
        return Err(HarnessError::parse(SRC, 1, format!("unsupported layout `{}`", words[2])));
    }
    if words[3] != "real" && words[3] != "integer" {
        return Err(HarnessError::parse(SRC, 1, format!("unsupported field `{}`", words[3])));
    }
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(HarnessError::parse(SRC, 1, format!("unsupported symmetry `{other}`"))),
    };
    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = data.next().ok_or_else(|| HarnessError::parse(SRC, 2, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|f| f.parse().map_err(|_| HarnessError::parse(SRC, sline, format!("bad size field `{f}`"))))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(HarnessError::parse(SRC, sline, "size line needs rows, columns and entry count"));
    };
    if rows != cols {
        return Err(HarnessError::parse(SRC, sline, format!("matrix is {rows}x{cols}, expected square")));
    }
    let mut b = TripletBuilder::with_capacity(rows, nnz);
    let mut seen = 0;
    for (line, content) in data {
        let f: Vec<&str> = content.split_whitespace().collect();
        if f.len() != 3 {
            return Err(HarnessError::parse(SRC, line, "entry needs row, column and value"));
        }
        let idx = |s: &str| -> Result<usize> {
            match s.parse::<usize>() {
                Ok(k) if (1..=rows).contains(&k) => Ok(k - 1),
                _ => Err(HarnessError::parse(SRC, line, format!("index `{s}` out of range 1..={rows}"))),
            }
        };
        let (i, j) = (idx(f[0])?, idx(f[1])?);
        let v: f64 = f[2].parse().map_err(|_| HarnessError::parse(SRC, line, format!("bad value `{}`", f[2])))?;
        b.push(i, j, v);
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => b.push(j, i, v),
                Symmetry::Skew => b.push(j, i, -v),
            }
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(HarnessError::parse(SRC, sline, format!("size line announces {nnz} entries, found {seen}")));
    }
    Ok(b.build())
}
