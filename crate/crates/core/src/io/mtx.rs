//! Matrix Market reader and writer.
//!
//! Reads `coordinate` and `array` files with `real`, `integer`, `complex` or
//! `pattern` fields and `general`, `symmetric`, `skew-symmetric` or `hermitian`
//! storage. Writes `coordinate` files, `real` when every entry is real.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
    Hermitian,
}

pub fn read_matrix_market(path: &Path) -> Result<CMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text, path)
}

/// Parses Matrix Market text; `file` is only used in error messages.
pub fn parse_matrix_market(text: &str, file: &Path) -> Result<CMatrix> {
    let err = |line: usize, msg: &str| Error::parse(file, line, msg);
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(
            1,
            "expected '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let coordinate = match tokens[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(err(1, &format!("unsupported format '{other}'"))),
    };
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" if coordinate => Field::Pattern,
        other => return Err(err(1, &format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(err(1, &format!("unsupported symmetry '{other}'"))),
    };

    let mut data = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = data.next().ok_or_else(|| err(1, "missing size line"))?;
    let size_line = size_line + 1;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(size_line, "size line must hold integers"))?;
    let (rows, cols, nnz) = match (coordinate, dims.as_slice()) {
        (true, [r, c, nz]) => (*r, *c, *nz),
        (false, [r, c]) => (*r, *c, r * c),
        _ => return Err(err(size_line, "malformed size line")),
    };
    if symmetry != Symmetry::General && rows != cols {
        return Err(err(size_line, "symmetric storage needs a square matrix"));
    }

    let mut m = CMatrix::zeros(rows, cols);
    let per_entry = match field {
        Field::Real => 1,
        Field::Complex => 2,
        Field::Pattern => 0,
    } + if coordinate { 2 } else { 0 };
    let mut count = 0;
    // array storage of symmetric matrices lists only the lower triangle
    let array_positions: Vec<(usize, usize)> = if coordinate {
        Vec::new()
    } else {
        (0..cols)
            .flat_map(|j| {
                let start = if symmetry == Symmetry::General { 0 } else { j };
                (start..rows).map(move |i| (i, j))
            })
            .collect()
    };
    let expected = if coordinate {
        nnz
    } else {
        array_positions.len()
    };

    for (idx, line) in data {
        let ln = idx + 1;
        if count == expected {
            return Err(err(ln, "more entries than declared"));
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != per_entry {
            return Err(err(
                ln,
                &format!("expected {per_entry} fields, found {}", t.len()),
            ));
        }
        let num = |s: &str| -> Result<f64> {
            let v: f64 = s
                .parse()
                .map_err(|_| err(ln, &format!("bad number '{s}'")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(ln, "non-finite entry"))
            }
        };
        let (i, j, rest) = if coordinate {
            let i: usize = t[0].parse().map_err(|_| err(ln, "bad row index"))?;
            let j: usize = t[1].parse().map_err(|_| err(ln, "bad column index"))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(err(ln, &format!("index ({i}, {j}) out of range")));
            }
            (i - 1, j - 1, &t[2..])
        } else {
            let (i, j) = array_positions[count];
            (i, j, &t[..])
        };
        let v = match field {
            Field::Real => C64::new(num(rest[0])?, 0.0),
            Field::Complex => C64::new(num(rest[0])?, num(rest[1])?),
            Field::Pattern => C64::new(1.0, 0.0),
        };
        m[(i, j)] += v;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] += v,
                Symmetry::Skew => m[(j, i)] -= v,
                Symmetry::Hermitian => m[(j, i)] += v.conj(),
            }
        }
        count += 1;
    }
    if count != expected {
        return Err(err(
            text.lines().count(),
            &format!("declared {expected} entries, found {count}"),
        ));
    }
    Ok(m)
}

/// Matrix Market text in coordinate general storage; zero entries are omitted.
pub fn format_matrix_market(m: &CMatrix) -> String {
    let real = m.is_real();
    let nnz = m
        .as_slice()
        .iter()
        .filter(|z| z.re != 0.0 || z.im != 0.0)
        .count();
    let mut out = String::new();
    let field = if real { "real" } else { "complex" };
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate {field} general");
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), nnz);
    for j in 0..m.cols() {
        for (i, z) in m.col(j).iter().enumerate() {
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            if real {
                let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, z.re);
            } else {
                let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, z.re, z.im);
            }
        }
    }
    out
}

pub fn write_matrix_market(path: &Path, m: &CMatrix) -> Result<()> {
    fs::write(path, format_matrix_market(m))?;
    Ok(())
}
