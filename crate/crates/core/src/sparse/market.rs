//! MatrixMarket coordinate format (`real general`, and `real symmetric` on read).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CscMatrix, Triplets};
use crate::error::{Error, Result};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Column-major entries, one-based indices, 17 significant digits.
pub fn format_matrix_market(a: &CscMatrix) -> String {
    let mut s = String::with_capacity(40 * a.nnz() + 64);
    s.push_str(HEADER);
    s.push('\n');
    writeln!(s, "{} {} {}", a.nrows(), a.ncols(), a.nnz()).unwrap();
    for (i, j, v) in a.find().iter() {
        writeln!(s, "{} {} {:.16e}", i + 1, j + 1, v).unwrap();
    }
    s
}

pub fn write_matrix_market(a: &CscMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_matrix_market(a))?;
    Ok(())
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CscMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_matrix_market(&text).map_err(|e| e.with_path(path))
}

pub fn parse_matrix_market(text: &str) -> Result<CscMatrix> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| Error::parse(1, "empty input"))?;
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(1, "expected '%%MatrixMarket matrix ...' banner"));
    }
    if words[2] != "coordinate" {
        return Err(Error::parse(1, format!("unsupported format '{}'", words[2])));
    }
    if words[3] != "real" && words[3] != "integer" {
        return Err(Error::parse(1, format!("unsupported field '{}'", words[3])));
    }
    let symmetric = match words[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(Error::parse(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut data = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sline, size) = data.next().ok_or_else(|| Error::parse(1, "missing size line"))?;
    let size: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| Error::parse(sline, format!("bad size field '{w}'"))))
        .collect::<Result<_>>()?;
    if size.len() != 3 {
        return Err(Error::parse(sline, "size line must hold 'rows cols entries'"));
    }
    let (m, n, nnz) = (size[0], size[1], size[2]);

    let mut t = Triplets::with_capacity(m, n, if symmetric { 2 * nnz } else { nnz });
    let mut count = 0;
    for (ln, l) in data {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::parse(ln, "entry must hold 'row col value'"));
        }
        let i: usize = f[0].parse().map_err(|_| Error::parse(ln, "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| Error::parse(ln, "bad column index"))?;
        let v: f64 = f[2].parse().map_err(|_| Error::parse(ln, "bad value"))?;
        if i == 0 || i > m || j == 0 || j > n {
            return Err(Error::parse(ln, format!("entry ({i},{j}) outside {m}x{n}")));
        }
        t.push(i - 1, j - 1, v);
        if symmetric && i != j {
            t.push(j - 1, i - 1, v);
        }
        count += 1;
    }
    if count != nnz {
        return Err(Error::parse(sline, format!("declared {nnz} entries, found {count}")));
    }
    CscMatrix::from_triplets(&t)
}
