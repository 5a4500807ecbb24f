//! Line-oriented text mesh format.
//!
//! ```text
//! # comment
//! dim N NT
//! <N lines: dim coordinates>
//! <NT lines: dim+1 one-based vertex indices>
//! <optional NT lines: dim+1 face flags>
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::Mesh;
use crate::error::{Error, Result};

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_mesh(&text).map_err(|e| e.with_path(path))
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn format_mesh(mesh: &Mesh) -> String {
    let d = mesh.dim();
    let mut s = String::new();
    s.push_str("# simplicial mesh v1: dim N NT, nodes, elements (one-based), face flags\n");
    writeln!(s, "{} {} {}", d, mesh.n_nodes(), mesh.n_elems()).unwrap();
    for i in 0..mesh.n_nodes() {
        let row: Vec<String> = mesh.node(i).iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    for t in 0..mesh.n_elems() {
        let row: Vec<String> = mesh.elem(t).iter().map(|v| (v + 1).to_string()).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    for t in 0..mesh.n_elems() {
        let row: Vec<String> = mesh.flags(t).iter().map(|f| f.value().to_string()).collect();
        writeln!(s, "{}", row.join(" ")).unwrap();
    }
    s
}

fn parse_row<T: std::str::FromStr>(line_no: usize, line: &str, expect: usize, what: &str) -> Result<Vec<T>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != expect {
        return Err(Error::parse(
            line_no,
            format!("expected {expect} {what} values, found {}", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<T>()
                .map_err(|_| Error::parse(line_no, format!("cannot parse '{f}' as {what}")))
        })
        .collect()
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header line"))?;
    let header: Vec<usize> = parse_row(hline, header, 3, "header")?;
    let (dim, n, nt) = (header[0], header[1], header[2]);
    if dim != 2 && dim != 3 {
        return Err(Error::parse(hline, format!("dimension must be 2 or 3, got {dim}")));
    }

    let mut nodes = Vec::with_capacity(n * dim);
    for k in 0..n {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| Error::parse(hline, format!("expected {n} node lines, found {k}")))?;
        nodes.extend(parse_row::<f64>(ln, l, dim, "coordinate")?);
    }

    let mut elems = Vec::with_capacity(nt * (dim + 1));
    for k in 0..nt {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| Error::parse(hline, format!("expected {nt} element lines, found {k}")))?;
        for v in parse_row::<usize>(ln, l, dim + 1, "vertex index")? {
            if v == 0 || v > n {
                return Err(Error::parse(ln, format!("vertex index {v} outside 1..={n}")));
            }
            elems.push(v - 1);
        }
    }

    let mut flags = Vec::new();
    let mut first_flag_line = None;
    for (ln, l) in lines.by_ref() {
        if flags.len() == nt * (dim + 1) {
            return Err(Error::parse(ln, "unexpected content after flags section"));
        }
        first_flag_line.get_or_insert(ln);
        for v in parse_row::<i64>(ln, l, dim + 1, "flag")? {
            if !(0..=3).contains(&v) {
                return Err(Error::parse(ln, format!("flag value {v} outside 0..=3")));
            }
            flags.push(v);
        }
    }
    if let Some(ln) = first_flag_line {
        if flags.len() != nt * (dim + 1) {
            return Err(Error::parse(
                ln,
                format!("flags section has {} lines, expected {nt}", flags.len() / (dim + 1)),
            ));
        }
    }
    let flags = (!flags.is_empty()).then_some(flags);
    Mesh::new(dim, nodes, elems, flags.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, BoundaryFlag, Shape};

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("square.mesh");
        let m = generate(Shape::UnitSquare, 2).unwrap();
        write_mesh(&m, &path).unwrap();
        assert_eq!(read_mesh(&path).unwrap(), m);

        let c = generate(Shape::UnitCube, 2).unwrap();
        assert_eq!(parse_mesh(&format_mesh(&c)).unwrap(), c);
    }

    #[test]
    fn zero_index_is_a_parse_error() {
        let text = "2 3 1\n0 0\n1 0\n0 1\n0 2 3\n";
        match parse_mesh(text) {
            Err(Error::Parse { line: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_flags_default_to_interior() {
        let text = "# tri\n2 3 1\n0 0\n1 0\n0 1\n1 2 3\n";
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.flags(0), &[BoundaryFlag::Interior; 3]);
    }

    #[test]
    fn explicit_flags_are_read() {
        let text = "2 3 1\n0 0\n1 0\n0 1\n1 2 3\n1 0 2\n";
        let m = parse_mesh(text).unwrap();
        assert_eq!(m.flags(0)[2], BoundaryFlag::Neumann);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(parse_mesh(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_mesh("2 3 1\n0 0\n1 x\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_mesh("2 3 1\n0 0\n1 0\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_mesh("2 3 1\n0 0\n1 0\n0 1\n1 2 3\n1 0 9\n"),
            Err(Error::Parse { line: 6, .. })
        ));
        // clockwise element is a validation error, not a parse error
        assert!(matches!(
            parse_mesh("2 3 1\n0 0\n1 0\n0 1\n1 3 2\n"),
            Err(Error::NonPositiveVolume { .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(read_mesh("/nonexistent/none.mesh"), Err(Error::Io(_))));
    }
}
