//! Matrix Market reader/writer for real symmetric matrices, plus vectors in
//! Matrix Market array form or plain one-value-per-line text.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::linops::SymmetricOperator;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    layout: Layout,
    symmetry: Symmetry,
}

struct Lines {
    path: PathBuf,
    inner: std::io::Lines<BufReader<File>>,
    lineno: usize,
}

impl Lines {
    fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            inner: BufReader::new(file).lines(),
            lineno: 0,
        })
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line: self.lineno,
            message: message.into(),
        }
    }

    fn next_raw(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(Ok(l)) => {
                self.lineno += 1;
                Ok(Some(l))
            }
            Some(Err(source)) => Err(Error::Io {
                path: self.path.clone(),
                source,
            }),
        }
    }

    /// Next line that is neither blank nor a `%` comment.
    fn next_data(&mut self) -> Result<Option<String>> {
        while let Some(l) = self.next_raw()? {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn expect_data(&mut self, what: &str) -> Result<String> {
        self.next_data()?
            .ok_or_else(|| self.err(format!("unexpected end of file, expected {what}")))
    }
}

fn parse_header(lines: &mut Lines, first: &str) -> Result<Header> {
    let tokens: Vec<String> = first
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(lines.err(format!("malformed Matrix Market header '{first}'")));
    }
    let layout = match tokens[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(lines.err(format!("unsupported layout '{other}'"))),
    };
    match tokens[3].as_str() {
        "real" | "integer" | "double" => {}
        other => {
            return Err(lines.err(format!(
                "unsupported field '{other}': only real matrices are accepted"
            )))
        }
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => {
            return Err(lines.err(format!(
                "unsupported symmetry '{other}': matrix must be real symmetric"
            )))
        }
    };
    Ok(Header { layout, symmetry })
}

fn parse_usizes(lines: &Lines, s: &str, count: usize, what: &str) -> Result<Vec<usize>> {
    let v: Vec<usize> = s
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| lines.err(format!("bad {what} line '{s}'")))?;
    if v.len() != count {
        return Err(lines.err(format!(
            "expected {count} integers in {what} line, got '{s}'"
        )));
    }
    Ok(v)
}

fn parse_value(lines: &Lines, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| lines.err(format!("bad value '{s}'")))
}

/// Reads a square real matrix. `general` files must be symmetric to within the
/// operator constructor's tolerance.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SymmetricOperator> {
    let path = path.as_ref();
    let mut lines = Lines::open(path)?;
    let first = lines.next_raw()?.ok_or_else(|| lines.err("empty file"))?;
    let header = parse_header(&mut lines, first.trim())?;

    let size = lines.expect_data("size line")?;
    let (n, entries) = match header.layout {
        Layout::Coordinate => {
            let dims = parse_usizes(&lines, &size, 3, "size")?;
            let (m, n, nnz) = (dims[0], dims[1], dims[2]);
            check_square(&lines, m, n)?;
            let mut entries = vec![0.0; n * n];
            let mut seen = vec![false; n * n];
            for _ in 0..nnz {
                let line = lines.expect_data("matrix entry")?;
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 3 {
                    return Err(lines.err(format!("expected 'row col value', got '{line}'")));
                }
                let ij = parse_usizes(&lines, &format!("{} {}", parts[0], parts[1]), 2, "index")?;
                let (i, j) = (ij[0], ij[1]);
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(lines.err(format!("index ({i}, {j}) outside a {n}x{n} matrix")));
                }
                let v = parse_value(&lines, parts[2])?;
                let (i, j) = (i - 1, j - 1);
                let mut put = |r: usize, c: usize| -> Result<()> {
                    if seen[r * n + c] {
                        return Err(lines.err(format!("duplicate entry ({}, {})", r + 1, c + 1)));
                    }
                    seen[r * n + c] = true;
                    entries[r * n + c] = v;
                    Ok(())
                };
                put(i, j)?;
                if header.symmetry == Symmetry::Symmetric && i != j {
                    put(j, i)?;
                }
            }
            (n, entries)
        }
        Layout::Array => {
            let dims = parse_usizes(&lines, &size, 2, "size")?;
            let (m, n) = (dims[0], dims[1]);
            check_square(&lines, m, n)?;
            let mut entries = vec![0.0; n * n];
            for j in 0..n {
                let start = if header.symmetry == Symmetry::Symmetric {
                    j
                } else {
                    0
                };
                for i in start..n {
                    let line = lines.expect_data("matrix value")?;
                    let v = parse_value(&lines, &line)?;
                    entries[i * n + j] = v;
                    if header.symmetry == Symmetry::Symmetric {
                        entries[j * n + i] = v;
                    }
                }
            }
            (n, entries)
        }
    };
    if let Some(extra) = lines.next_data()? {
        return Err(lines.err(format!("trailing data '{extra}'")));
    }
    SymmetricOperator::from_row_major(n, entries)
}

fn check_square(lines: &Lines, m: usize, n: usize) -> Result<()> {
    if m != n {
        return Err(lines.err(format!("matrix must be square, got {m}x{n}")));
    }
    if n == 0 {
        return Err(lines.err("matrix dimension must be at least 1"));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes the lower triangle's nonzeros in `coordinate real symmetric` form with
/// 17 significant digits.
pub fn write_matrix_market(a: &SymmetricOperator, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let n = a.n();
    let mut w = create(path)?;
    let nnz = (0..n)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .filter(|&(i, j)| a.get(i, j) != 0.0)
        .count();
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        writeln!(w, "{n} {n} {nnz}")?;
        for j in 0..n {
            for i in j..n {
                let v = a.get(i, j);
                if v != 0.0 {
                    writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
                }
            }
        }
        w.flush()
    };
    body().map_err(io_err(path))
}

/// Reads a vector stored either as a Matrix Market `array` with one column
/// (or one row), or as plain text with one value per line and `#` comments.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let mut lines = Lines::open(path)?;
    let mut first = None;
    while let Some(l) = lines.next_raw()? {
        if !l.trim().is_empty() {
            first = Some(l);
            break;
        }
    }
    let Some(first) = first else {
        return Err(lines.err("empty vector file"));
    };

    if first.trim_start().starts_with("%%") {
        let header = parse_header(&mut lines, first.trim())?;
        if header.layout != Layout::Array || header.symmetry != Symmetry::General {
            return Err(lines.err("vectors must use the 'array real general' format"));
        }
        let size = lines.expect_data("size line")?;
        let dims = parse_usizes(&lines, &size, 2, "size")?;
        let n = match (dims[0], dims[1]) {
            (n, 1) | (1, n) => n,
            (m, k) => return Err(lines.err(format!("expected an n x 1 array, got {m}x{k}"))),
        };
        let mut v = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.expect_data("vector value")?;
            v.push(parse_value(&lines, &line)?);
        }
        if let Some(extra) = lines.next_data()? {
            return Err(lines.err(format!("trailing data '{extra}'")));
        }
        return Ok(v);
    }

    let mut v = Vec::new();
    let mut line = Some(first);
    while let Some(l) = line {
        let data = l.split('#').next().unwrap_or("").trim();
        if !data.is_empty() {
            v.push(parse_value(&lines, data)?);
        }
        line = lines.next_raw()?;
    }
    if v.is_empty() {
        return Err(lines.err("vector file contains no values"));
    }
    Ok(v)
}

/// Writes a vector: Matrix Market `array real general` for `.mtx` paths,
/// plain one-value-per-line text otherwise.
pub fn write_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"));
    let mut w = create(path)?;
    let mut body = || -> std::io::Result<()> {
        if mm {
            writeln!(w, "%%MatrixMarket matrix array real general")?;
            writeln!(w, "{} 1", v.len())?;
        }
        for x in v {
            writeln!(w, "{x:.16e}")?;
        }
        w.flush()
    };
    body().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn coordinate_symmetric_hilbert2() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "h2.mtx",
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 1\n2 1 0.5\n2 2 0.333333333333333333\n",
        );
        let a = read_matrix_market(&p).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 0.5, 0.5, 1.0 / 3.0]);
    }

    #[test]
    fn general_asymmetric_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "g.mtx",
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n2 1 0.5\n1 2 0.4\n",
        );
        assert!(matches!(
            read_matrix_market(&p),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn general_array_accepted_when_symmetric() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "g.mtx",
            "%%MatrixMarket matrix array real general\n2 2\n1\n0.5\n0.5\n2\n",
        );
        assert_eq!(
            read_matrix_market(&p).unwrap().as_slice(),
            &[1.0, 0.5, 0.5, 2.0]
        );
    }

    #[test]
    fn symmetric_array_lower_triangle() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "s.mtx",
            "%%MatrixMarket matrix array real symmetric\n3 3\n1\n2\n3\n4\n5\n6\n",
        );
        let a = read_matrix_market(&p).unwrap();
        assert_eq!(a.as_slice(), &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
    }

    #[test]
    fn malformed_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let cases = [
            (
                "bad header",
                "%%MatrixMarket tensor coordinate real symmetric\n1 1 1\n1 1 1\n",
            ),
            (
                "complex",
                "%%MatrixMarket matrix coordinate complex symmetric\n1 1 1\n1 1 1 0\n",
            ),
            (
                "pattern",
                "%%MatrixMarket matrix coordinate pattern symmetric\n1 1 1\n1 1\n",
            ),
            (
                "skew",
                "%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 1\n",
            ),
            (
                "rect",
                "%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n",
            ),
            (
                "short",
                "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n",
            ),
            (
                "range",
                "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1\n",
            ),
            (
                "dup",
                "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n2 1 1\n1 2 1\n",
            ),
            (
                "value",
                "%%MatrixMarket matrix coordinate real symmetric\n1 1 1\n1 1 abc\n",
            ),
            (
                "trailing",
                "%%MatrixMarket matrix array real symmetric\n1 1\n1\n2\n",
            ),
            ("empty", ""),
        ];
        for (name, body) in cases {
            let p = write(&dir, "m.mtx", body);
            assert!(read_matrix_market(&p).is_err(), "{name} should be rejected");
        }
        assert!(matches!(
            read_matrix_market(dir.path().join("missing.mtx")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn matrix_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = SymmetricOperator::from_lower_fn(4, |i, j| {
            if (i + j) % 3 == 0 {
                0.0
            } else {
                1.0 / (i as f64 + 0.7 * j as f64 + 1.3)
            }
        })
        .unwrap();
        let p = dir.path().join("a.mtx");
        write_matrix_market(&a, &p).unwrap();
        assert_eq!(read_matrix_market(&p).unwrap(), a);
    }

    #[test]
    fn vector_formats() {
        let dir = tempfile::tempdir().unwrap();
        let v = vec![1.0 / 3.0, -2.5e-17, 7.0];
        for name in ["v.mtx", "v.txt"] {
            let p = dir.path().join(name);
            write_vector(&v, &p).unwrap();
            assert_eq!(read_vector(&p).unwrap(), v);
        }
        let p = write(&dir, "c.txt", "# rhs\n1.0\n\n2.0  # second\n# end\n");
        assert_eq!(read_vector(&p).unwrap(), vec![1.0, 2.0]);
        let p = write(
            &dir,
            "r.mtx",
            "%%MatrixMarket matrix array real general\n% c\n1 2\n3\n4\n",
        );
        assert_eq!(read_vector(&p).unwrap(), vec![3.0, 4.0]);
        for body in [
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n",
            "%%MatrixMarket matrix coordinate real general\n2 1 1\n1 1 1\n",
            "# nothing\n",
            "1.0\nx\n",
        ] {
            let p = write(&dir, "bad.txt", body);
            assert!(read_vector(&p).is_err(), "{body:?}");
        }
    }
}
