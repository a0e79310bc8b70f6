//! Matrix Market reader and writer.
//!
//! Matrices use the coordinate format (`real`/`integer`, `general` or
//! `symmetric`); vectors use the array format. File indices are 1-based.
//! Duplicate coordinate entries are summed and symmetric storage is expanded
//! on read. Values are written in shortest round-trip form, so a write/read
//! cycle reproduces the CSR arrays bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Lines<'p, R> {
    inner: std::io::Lines<R>,
    path: &'p Path,
    line: usize,
}

impl<'p, R: BufRead> Lines<'p, R> {
    fn new(reader: R, path: &'p Path) -> Self {
        Self {
            inner: reader.lines(),
            path,
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::MatrixMarket {
            path: self.path.to_path_buf(),
            line: self.line,
            msg: msg.into(),
        }
    }

    fn raw(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(Ok(l)) => {
                self.line += 1;
                Ok(Some(l))
            }
            Some(Err(source)) => Err(Error::Io {
                path: self.path.to_path_buf(),
                source,
            }),
        }
    }

    /// Next line that is neither blank nor a comment.
    fn data(&mut self) -> Result<Option<String>> {
        while let Some(l) = self.raw()? {
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    }

    fn header(&mut self) -> Result<(Layout, Symmetry)> {
        let first = self.raw()?.ok_or_else(|| self.err("empty file"))?;
        let toks: Vec<String> = first.split_whitespace().map(str::to_lowercase).collect();
        if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
            return Err(self.err(format!("malformed header `{first}`")));
        }
        let layout = match toks[2].as_str() {
            "coordinate" => Layout::Coordinate,
            "array" => Layout::Array,
            other => return Err(self.err(format!("unsupported format `{other}`"))),
        };
        match toks[3].as_str() {
            "real" | "double" | "integer" => {}
            other => return Err(self.err(format!("unsupported field `{other}`"))),
        }
        let symmetry = match toks[4].as_str() {
            "general" => Symmetry::General,
            "symmetric" => Symmetry::Symmetric,
            other => return Err(self.err(format!("unsupported symmetry `{other}`"))),
        };
        Ok((layout, symmetry))
    }

    fn sizes(&mut self, expected: usize) -> Result<Vec<usize>> {
        let l = self.data()?.ok_or_else(|| self.err("missing size line"))?;
        let sizes: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| self.err(format!("malformed size line `{l}`")))?;
        if sizes.len() != expected {
            return Err(self.err(format!("size line needs {expected} fields")));
        }
        Ok(sizes)
    }

    fn number(&self, tok: Option<&str>) -> Result<f64> {
        let tok = tok.ok_or_else(|| self.err("missing value"))?;
        let v: f64 = tok
            .parse()
            .map_err(|_| self.err(format!("malformed number `{tok}`")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err("non-finite value"))
        }
    }

    fn index(&self, tok: Option<&str>, n: usize) -> Result<usize> {
        let tok = tok.ok_or_else(|| self.err("missing index"))?;
        let i: usize = tok
            .parse()
            .map_err(|_| self.err(format!("malformed index `{tok}`")))?;
        if i == 0 || i > n {
            return Err(self.err(format!("index {i} out of range 1..={n}")));
        }
        Ok(i - 1)
    }
}

/// Parses a coordinate-format matrix. `path` only labels error messages.
pub fn parse_matrix<R: BufRead>(reader: R, path: &Path) -> Result<CsrMatrix> {
    let mut lines = Lines::new(reader, path);
    let (layout, symmetry) = lines.header()?;
    if layout != Layout::Coordinate {
        return Err(lines.err("matrices must use the coordinate format"));
    }
    let sizes = lines.sizes(3)?;
    let (rows, cols, entries) = (sizes[0], sizes[1], sizes[2]);
    if rows != cols {
        return Err(lines.err(format!("matrix is {rows}x{cols}, not square")));
    }
    let n = rows;
    let mut triplets = Vec::with_capacity(entries * if symmetry == Symmetry::Symmetric { 2 } else { 1 });
    for _ in 0..entries {
        let l = lines
            .data()?
            .ok_or_else(|| lines.err("fewer entries than declared"))?;
        let mut toks = l.split_whitespace();
        let i = lines.index(toks.next(), n)?;
        let j = lines.index(toks.next(), n)?;
        let v = lines.number(toks.next())?;
        triplets.push((i, j, v));
        if symmetry == Symmetry::Symmetric {
            if j > i {
                return Err(lines.err("symmetric storage must hold the lower triangle"));
            }
            if i != j {
                triplets.push((j, i, v));
            }
        }
    }
    if lines.data()?.is_some() {
        return Err(lines.err("more entries than declared"));
    }
    CsrMatrix::from_triplets(n, &triplets)
}

/// Parses an array-format column vector.
pub fn parse_vector<R: BufRead>(reader: R, path: &Path) -> Result<Vec<f64>> {
    let mut lines = Lines::new(reader, path);
    let (layout, _) = lines.header()?;
    if layout != Layout::Array {
        return Err(lines.err("vectors must use the array format"));
    }
    let sizes = lines.sizes(2)?;
    if sizes[1] != 1 {
        return Err(lines.err(format!("expected a single column, got {}", sizes[1])));
    }
    let mut out = Vec::with_capacity(sizes[0]);
    while out.len() < sizes[0] {
        let l = lines
            .data()?
            .ok_or_else(|| lines.err("fewer values than declared"))?;
        for tok in l.split_whitespace() {
            out.push(lines.number(Some(tok))?);
        }
    }
    if out.len() != sizes[0] || lines.data()?.is_some() {
        return Err(lines.err("more values than declared"));
    }
    Ok(out)
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    parse_matrix(open(path)?, path)
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_vector(open(path)?, path)
}

/// Reads a matrix and, when given, its companion right-hand side.
pub fn read_system(matrix: &Path, rhs: Option<&Path>) -> Result<(CsrMatrix, Option<Vec<f64>>)> {
    let a = read_matrix(matrix)?;
    let b = rhs.map(read_vector).transpose()?;
    if let Some(b) = &b {
        crate::error::check_len(a.n(), b.len())?;
    }
    Ok((a, b))
}

/// Writes `a` as `coordinate real general`.
pub fn write_matrix<W: Write>(mut w: W, a: &CsrMatrix) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), a.nnz())?;
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    w.flush()
}

/// Writes `v` as `array real general` with one column.
pub fn write_vector<W: Write>(mut w: W, v: &[f64]) -> std::io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    w.flush()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_matrix_file(path: impl AsRef<Path>, a: &CsrMatrix) -> Result<()> {
    let path = path.as_ref();
    write_matrix(create(path)?, a).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_vector_file(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let path = path.as_ref();
    write_vector(create(path)?, v).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
