//! Matrix Market input/output and CSV benchmark records.
//!
//! Supported Matrix Market headers are `matrix coordinate real general` and
//! `matrix array real general` (`integer` values are read as reals). Indices
//! are 1-based on disk. Floats are written with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, DualSparseMatrix};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Sparse(DualSparseMatrix),
    Dense(DenseMatrix),
}

impl MatrixFile {
    /// Dual sparse view of either variant (dense zeros are dropped).
    pub fn into_dual(self) -> Result<DualSparseMatrix> {
        match self {
            MatrixFile::Sparse(a) => Ok(a),
            MatrixFile::Dense(d) => d.to_dual(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

struct Lines<R> {
    inner: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    /// Next non-comment, non-blank line.
    fn next_data(&mut self) -> Result<Option<(usize, String)>> {
        loop {
            self.buf.clear();
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line_no += 1;
            let t = self.buf.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Ok(Some((self.line_no, t.to_string())));
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn parse_header(line: &str) -> Result<Format> {
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" {
        return Err(parse_err(1, "missing %%MatrixMarket header"));
    }
    if toks[1] != "matrix" {
        return Err(Error::UnsupportedField(toks[1].clone()));
    }
    let format = match toks[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => return Err(Error::UnsupportedField(other.to_string())),
    };
    match toks[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(Error::UnsupportedField(other.to_string())),
    }
    if toks[4] != "general" {
        return Err(Error::UnsupportedField(toks[4].clone()));
    }
    Ok(format)
}

/// Parses a Matrix Market stream.
pub fn parse_matrix_market<R: Read>(reader: R) -> Result<MatrixFile> {
    let mut lines = Lines { inner: BufReader::new(reader), line_no: 0, buf: String::new() };
    let mut header = String::new();
    if lines.inner.read_line(&mut header)? == 0 {
        return Err(parse_err(1, "empty file"));
    }
    lines.line_no = 1;
    let format = parse_header(header.trim())?;

    let (size_line, size) = lines.next_data()?.ok_or_else(|| parse_err(lines.line_no, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), size_line, "row count")?;
    let cols: usize = parse_num(toks.next(), size_line, "column count")?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(size_line, "matrix dimensions must be positive"));
    }

    match format {
        Format::Coordinate => {
            let nnz: usize = parse_num(toks.next(), size_line, "entry count")?;
            let mut triplets = Vec::with_capacity(nnz);
            for _ in 0..nnz {
                let (ln, line) =
                    lines.next_data()?.ok_or_else(|| parse_err(lines.line_no, "unexpected end of file"))?;
                let mut t = line.split_whitespace();
                let i: usize = parse_num(t.next(), ln, "row index")?;
                let j: usize = parse_num(t.next(), ln, "column index")?;
                let v: f64 = parse_num(t.next(), ln, "value")?;
                if i == 0 || i > rows || j == 0 || j > cols {
                    return Err(parse_err(ln, format!("index ({i}, {j}) out of range")));
                }
                if !v.is_finite() {
                    return Err(parse_err(ln, "non-finite value"));
                }
                triplets.push((i - 1, j - 1, v));
            }
            if let Some((ln, _)) = lines.next_data()? {
                return Err(parse_err(ln, "trailing data after declared entries"));
            }
            Ok(MatrixFile::Sparse(DualSparseMatrix::from_triplets(rows, cols, &triplets)?))
        }
        Format::Array => {
            // Column-major on disk.
            let mut data = vec![0.0; rows * cols];
            for k in 0..rows * cols {
                let (ln, line) =
                    lines.next_data()?.ok_or_else(|| parse_err(lines.line_no, "unexpected end of file"))?;
                let v: f64 = parse_num(line.split_whitespace().next(), ln, "value")?;
                if !v.is_finite() {
                    return Err(parse_err(ln, "non-finite value"));
                }
                let (i, j) = (k % rows, k / rows);
                data[i * cols + j] = v;
            }
            if let Some((ln, _)) = lines.next_data()? {
                return Err(parse_err(ln, "trailing data after declared entries"));
            }
            Ok(MatrixFile::Dense(DenseMatrix::new(rows, cols, data)?))
        }
    }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<MatrixFile> {
    parse_matrix_market(File::open(path)?)
}

/// Reads a vector stored as an `m×1` or `1×m` matrix (array or coordinate).
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let dense = match read_matrix_market(path)? {
        MatrixFile::Dense(d) => d,
        MatrixFile::Sparse(s) => s.to_dense(),
    };
    if dense.rows() != 1 && dense.cols() != 1 {
        return Err(Error::Parse {
            line: 2,
            msg: format!("expected a vector, found {}x{} matrix", dense.rows(), dense.cols()),
        });
    }
    Ok(dense.data().to_vec())
}

pub fn write_sparse_to<W: Write>(a: &DualSparseMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.rows(), a.cols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_f64(v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dense_to<W: Write>(a: &DenseMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", a.rows(), a.cols())?;
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            writeln!(w, "{}", fmt_f64(a.get(i, j)))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_vector_to<W: Write>(v: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} 1", v.len())?;
    for x in v {
        writeln!(w, "{}", fmt_f64(*x))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sparse(a: &DualSparseMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_sparse_to(a, BufWriter::new(File::create(path)?))
}

pub fn write_dense(a: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_dense_to(a, BufWriter::new(File::create(path)?))
}

pub fn write_vector(v: &[f64], path: impl AsRef<Path>) -> Result<()> {
    write_vector_to(v, BufWriter::new(File::create(path)?))
}

/// One benchmark measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub solver: String,
    pub m: usize,
    pub n: usize,
    pub nnz: usize,
    pub eps: f64,
    pub seed: u64,
    pub iters: u64,
    pub flops: u64,
    pub wall_time: f64,
    pub residual_norm: Option<f64>,
    pub atz_norm: Option<f64>,
    pub forward_err: Option<f64>,
    pub converged: bool,
}

pub const CSV_HEADER: [&str; 14] = [
    "instance",
    "solver",
    "m",
    "n",
    "nnz",
    "eps",
    "seed",
    "iters",
    "flops",
    "wall_time",
    "residual_norm",
    "atz_norm",
    "forward_err",
    "converged",
];

/// Column index of `wall_time`, the only non-deterministic field.
pub const WALL_TIME_COLUMN: usize = 9;

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl BenchRecord {
    fn to_fields(&self) -> [String; 14] {
        [
            self.instance.clone(),
            self.solver.clone(),
            self.m.to_string(),
            self.n.to_string(),
            self.nnz.to_string(),
            fmt_f64(self.eps),
            self.seed.to_string(),
            self.iters.to_string(),
            self.flops.to_string(),
            fmt_f64(self.wall_time),
            opt(self.residual_norm),
            opt(self.atz_norm),
            opt(self.forward_err),
            self.converged.to_string(),
        ]
    }

    fn from_fields(rec: &csv::StringRecord, line: usize) -> Result<Self> {
        if rec.len() != CSV_HEADER.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", CSV_HEADER.len(), rec.len())));
        }
        let f = |k: usize| Some(&rec[k]);
        let opt_f = |k: usize| -> Result<Option<f64>> {
            if rec[k].is_empty() {
                Ok(None)
            } else {
                parse_num(f(k), line, CSV_HEADER[k]).map(Some)
            }
        };
        Ok(Self {
            instance: rec[0].to_string(),
            solver: rec[1].to_string(),
            m: parse_num(f(2), line, "m")?,
            n: parse_num(f(3), line, "n")?,
            nnz: parse_num(f(4), line, "nnz")?,
            eps: parse_num(f(5), line, "eps")?,
            seed: parse_num(f(6), line, "seed")?,
            iters: parse_num(f(7), line, "iters")?,
            flops: parse_num(f(8), line, "flops")?,
            wall_time: parse_num(f(9), line, "wall_time")?,
            residual_norm: opt_f(10)?,
            atz_norm: opt_f(11)?,
            forward_err: opt_f(12)?,
            converged: parse_num(f(13), line, "converged")?,
        })
    }
}

pub fn write_csv_to<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        out.write_record(r.to_fields())?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv(records: &[BenchRecord], path: impl AsRef<Path>) -> Result<()> {
    write_csv_to(records, BufWriter::new(File::create(path)?))
}

pub fn read_csv_from<R: Read>(r: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(parse_err(1, "unexpected CSV header"));
    }
    rdr.records().enumerate().map(|(k, rec)| BenchRecord::from_fields(&rec?, k + 2)).collect()
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<BenchRecord>> {
    read_csv_from(File::open(path)?)
}
