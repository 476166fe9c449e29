//! Matrix Market coordinate files (`real` or `integer`, `general` or
//! `symmetric`). Pattern and complex files are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use frontal_core::SparseMatrix;

use crate::error::{Error, Result};

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(Error::io(path))?;
    parse_matrix_market(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        e => e,
    })
}

/// Parses a Matrix Market stream. A `symmetric` header stores one
/// triangle; the other is mirrored in and the symmetric flag is set.
pub fn parse_matrix_market(reader: impl BufRead) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let header = header.map_err(Error::io(""))?;
    let symmetric = parse_header(&header)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut found = 0usize;
    for (line_no, line) in lines {
        let line = line.map_err(Error::io(""))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let Some((m, n, _)) = size else {
            let [m, n, nnz] = fields[..] else {
                return Err(Error::parse(line_no, "size line needs three integers"));
            };
            let dims = (
                parse_usize(m, line_no)?,
                parse_usize(n, line_no)?,
                parse_usize(nnz, line_no)?,
            );
            if symmetric && dims.0 != dims.1 {
                return Err(Error::parse(line_no, "symmetric matrix must be square"));
            }
            triplets.reserve(dims.2.min(1 << 20));
            size = Some(dims);
            continue;
        };
        let [i, j, v] = fields[..] else {
            return Err(Error::parse(line_no, "entry needs row, column and value"));
        };
        let (i, j) = (parse_usize(i, line_no)?, parse_usize(j, line_no)?);
        if i == 0 || j == 0 || i > m || j > n {
            return Err(Error::parse(
                line_no,
                format!("index ({i}, {j}) outside a {m}x{n} matrix"),
            ));
        }
        let v: f64 = v
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad value {v:?}")))?;
        found += 1;
        triplets.push((i - 1, j - 1, v));
        if symmetric && i != j {
            triplets.push((j - 1, i - 1, v));
        }
    }
    let (m, n, declared) = size.ok_or_else(|| Error::parse(1, "missing size line"))?;
    if found != declared {
        return Err(Error::EntryCount { declared, found });
    }
    let a = SparseMatrix::from_triplets(m, n, triplets)?;
    Ok(if symmetric { a.mark_symmetric()? } else { a })
}

fn parse_header(line: &str) -> Result<bool> {
    let words: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    let w: Vec<&str> = words.iter().map(String::as_str).collect();
    match w[..] {
        ["%%matrixmarket", "matrix", "coordinate", field, sym] => {
            match field {
                "real" | "integer" => {}
                "pattern" | "complex" => return Err(Error::Unsupported(format!("{field} entries"))),
                _ => return Err(Error::parse(1, format!("unknown field {field:?}"))),
            }
            match sym {
                "general" => Ok(false),
                "symmetric" => Ok(true),
                _ => Err(Error::Unsupported(format!("{sym} storage"))),
            }
        }
        ["%%matrixmarket", "matrix", "array", ..] => Err(Error::Unsupported("array format".into())),
        _ => Err(Error::parse(
            1,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'",
        )),
    }
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| Error::parse(line, format!("bad integer {s:?}")))
}

/// Writes `a` in coordinate format. Matrices carrying the symmetric flag
/// are written as their lower triangle under a `symmetric` header.
pub fn write_matrix_market(path: impl AsRef<Path>, a: &SparseMatrix) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(Error::io(path))?;
    let mut w = BufWriter::new(file);
    format_matrix_market(&mut w, a)
        .and_then(|_| w.flush())
        .map_err(Error::io(path))
}

pub fn format_matrix_market(w: &mut impl Write, a: &SparseMatrix) -> std::io::Result<()> {
    let sym = a.symmetric_flag();
    let entries: Vec<(usize, usize, f64)> = a.triplets().filter(|&(i, j, _)| !sym || i >= j).collect();
    let kind = if sym { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {v:e}", i + 1, j + 1)?;
    }
    Ok(())
}
