use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use std::io::{BufRead, Write};

/// Write `nrows ncols nnz` followed by one `row col value` line per stored entry.
pub fn write_triplets(a: &SparseMatrix, mut w: impl Write) -> Result<()> {
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.iter() {
        writeln!(w, "{i} {j} {v:.16e}")?;
    }
    Ok(())
}

/// Inverse of [`write_triplets`]; blank lines and `#` comments are skipped.
pub fn read_triplets(r: impl BufRead) -> Result<SparseMatrix> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut t = Vec::new();
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: ln + 1, message };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", f.len())));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| err(format!("{s}: {e}")));
        match header {
            None => header = Some((int(f[0])?, int(f[1])?, int(f[2])?)),
            Some((nr, nc, _)) => {
                let (i, j) = (int(f[0])?, int(f[1])?);
                if i >= nr || j >= nc {
                    return Err(err(format!("entry ({i},{j}) outside {nr}x{nc}")));
                }
                let v = f[2].parse::<f64>().map_err(|e| err(format!("{}: {e}", f[2])))?;
                t.push((i, j, v));
            }
        }
    }
    let (nr, nc, nnz) = header.ok_or_else(|| Error::Parse { line: 0, message: "missing header".into() })?;
    if t.len() != nnz {
        return Err(Error::Parse { line: 0, message: format!("header declares {nnz} entries, found {}", t.len()) });
    }
    Ok(SparseMatrix::from_triplets(nr, nc, &t))
}
