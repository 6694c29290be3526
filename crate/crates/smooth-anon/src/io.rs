//! Edge-list file format.
//!
//! Line 1 is the header `n m` (users, features, space separated); every
//! following line is one entry `u<TAB>f` with 0-based ids. The body may be
//! unsorted, duplicate entries are rejected, and saving always writes
//! entries in row-major sorted order so identical matrices serialize to
//! identical bytes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

pub fn write_edge_list(m: &SparseBinaryMatrix, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{} {}", m.n_users(), m.n_features())?;
    for (u, f) in m.edges() {
        writeln!(w, "{u}\t{f}")?;
    }
    Ok(())
}

pub fn save_edge_list(m: &SparseBinaryMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_edge_list(m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_edge_list(r: impl BufRead) -> Result<SparseBinaryMatrix> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or(Error::MalformedInput {
            line: 1,
            reason: "missing header".into(),
        })?
        .map_err(Error::Io)?;
    let mut parts = header.split_whitespace();
    let (n_users, n_features) = match (parts.next(), parts.next(), parts.next()) {
        (Some(n), Some(m), None) => {
            let n = n.parse::<usize>().map_err(|_| Error::MalformedInput {
                line: 1,
                reason: format!("bad user count '{n}'"),
            })?;
            let m = m.parse::<usize>().map_err(|_| Error::MalformedInput {
                line: 1,
                reason: format!("bad feature count '{m}'"),
            })?;
            (n, m)
        }
        _ => {
            return Err(Error::MalformedInput {
                line: 1,
                reason: format!("expected 'n m' header, got '{header}'"),
            })
        }
    };

    let mut edges: Vec<(usize, u32)> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line.map_err(Error::Io)?;
        if line.is_empty() {
            continue;
        }
        let (u, f) = line.split_once('\t').ok_or_else(|| Error::MalformedInput {
            line: line_no,
            reason: format!("expected 'user<TAB>feature', got '{line}'"),
        })?;
        let u = u.parse::<usize>().map_err(|_| Error::MalformedInput {
            line: line_no,
            reason: format!("bad user id '{u}'"),
        })?;
        let f = f.parse::<u32>().map_err(|_| Error::MalformedInput {
            line: line_no,
            reason: format!("bad feature id '{f}'"),
        })?;
        if u >= n_users {
            return Err(Error::MalformedInput {
                line: line_no,
                reason: format!("user {u} out of range 0..{n_users}"),
            });
        }
        if f as usize >= n_features {
            return Err(Error::MalformedInput {
                line: line_no,
                reason: format!("feature {f} out of range 0..{n_features}"),
            });
        }
        edges.push((u, f));
    }
    SparseBinaryMatrix::from_edges(n_users, n_features, edges).map_err(|e| match e {
        Error::InvalidParameter(reason) => Error::MalformedInput { line: 0, reason },
        other => other,
    })
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<SparseBinaryMatrix> {
    read_edge_list(BufReader::new(File::open(path)?))
}
