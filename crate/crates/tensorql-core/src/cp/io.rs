//! Factor export/import: a directory with a small header file and one
//! sparse-coordinate file per factor. Line-oriented, whitespace-separated.
//!
//! ```text
//! factors.meta   dims <n> <m> <l> / rank <r> / seed <s>
//! A.coords       <row> <col> per line (and B.coords, C.coords)
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::BoolMatrix;

use super::CpFactors;

pub fn export_factors(dir: impl AsRef<Path>, factors: &CpFactors, seed: u64) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let (n, m, l) = factors.dims();
    let meta = format!("dims {n} {m} {l}\nrank {}\nseed {seed}\n", factors.rank());
    fs::write(dir.join("factors.meta"), meta)?;
    for (name, matrix) in [("A", &factors.a), ("B", &factors.b), ("C", &factors.c)] {
        let mut body = String::new();
        for (r, c) in matrix.iter() {
            body.push_str(&format!("{r} {c}\n"));
        }
        fs::write(dir.join(format!("{name}.coords")), body)?;
    }
    Ok(())
}

pub fn import_factors(dir: impl AsRef<Path>) -> Result<(CpFactors, u64)> {
    let dir = dir.as_ref();
    let meta = fs::read_to_string(dir.join("factors.meta"))?;
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut rank: Option<usize> = None;
    let mut seed: u64 = 0;
    for (lineno, line) in meta.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::NTriples {
            line: lineno + 1,
            msg: format!("bad factor header line `{line}`"),
        };
        match fields.as_slice() {
            ["dims", n, m, l] => {
                dims = Some((
                    n.parse().map_err(|_| bad())?,
                    m.parse().map_err(|_| bad())?,
                    l.parse().map_err(|_| bad())?,
                ))
            }
            ["rank", r] => rank = Some(r.parse().map_err(|_| bad())?),
            ["seed", s] => seed = s.parse().map_err(|_| bad())?,
            [] => {}
            _ => return Err(bad()),
        }
    }
    let dims = dims.ok_or_else(|| Error::eval("factor header misses dims".to_string()))?;
    let rank = rank.ok_or_else(|| Error::eval("factor header misses rank".to_string()))?;

    let read_matrix = |name: &str, rows: usize| -> Result<BoolMatrix> {
        let body = fs::read_to_string(dir.join(format!("{name}.coords")))?;
        let mut coords = Vec::new();
        for (lineno, line) in body.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = || Error::NTriples {
                line: lineno + 1,
                msg: format!("bad coordinate line `{line}` in {name}.coords"),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [r, c] = fields.as_slice() else {
                return Err(bad());
            };
            coords.push((
                r.parse::<usize>().map_err(|_| bad())?,
                c.parse::<usize>().map_err(|_| bad())?,
            ));
        }
        BoolMatrix::from_coords(rows, rank, coords)
    };

    let factors = CpFactors::new(
        read_matrix("A", dims.0)?,
        read_matrix("B", dims.1)?,
        read_matrix("C", dims.2)?,
    )?;
    Ok((factors, seed))
}
