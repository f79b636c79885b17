//! Text cache for irreducible tables.
//!
//! ```text
//! ffrmf-irred v1 q=<q> D=<D>
//! <full coefficient digits, lowest degree first, leading 1 included>
//! ...
//! ```
//!
//! Digits are written back to back when `q <= 10` and comma-separated
//! otherwise. Polynomials appear in table order (degree, then encoding).

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::field::FieldSpec;
use super::irred::IrredTable;
use super::poly::MonicPoly;
use crate::counting::pi_irred;
use crate::error::{Error, Result};

pub const CACHE_DIR_ENV: &str = "FFRMF_CACHE_DIR";

pub fn header(q: u32, max_degree: usize) -> String {
    format!("ffrmf-irred v1 q={q} D={max_degree}")
}

pub fn cache_file_name(q: u32, max_degree: usize) -> String {
    format!("irred-q{q}-D{max_degree}.txt")
}

fn encode(p: &MonicPoly, q: u32) -> String {
    let digits = p.full_coeffs();
    if q <= 10 {
        digits.iter().map(|d| char::from_digit(*d, 10).unwrap()).collect()
    } else {
        digits.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

fn decode(line: &str, q: u32) -> Result<MonicPoly> {
    let digits: Result<Vec<u32>> = if q <= 10 {
        line.chars()
            .map(|c| c.to_digit(10).ok_or_else(|| Error::CacheFormat(format!("bad digit {c:?}"))))
            .collect()
    } else {
        line.split(',')
            .map(|s| s.parse().map_err(|_| Error::CacheFormat(format!("bad digit {s:?}"))))
            .collect()
    };
    let mut digits = digits?;
    if digits.iter().any(|&d| d >= q) {
        return Err(Error::CacheFormat(format!("digit out of range in {line:?}")));
    }
    if digits.pop() != Some(1) {
        return Err(Error::CacheFormat(format!("not monic: {line:?}")));
    }
    Ok(MonicPoly::from_coeffs(digits))
}

pub fn write_table<W: Write>(table: &IrredTable, mut out: W) -> Result<()> {
    let q = table.field().q();
    writeln!(out, "{}", header(q, table.max_degree()))?;
    for d in 1..=table.max_degree() {
        for p in table.of_degree(d) {
            writeln!(out, "{}", encode(p, q))?;
        }
    }
    Ok(())
}

/// Reads a cached table, checking the header, the ordering and the
/// per-degree counts against the necklace formula.
pub fn read_table<R: BufRead>(field: &FieldSpec, input: R) -> Result<IrredTable> {
    let mut lines = input.lines();
    let head = lines.next().ok_or_else(|| Error::CacheFormat("empty file".into()))??;
    let rest = head
        .strip_prefix(&format!("ffrmf-irred v1 q={} D=", field.q()))
        .ok_or_else(|| Error::CacheFormat(format!("unexpected header {head:?}")))?;
    let max_degree: usize = rest
        .trim()
        .parse()
        .map_err(|_| Error::CacheFormat(format!("bad degree in {head:?}")))?;
    let mut levels: Vec<Vec<MonicPoly>> = vec![Vec::new(); max_degree + 1];
    let mut prev: Option<MonicPoly> = None;
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let p = decode(&line, field.q())?;
        if p.degree() == 0 || p.degree() > max_degree {
            return Err(Error::CacheFormat(format!("degree out of range: {line:?}")));
        }
        if prev.as_ref().is_some_and(|prev| prev >= &p) {
            return Err(Error::CacheFormat("entries not strictly increasing".into()));
        }
        prev = Some(p.clone());
        levels[p.degree()].push(p);
    }
    for (d, level) in levels.iter().enumerate().skip(1) {
        if pi_irred(field.q() as u64, d) != num_bigint::BigUint::from(level.len()) {
            return Err(Error::CacheFormat(format!("wrong count at degree {d}")));
        }
    }
    Ok(IrredTable::from_levels(field.clone(), levels))
}

/// Loads the table for `(q, D)` from `dir` if present and valid, otherwise
/// builds it and writes it there.
pub fn load_or_build(field: &FieldSpec, max_degree: usize, dir: Option<&Path>) -> Result<IrredTable> {
    let Some(dir) = dir else {
        return IrredTable::build(field, max_degree);
    };
    let path: PathBuf = dir.join(cache_file_name(field.q(), max_degree));
    if let Ok(file) = fs::File::open(&path) {
        if let Ok(table) = read_table(field, BufReader::new(file)) {
            return Ok(table);
        }
    }
    let table = IrredTable::build(field, max_degree)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    write_table(&table, fs::File::create(&tmp)?)?;
    fs::rename(&tmp, &path)?;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_first_lines() {
        let f2 = FieldSpec::new(2, 1).unwrap();
        let t = IrredTable::build(&f2, 3).unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "ffrmf-irred v1 q=2 D=3\n01\n11\n111\n1101\n1011\n");
    }

    #[test]
    fn round_trip_and_rejects_tampering() {
        for q in [2u64, 4, 11] {
            let field = FieldSpec::with_order(q).unwrap();
            let t = IrredTable::build(&field, 3).unwrap();
            let mut buf = Vec::new();
            write_table(&t, &mut buf).unwrap();
            let back = read_table(&field, buf.as_slice()).unwrap();
            for d in 1..=3 {
                assert_eq!(back.of_degree(d), t.of_degree(d));
            }
            let text = String::from_utf8(buf).unwrap();
            let truncated: String = text.lines().take(3).map(|l| format!("{l}\n")).collect();
            assert!(read_table(&field, truncated.as_bytes()).is_err());
        }
    }

    #[test]
    fn uses_cache_dir() {
        let dir = tempfile::tempdir().unwrap();
        let f3 = FieldSpec::new(3, 1).unwrap();
        let a = load_or_build(&f3, 4, Some(dir.path())).unwrap();
        assert!(dir.path().join("irred-q3-D4.txt").exists());
        let b = load_or_build(&f3, 4, Some(dir.path())).unwrap();
        assert_eq!(a.of_degree(4), b.of_degree(4));

        fs::write(dir.path().join("irred-q3-D4.txt"), "ffrmf-irred v1 q=3 D=4\n01\n").unwrap();
        let c = load_or_build(&f3, 4, Some(dir.path())).unwrap();
        assert_eq!(a.of_degree(4), c.of_degree(4));
        let rewritten = fs::read_to_string(dir.path().join("irred-q3-D4.txt")).unwrap();
        assert!(rewritten.lines().count() > 2);
    }
}
