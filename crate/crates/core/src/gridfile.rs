//! Plain-text raster format.
//!
//! ```text
//! # dirac-enclosure raster
//! # version 0.1.0
//! # m 5
//! # norm3 0.3
//! # norm32 na
//! # grid -10,10,201,-10,10,201
//! # columns re im f thm1_lhs thm2_lhs certified
//! -1.0000000000000000e1 -1.0000000000000000e1 1.0000000000000000e0 ... 1
//! ```
//!
//! One row per cell, imaginary part in the outer loop, both ascending.
//! Numbers carry 17 significant digits so they parse back bit-exactly;
//! infinities are written `inf` and absent values `na`. Free-form notes are
//! written as `# note ...` and ignored by the parser, as is any unknown key.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::enclosure::{f_function, EnclosureReport, GridSpec, RegionGrid};
use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
const COLUMNS: &str = "re im f thm1_lhs thm2_lhs certified";

/// Formats a float with 17 significant digits; `inf`/`-inf` for infinities.
pub fn format_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn format_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "na".to_string(), format_f64)
}

/// Writes the header, any extra `notes` as comment lines, and one row per cell.
pub fn write_grid<W: Write>(grid: &RegionGrid, notes: &[String], mut out: W) -> Result<()> {
    writeln!(out, "# dirac-enclosure raster")?;
    writeln!(out, "# version {VERSION}")?;
    writeln!(out, "# m {}", format_f64(grid.m))?;
    writeln!(out, "# norm3 {}", format_f64(grid.norm3))?;
    writeln!(out, "# norm32 {}", format_opt(grid.norm32))?;
    writeln!(out, "# grid {}", grid.spec)?;
    for note in notes {
        for line in note.lines() {
            writeln!(out, "# note {line}")?;
        }
    }
    writeln!(out, "# columns {COLUMNS}")?;
    for c in &grid.cells {
        writeln!(
            out,
            "{} {} {} {} {} {}",
            format_f64(c.lambda.re),
            format_f64(c.lambda.im),
            format_f64(c.f_value),
            format_f64(c.thm1_lhs),
            format_opt(c.thm2_lhs),
            u8::from(c.certified)
        )?;
    }
    Ok(())
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|e| Error::Parse { line, message: format!("bad number `{tok}`: {e}") })
}

fn parse_opt(tok: &str, line: usize) -> Result<Option<f64>> {
    if tok == "na" {
        Ok(None)
    } else {
        parse_f64(tok, line).map(Some)
    }
}

/// Reads a grid file back into a [`RegionGrid`].
///
/// The per-criterion flags are reconstructed from the left-hand sides
/// (`lhs < 1`), which is how they were produced.
pub fn read_grid<R: BufRead>(input: R) -> Result<RegionGrid> {
    let mut m = None;
    let mut norm3 = None;
    let mut norm32 = None;
    let mut spec = None;
    let mut cells = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            let (key, value) = comment.split_once(' ').unwrap_or((comment, ""));
            match key {
                "m" => m = Some(parse_f64(value, lineno)?),
                "norm3" => norm3 = Some(parse_f64(value, lineno)?),
                "norm32" => norm32 = Some(parse_opt(value, lineno)?),
                "grid" => {
                    spec = Some(GridSpec::parse(value).map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?)
                }
                _ => {}
            }
            continue;
        }
        let toks: Vec<&str> = line.split(' ').collect();
        if toks.len() != 6 {
            return Err(Error::Parse { line: lineno, message: format!("expected 6 columns, got {}", toks.len()) });
        }
        let mass = m.ok_or(Error::Parse { line: lineno, message: "data row before `# m` header".into() })?;
        let lambda = Complex64::new(parse_f64(toks[0], lineno)?, parse_f64(toks[1], lineno)?);
        let f_value = parse_f64(toks[2], lineno)?;
        let thm1_lhs = parse_f64(toks[3], lineno)?;
        let thm2_lhs = parse_opt(toks[4], lineno)?;
        let certified = match toks[5] {
            "1" => true,
            "0" => false,
            other => return Err(Error::Parse { line: lineno, message: format!("bad certified flag `{other}`") }),
        };
        cells.push(EnclosureReport {
            lambda,
            m: mass,
            f_value,
            thm1_lhs,
            thm1_certified: thm1_lhs < 1.0,
            thm2_lhs,
            thm2_certified: thm2_lhs.map(|l| l < 1.0),
            certified,
        });
    }
    let missing = |what: &str| Error::Parse { line: 0, message: format!("missing `# {what}` header") };
    let spec = spec.ok_or_else(|| missing("grid"))?;
    if cells.len() != spec.len() {
        return Err(Error::Parse {
            line: 0,
            message: format!("grid declares {} cells but file has {} rows", spec.len(), cells.len()),
        });
    }
    Ok(RegionGrid {
        spec,
        m: m.ok_or_else(|| missing("m"))?,
        norm3: norm3.ok_or_else(|| missing("norm3"))?,
        norm32: norm32.ok_or_else(|| missing("norm32"))?,
        cells,
    })
}

/// Checks that every row of a parsed grid matches a fresh evaluation of `f`.
pub fn f_column_consistent(grid: &RegionGrid) -> bool {
    grid.cells.iter().all(|c| {
        let f = f_function(c.lambda, grid.m);
        f == c.f_value
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclosure::raster;

    #[test]
    fn float_format() {
        assert_eq!(format_f64(f64::INFINITY), "inf");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(-0.1).parse::<f64>().unwrap(), -0.1);
        assert_eq!("inf".parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn roundtrip_small_grid() {
        let spec = GridSpec::parse("-6,6,7,-1,1,5").unwrap();
        let grid = raster(&spec, 5.0, 0.3, Some(0.1)).unwrap();
        let mut buf = Vec::new();
        write_grid(&grid, &["first run".into()], &mut buf).unwrap();
        let back = read_grid(buf.as_slice()).unwrap();
        assert_eq!(back, grid);
        assert!(f_column_consistent(&back));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(" inf "));
        assert!(text.contains("# note first run"));
    }

    #[test]
    fn absent_norm32_roundtrips() {
        let spec = GridSpec::parse("-1,1,2,-1,1,2").unwrap();
        let grid = raster(&spec, 0.0, 0.1, None).unwrap();
        let mut buf = Vec::new();
        write_grid(&grid, &[], &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).lines().last().unwrap().contains(" na "));
        assert_eq!(read_grid(buf.as_slice()).unwrap(), grid);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(read_grid("# m 1\n1 2 3\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(read_grid("1 2 3 4 5 1\n".as_bytes()).is_err());
        assert!(read_grid("# m 1\n# norm3 0\n# norm32 na\n".as_bytes()).is_err());
        let wrong_count = "# m 1\n# norm3 0\n# norm32 na\n# grid -1,1,2,-1,1,2\n0 0 1 0 na 1\n";
        assert!(read_grid(wrong_count.as_bytes()).is_err());
    }
}
