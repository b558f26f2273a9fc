//! File and flag parsing. Every value is checked before any computation runs.

use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};
use crate::exactlin::{int, parse_scalar, Scalar};
use crate::filt::FilteredGrowthProfile;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))
}

/// Structured-text (JSON) input. Syntax errors and schema mismatches both
/// carry the line and column of the offending token.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        // Custom deserializer errors (bad rationals) are validation failures.
        if e.classify() == serde_json::error::Category::Data && e.to_string().contains("not an exact rational") {
            return Error::validation(e.to_string());
        }
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_json(&read_text(path)?)
}

fn flag_error(flag: &str, value: &str, why: &str) -> Error {
    Error::validation(format!("--{flag} {value:?}: {why}"))
}

/// `lo..hi` with `1 ≤ lo`.
pub fn parse_window(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once("..").ok_or_else(|| flag_error("window", s, "expected lo..hi"))?;
    let lo: usize = a.trim().parse().map_err(|_| flag_error("window", s, "bad lower end"))?;
    let hi: usize = b.trim().parse().map_err(|_| flag_error("window", s, "bad upper end"))?;
    if lo < 1 || hi < lo {
        return Err(flag_error("window", s, "need 1 ≤ lo ≤ hi"));
    }
    Ok((lo, hi))
}

/// Comma-separated positive integers.
pub fn parse_degrees(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|d| {
            d.trim()
                .parse::<u32>()
                .map_err(|_| flag_error("degrees", s, "expected positive integers"))
        })
        .collect()
}

/// `a..b` (integer steps), `a..b:step` (rational step), or a comma list of
/// rationals. The result is strictly increasing.
pub fn parse_grid(s: &str) -> Result<Vec<Scalar>> {
    let scalar = |t: &str| parse_scalar(t).map_err(|_| flag_error("grid", s, "not an exact rational"));
    let grid = if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (b, scalar(st)?),
            None => (rest, int(1)),
        };
        let (a, b) = (scalar(a)?, scalar(b)?);
        if step <= int(0) {
            return Err(flag_error("grid", s, "step must be positive"));
        }
        let mut out = Vec::new();
        let mut x = a;
        while x <= b {
            out.push(x.clone());
            x += &step;
            if out.len() > 100_000 {
                return Err(flag_error("grid", s, "more than 100000 points"));
            }
        }
        out
    } else {
        s.split(',').map(scalar).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() {
        return Err(flag_error("grid", s, "empty grid"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(flag_error("grid", s, "must be strictly increasing"));
    }
    Ok(grid)
}

/// A profile TSV: either `x, i` (filtered growth) or `n, dim, exact_flag`
/// (word growth). Lines starting with `#` are skipped.
pub fn parse_profile(text: &str) -> Result<FilteredGrowthProfile> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty profile".into(),
    })?;
    let columns: Vec<&str> = header.split('\t').collect();
    if columns != ["x", "i"] && columns != ["n", "dim", "exact_flag"] {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("unknown profile header {header:?}"),
        });
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (k, line) in lines {
        let bad = |column: usize, what: &str| Error::Parse {
            line: k + 1,
            column,
            message: what.to_string(),
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns.len() {
            return Err(bad(1, &format!("expected {} fields", columns.len())));
        }
        grid.push(parse_scalar(fields[0]).map_err(|_| bad(1, "grid point is not an exact rational"))?);
        values.push(
            fields[1]
                .parse::<usize>()
                .map_err(|_| bad(fields[0].len() + 2, "value is not a count"))?,
        );
    }
    FilteredGrowthProfile::from_values("K", "L", grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1..3").unwrap(), [int(1), int(2), int(3)]);
        assert_eq!(parse_grid("0..1:1/2").unwrap(), [int(0), ratio(1, 2), int(1)]);
        assert_eq!(parse_grid("2,5/2").unwrap(), [int(2), ratio(5, 2)]);
        assert!(parse_grid("3..1").is_err());
        assert!(parse_grid("1,1").is_err());
        assert!(parse_grid("0..1:0").is_err());
    }

    #[test]
    fn profiles() {
        let p = parse_profile("x\ti\n1\t2\n3/2\t5\n").unwrap();
        assert_eq!(p.values, [2, 5]);
        let g = parse_profile("n\tdim\texact_flag\n1\t2\texact\n2\t6\texact\n# classification\n").unwrap();
        assert_eq!(g.grid, [int(1), int(2)]);
        assert!(matches!(
            parse_profile("x\ti\n1\tq\n"),
            Err(Error::Parse { line: 2, column: 3, .. })
        ));
    }

    #[test]
    fn json_positions() {
        let e = parse_json::<Vec<u32>>("[1,\n 2,\n x]").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
    }
}
