//! Reading polynomial files, bitstrings and rationals from the command line.

use std::io::Read;
use std::path::Path;

use f2lab_core::gf2::{parse_poly_lines, PolyF2};
use f2lab_core::rational::{self, Rational};
use f2lab_core::subspace::{Subspace, SubspaceJson};

use crate::error::CliError;

/// File contents; `-` reads standard input.
pub fn read_text(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(io)
}

pub fn read_polys(path: &Path, m: Option<u32>) -> Result<Vec<PolyF2>, CliError> {
    let polys = parse_poly_lines(&read_text(path)?, m)?;
    if polys.is_empty() {
        return Err(CliError::Input {
            path: path.to_path_buf(),
            msg: "no polynomials".into(),
        });
    }
    Ok(polys)
}

/// One line per family member, petal polynomials separated by `;`.
pub fn read_petals(path: &Path, m: Option<u32>) -> Result<Vec<Vec<PolyF2>>, CliError> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let members = body
            .split(';')
            .map(|s| PolyF2::parse(s.trim(), m))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(members);
    }
    Ok(out)
}

/// Widens everything to the largest variable count present.
pub fn align(groups: &mut [&mut Vec<PolyF2>]) -> Result<u32, CliError> {
    let m = groups.iter().flat_map(|g| g.iter()).map(PolyF2::m).max().unwrap_or(0);
    for g in groups.iter_mut() {
        for p in g.iter_mut() {
            *p = p.with_vars(m)?;
        }
    }
    Ok(m)
}

pub fn parse_bits(s: &str, what: &str) -> Result<Vec<bool>, CliError> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::Usage(format!("{what} must be a bitstring of 0s and 1s"))),
        })
        .collect()
}

pub fn parse_rational(s: &str, what: &str) -> Result<Rational, CliError> {
    rational::parse(s).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

pub fn parse_vec(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("--vec: cannot parse {t:?} as a non-negative integer")))
        })
        .collect()
}

/// A JSON array of `{m, basis}` objects, or `{"spaces": [...]}`.
pub fn read_subspaces(path: &Path) -> Result<Vec<Subspace>, CliError> {
    let text = read_text(path)?;
    let bad = |msg: String| CliError::Input {
        path: path.to_path_buf(),
        msg,
    };
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let list = match &v {
        serde_json::Value::Array(_) => v.clone(),
        serde_json::Value::Object(o) if o.contains_key("spaces") => o["spaces"].clone(),
        _ => return Err(bad("expected an array of subspaces".into())),
    };
    let js: Vec<SubspaceJson> = serde_json::from_value(list).map_err(|e| bad(e.to_string()))?;
    Ok(js.iter().map(Subspace::from_json).collect::<Result<Vec<_>, _>>()?)
}
