use std::fs;
use std::path::Path;

use blowuplab::blowup::{spec_from_json, BlowupSpec, Child, PrunedSpec, StepGraphon};
use blowuplab::graph6;
use blowuplab::logic::Interpretation;
use blowuplab::registry::level_rules;
use blowuplab::structure::structure_from_json;
use blowuplab::substitution::Family;
use blowuplab::{Graph, Language, Structure};
use num::{BigInt, BigRational, Zero};
use serde_json::Value;

use crate::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// A structure from a JSON object or the first graph6 line of a file.
pub fn structure(path: &Path) -> Result<Structure, CliError> {
    let text = read(path)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        structure_from_json(trimmed).map_err(|e| invalid(path, e))
    } else {
        let line = trimmed.lines().next().ok_or_else(|| invalid(path, "empty file"))?;
        Ok(graph6::decode(line).map_err(|e| invalid(path, e))?.to_structure())
    }
}

pub fn graph(path: &Path) -> Result<Graph, CliError> {
    structure(path)?.to_graph().map_err(|e| invalid(path, e))
}

/// A family from a JSON array of structures or graph6 lines.
pub fn family(path: &Path) -> Result<Family, CliError> {
    let text = read(path)?;
    let trimmed = text.trim_start();
    let members: Vec<Structure> = if trimmed.starts_with('[') {
        let items: Vec<Value> = serde_json::from_str(trimmed).map_err(|e| invalid(path, e))?;
        items
            .iter()
            .map(|v| match v {
                Value::String(s) => graph6::decode(s).map(|g| g.to_structure()),
                other => structure_from_json(&other.to_string()),
            })
            .collect::<Result<_, _>>()
            .map_err(|e| invalid(path, e))?
    } else {
        graph6::decode_lines(trimmed)
            .map_err(|e| invalid(path, e))?
            .into_iter()
            .map(|g| g.to_structure())
            .collect()
    };
    let language = members
        .first()
        .map(|s| s.language().clone())
        .unwrap_or_else(Language::graph);
    Family::from_structures(language, members).map_err(|e| invalid(path, e))
}

pub fn spec(path: &Path) -> Result<BlowupSpec, CliError> {
    let rules = level_rules();
    let lookup = |name: &str| rules.get(name).ok();
    spec_from_json(&read(path)?, &lookup).map_err(|e| invalid(path, e))
}

pub fn pruned(spec_path: &Path, mask: Option<&Path>) -> Result<PrunedSpec, CliError> {
    let spec = spec(spec_path)?;
    match mask {
        None => Ok(PrunedSpec::full(spec)),
        Some(m) => {
            let v: Value = serde_json::from_str(&read(m)?).map_err(|e| invalid(m, e))?;
            let child = Child::from_json(&v).map_err(|e| invalid(m, e))?;
            blowuplab::blowup::prune_spec(&spec, child).map_err(|e| invalid(m, e))
        }
    }
}

pub fn interpretation(path: &Path) -> Result<Interpretation, CliError> {
    Interpretation::from_json(&read(path)?).map_err(|e| invalid(path, e))
}

/// `{"measures": ["1/2", "1/2"], "weights": [["0", "1"], ["1", "0"]]}`; numbers are accepted too.
pub fn step_graphon(path: &Path) -> Result<StepGraphon, CliError> {
    let v: Value = serde_json::from_str(&read(path)?).map_err(|e| invalid(path, e))?;
    let num = |x: &Value| -> Result<BigRational, CliError> {
        match x {
            Value::String(s) => rational(s).map_err(|e| invalid(path, e)),
            Value::Number(n) => rational(&n.to_string()).map_err(|e| invalid(path, e)),
            _ => Err(invalid(path, format!("expected a number, got {x}"))),
        }
    };
    let measures = v["measures"]
        .as_array()
        .ok_or_else(|| invalid(path, "missing `measures`"))?
        .iter()
        .map(num)
        .collect::<Result<Vec<_>, _>>()?;
    let weights = v["weights"]
        .as_array()
        .ok_or_else(|| invalid(path, "missing `weights`"))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| invalid(path, "weight rows must be arrays"))?
                .iter()
                .map(num)
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    StepGraphon::new(measures, weights).map_err(|e| invalid(path, e))
}

/// Exact value of `a/b`, `123`, `0.25` or `1e-9`.
pub fn rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    let bad = || format!("cannot read `{text}` as a rational number");
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (mantissa, exp) = match t.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(digits);
    for _ in 0..scale.unsigned_abs() {
        if scale > 0 {
            value *= &ten;
        } else {
            value /= &ten;
        }
    }
    Ok(if neg { -value } else { value })
}

pub fn permutation(text: &str) -> Result<blowuplab::families::Permutation, CliError> {
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| CliError::Usage(format!("bad permutation entry `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    blowuplab::families::Permutation::new(values).map_err(CliError::Lib)
}


#[cfg(test)]
mod tests {
    use super::rational;
    use num::{BigInt, BigRational};

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn rationals() {
        assert_eq!(rational("2/3").unwrap(), q(2, 3));
        assert_eq!(rational("1e-9").unwrap(), q(1, 1_000_000_000));
        assert_eq!(rational("0.25").unwrap(), q(1, 4));
        assert_eq!(rational("-1.5e1").unwrap(), q(-15, 1));
        assert_eq!(rational("7").unwrap(), q(7, 1));
        assert!(rational("x").is_err() && rational("1/0").is_err() && rational(".").is_err());
    }
}
