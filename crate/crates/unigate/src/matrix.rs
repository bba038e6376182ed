//! Matrices as JSON: an array of rows, each entry a `[re, im]` pair.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use unigate_core::Unitary;

use crate::error::{CliError, Result};

pub fn to_json(u: &Unitary) -> serde_json::Value {
    let n = u.dim();
    let rows: Vec<Vec<[f64; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| [u.get(i, j).re, u.get(i, j).im]).collect())
        .collect();
    serde_json::json!(rows)
}

pub fn from_json(text: &str) -> Result<Unitary> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text).map_err(|e| CliError::Config(format!("target: {e}")))?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config("target: matrix is not square".into()));
    }
    let entries = rows
        .into_iter()
        .flatten()
        .map(|[re, im]| Complex64::new(re, im))
        .collect();
    Unitary::new(n, entries).map_err(|e| CliError::Config(format!("target: {e}")))
}

/// `cnot`, `swap`, `identity`, or a path to a JSON matrix file.
pub fn resolve_target(spec: &str) -> Result<Unitary> {
    match spec {
        "cnot" => Ok(Unitary::cnot()),
        "swap" => Ok(Unitary::swap()),
        "identity" => Ok(Unitary::identity(4)),
        path => {
            let text = fs::read_to_string(Path::new(path)).map_err(CliError::io(path))?;
            from_json(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let u = unigate_core::haar_random(4, 3).unwrap();
        let back = from_json(&to_json(&u).to_string()).unwrap();
        assert_eq!(u.max_abs_diff(&back).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(from_json("[[[1,0],[0,0]]]").is_err());
        assert!(from_json("[[[2,0]]]").is_err());
        assert!(from_json("{\"rows\": 1}").is_err());
    }
}
