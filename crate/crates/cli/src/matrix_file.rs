//! JSON matrix files: `{"dim": n, "role": "...", "rows": [[[re, im], ...], ...]}`.
//!
//! States use a flat `rows` array of `n` entries. Numbers are written with 17
//! significant digits so every file re-parses to the same bits.

use std::fmt::Write as _;
use std::path::Path;

use qherm_core::{DenseMatrix, StateVector, C64};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Hamiltonian,
    Dyson,
    Metric,
    State,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Hamiltonian => "hamiltonian",
            Role::Dyson => "dyson",
            Role::Metric => "metric",
            Role::State => "state",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "hamiltonian" => Role::Hamiltonian,
            "dyson" => Role::Dyson,
            "metric" => Role::Metric,
            "state" => Role::State,
            _ => return None,
        })
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRows {
    Matrix(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    dim: usize,
    rows: RawRows,
    role: Option<String>,
}

/// Contents of a parsed file.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Matrix {
        matrix: DenseMatrix,
        role: Option<Role>,
    },
    State(StateVector),
}

fn entry(pair: [f64; 2]) -> Result<C64, String> {
    if pair.iter().all(|x| x.is_finite()) {
        Ok(C64::new(pair[0], pair[1]))
    } else {
        Err("non-finite entry".into())
    }
}

pub fn parse(text: &str) -> Result<Parsed, String> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let role = match raw.role.as_deref() {
        None => None,
        Some(s) => Some(Role::parse(s).ok_or_else(|| format!("unknown role `{s}`"))?),
    };
    if raw.dim == 0 {
        return Err("dim must be at least 1".into());
    }
    match (raw.rows, role) {
        (RawRows::Flat(v), Some(Role::State)) => {
            if v.len() != raw.dim {
                return Err(format!("state has {} entries, dim is {}", v.len(), raw.dim));
            }
            let amps = v.into_iter().map(entry).collect::<Result<Vec<_>, _>>()?;
            StateVector::new(amps)
                .map(Parsed::State)
                .map_err(|e| e.to_string())
        }
        (RawRows::Flat(_), _) => Err("flat rows are only allowed with role \"state\"".into()),
        (RawRows::Matrix(_), Some(Role::State)) => Err("a state must use a flat rows array".into()),
        (RawRows::Matrix(rows), role) => {
            if rows.len() != raw.dim || rows.iter().any(|r| r.len() != raw.dim) {
                return Err(format!("rows are not {0}x{0}", raw.dim));
            }
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(entry).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let matrix = DenseMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
            Ok(Parsed::Matrix { matrix, role })
        }
    }
}

fn number(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").unwrap();
}

fn pair(out: &mut String, z: C64) {
    out.push('[');
    number(out, z.re);
    out.push_str(", ");
    number(out, z.im);
    out.push(']');
}

fn header(out: &mut String, dim: usize, role: Option<Role>) {
    writeln!(out, "{{\n  \"dim\": {dim},").unwrap();
    if let Some(role) = role {
        writeln!(out, "  \"role\": \"{}\",", role.as_str()).unwrap();
    }
}

pub fn format_matrix(m: &DenseMatrix, role: Option<Role>) -> String {
    let mut out = String::new();
    header(&mut out, m.dim(), role);
    out.push_str("  \"rows\": [\n");
    let rows = m.to_rows();
    for (i, row) in rows.iter().enumerate() {
        out.push_str("    [");
        for (j, &z) in row.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            pair(&mut out, z);
        }
        out.push_str(if i + 1 < rows.len() { "],\n" } else { "]\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

pub fn format_state(psi: &StateVector) -> String {
    let mut out = String::new();
    header(&mut out, psi.dim(), Some(Role::State));
    out.push_str("  \"rows\": [");
    for (j, &z) in psi.amplitudes().iter().enumerate() {
        if j > 0 {
            out.push_str(", ");
        }
        pair(&mut out, z);
    }
    out.push_str("]\n}\n");
    out
}

fn read(path: &Path) -> Result<Parsed, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse(&text).map_err(|message| CliError::Parse {
        path: path.to_path_buf(),
        message,
    })
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, CliError> {
    match read(path)? {
        Parsed::Matrix { matrix, .. } => Ok(matrix),
        Parsed::State(_) => Err(CliError::Parse {
            path: path.to_path_buf(),
            message: "expected a square matrix, found a state".into(),
        }),
    }
}

pub fn read_state(path: &Path) -> Result<StateVector, CliError> {
    match read(path)? {
        Parsed::State(psi) => Ok(psi),
        Parsed::Matrix { .. } => Err(CliError::Parse {
            path: path.to_path_buf(),
            message: "expected a state with role \"state\"".into(),
        }),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn write_matrix(path: &Path, m: &DenseMatrix, role: Option<Role>) -> Result<(), CliError> {
    write_text(path, &format_matrix(m, role))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip_is_bit_exact() {
        let m = DenseMatrix::from_rows(&[
            vec![
                C64::new(0.1, -1.0 / 3.0),
                C64::new(f64::MIN_POSITIVE, 1e300),
            ],
            vec![
                C64::new(-0.0, 2.0f64.sqrt()),
                C64::new(std::f64::consts::PI, -7e-310),
            ],
        ])
        .unwrap();
        let text = format_matrix(&m, Some(Role::Metric));
        let Parsed::Matrix { matrix, role } = parse(&text).unwrap() else {
            panic!()
        };
        assert_eq!(role, Some(Role::Metric));
        for (a, b) in matrix.as_inner().iter().zip(m.as_inner().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(format_matrix(&matrix, role), text);
    }

    #[test]
    fn state_round_trip() {
        let psi = StateVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, -0.8)]).unwrap();
        let text = format_state(&psi);
        assert_eq!(parse(&text).unwrap(), Parsed::State(psi));
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "not json",
            r#"{"dim": 2, "rows": [[[1, 0]]]}"#,
            r#"{"dim": 1, "rows": [[1, 0]]}"#,
            r#"{"dim": 1, "role": "state", "rows": [[[1, 0]]]}"#,
            r#"{"dim": 1, "role": "bogus", "rows": [[[1, 0]]]}"#,
            r#"{"dim": 1, "rows": [[[1, 0, 2]]]}"#,
            r#"{"dim": 0, "rows": []}"#,
            r#"{"dim": 1, "rows": [[[1e999, 0]]]}"#,
            r#"{"dim": 1, "rows": [[[1, 0]]], "extra": 1}"#,
        ] {
            assert!(parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn plain_integers_are_accepted() {
        let text =
            r#"{"dim": 2, "role": "hamiltonian", "rows": [[[0, 0], [-2, 0]], [[1, 0], [3, 0]]]}"#;
        let Parsed::Matrix { matrix, .. } = parse(text).unwrap() else {
            panic!()
        };
        assert_eq!(
            matrix,
            DenseMatrix::from_real_rows(&[[0.0, -2.0], [1.0, 3.0]]).unwrap()
        );
    }
}
