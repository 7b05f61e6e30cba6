#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use qherm_cli::matrix_file::{self, Parsed};
use qherm_cli::report::{parse_line, Record};
use qherm_core::DenseMatrix;

pub fn qherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qherm"))
        .args(args)
        .output()
        .expect("spawn qherm")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn records(text: &str) -> Vec<(Record, bool)> {
    text.lines()
        .map(|l| parse_line(l).unwrap_or_else(|| panic!("bad report line {l:?}")))
        .collect()
}

pub fn record(text: &str, name: &str) -> Record {
    records(text)
        .into_iter()
        .map(|(r, _)| r)
        .find(|r| r.name == name)
        .unwrap_or_else(|| panic!("no `{name}` row in\n{text}"))
}

pub fn load(path: &Path) -> DenseMatrix {
    matrix_file::read_matrix(path).unwrap()
}

pub fn load_parsed(path: &Path) -> Parsed {
    matrix_file::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn real(rows: &[&[f64]]) -> DenseMatrix {
    DenseMatrix::from_real_rows(rows).unwrap()
}

pub fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}
