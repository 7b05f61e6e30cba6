//! Tab-separated report lines: `name, value, tolerance, pass`.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Record {
    pub fn check(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
            tolerance,
        }
    }

    /// A reported quantity with no acceptance bound (`tolerance = inf`).
    pub fn info(name: &str, value: f64) -> Self {
        Self::check(name, value, f64::INFINITY)
    }

    /// NaN never passes.
    pub fn pass(&self) -> bool {
        self.value <= self.tolerance
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{:.16e}\t{:.16e}\t{}",
            self.name,
            self.value,
            self.tolerance,
            self.pass()
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report(pub Vec<Record>);

impl Report {
    pub fn push(&mut self, record: Record) {
        self.0.push(record);
    }

    pub fn all_pass(&self) -> bool {
        self.0.iter().all(Record::pass)
    }

    pub fn get(&self, name: &str) -> Option<&Record> {
        self.0.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.0 {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Parses one line written by [`Record`]'s `Display`.
pub fn parse_line(line: &str) -> Option<(Record, bool)> {
    let mut parts = line.split('\t');
    let name = parts.next()?;
    let value = parts.next()?.parse().ok()?;
    let tolerance = parts.next()?.parse().ok()?;
    let pass = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((Record::check(name, value, tolerance), pass))
}
