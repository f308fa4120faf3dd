// SPDX-License-Identifier: Apache-2.0

//! CSV tables with a `#`-prefixed metadata block.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Shortest round-trip form, in scientific notation outside `[1e-3, 1e6)`.
pub fn short(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-3..1e6).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Formats a value with 17 significant digits.
pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    metadata: Vec<(String, String)>,
    header: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }
}

/// Writes `text` to `path`, or to `stdout` when no path is given.
pub fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => match stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
        {
            // The reader went away (e.g. `| head`); nothing left to deliver.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other.map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
        },
    }
}
