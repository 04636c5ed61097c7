use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::export::{fmt_f64, write_csv_row};

/// Named observable time series on a strictly increasing time grid.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    names: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(names: Vec<String>) -> Self {
        Self {
            names,
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::Input(format!(
                "{} values for {} observables",
                values.len(),
                self.names.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::Input(format!("time {t} does not increase past {last}")));
            }
        }
        self.times.push(t);
        self.rows.push(values);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn last(&self, name: &str) -> Option<f64> {
        let k = self.names.iter().position(|n| n == name)?;
        self.rows.last().map(|r| r[k])
    }

    pub fn row(&self, i: usize) -> (f64, &[f64]) {
        (self.times[i], &self.rows[i])
    }

    /// Appends another trajectory, shifting its times by `offset` and
    /// dropping samples that would not advance time.
    pub fn extend_shifted(&mut self, other: &Trajectory, offset: f64) -> Result<()> {
        if other.names != self.names {
            return Err(Error::Input("trajectories record different observables".into()));
        }
        for (t, row) in other.times.iter().zip(&other.rows) {
            let t = t + offset;
            if self.times.last().is_some_and(|&last| t <= last) {
                continue;
            }
            self.push(t, row.clone())?;
        }
        Ok(())
    }

    /// CSV with header `t,<names>` and 17 significant digits per value.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend(self.names.iter().cloned());
        write_csv_row(w, &header)?;
        for (t, row) in self.times.iter().zip(&self.rows) {
            let mut fields = vec![fmt_f64(*t)];
            fields.extend(row.iter().map(|v| fmt_f64(*v)));
            write_csv_row(w, &fields)?;
        }
        Ok(())
    }
}
