//! CSV tables and the run manifest.
//!
//! Every CSV starts with a header row. Floating-point cells use 17
//! significant digits (`{:.16e}`), which round-trips any `f64` exactly.
//!
//! | file | columns |
//! |---|---|
//! | `states.csv` | `t`, `rho_ij_re`, `rho_ij_im` (row-major), `internal_energy` |
//! | `flux.csv` | `t`, `power`, `base_power`, `delta_flux`, `internal_energy`, `base_internal_energy` |
//! | `ergotropy.csv` | `alpha_mag`, `theta`, `gap_factor`, `ergotropy_closed_form`, `ergotropy_general` |
//! | `ergotropy_series.csv` | `t`, `ergotropy`, `internal_energy`, `passive_energy` |
//! | `ensemble.csv` | `t`, `rho_ij_re`, `rho_ij_im`, `trace_distance` |
//! | `trajectory_K.csv` | `t`, `outcome`, `psi_i_re`, `psi_i_im` |
//! | `search.csv` | `alpha_mag`, `theta0`, `theta_rate`, `objective`, `is_best` |
//! | `fig1_LABEL.csv` | `t`, `flux`, `internal_energy` |
//! | `lit_check.csv` | `invariant`, `max_deviation`, `tol` |

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use lindblad_lit::linalg::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<String>) -> Self {
        Table {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let mut w = csv::Writer::from_path(dir.join(&self.name))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub fn matrix_columns(prefix: &str, d: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            out.push(format!("{prefix}_{i}{j}_re"));
            out.push(format!("{prefix}_{i}{j}_im"));
        }
    }
    out
}

pub fn matrix_cells(m: &ComplexMatrix) -> Vec<String> {
    m.data().iter().flat_map(|z| [num(z.re), num(z.im)]).collect()
}

pub fn vector_columns(prefix: &str, d: usize) -> Vec<String> {
    (0..d)
        .flat_map(|i| [format!("{prefix}_{i}_re"), format!("{prefix}_{i}_im")])
        .collect()
}

pub fn vector_cells(v: &[C64]) -> Vec<String> {
    v.iter().flat_map(|z| [num(z.re), num(z.im)]).collect()
}

/// Everything needed to reproduce a run. Contains no timestamps or paths,
/// so identical runs write identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub scenario: Scenario,
    pub seeds: Vec<u64>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub summary: BTreeMap<String, serde_json::Value>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl Manifest {
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)
    }
}
