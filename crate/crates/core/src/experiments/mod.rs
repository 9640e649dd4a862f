//! Scripted parameter sweeps reproducing the bound-state and transport
//! studies, written as `#`-commented CSV tables.
//!
//! Every run is deterministic: points are solved in parallel but assembled
//! by index, and the output file name carries a SHA-256 of the serialized
//! spec. Each experiment carries its own expectation block ("anchors"),
//! evaluated on the computed data and reported in the summary.

pub mod analysis;
mod contour;
pub(crate) mod runs;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use contour::{contour_extract, Polyline, Surface};
pub use runs::compute;

use analysis::linspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentId {
    #[serde(rename = "table1")]
    Table1,
    #[serde(rename = "fig2_gp")]
    Fig2Gp,
    #[serde(rename = "fig3_pd")]
    Fig3Pd,
    #[serde(rename = "fig4a_levels_vs_lambda")]
    Fig4aLevelsVsLambda,
    #[serde(rename = "fig4b_ground_vs_height")]
    Fig4bGroundVsHeight,
    #[serde(rename = "fig5_gaas")]
    Fig5Gaas,
    #[serde(rename = "fig6_T_vs_E")]
    Fig6TVsE,
    #[serde(rename = "fig7_T_vs_E_eps")]
    Fig7TVsEEps,
    #[serde(rename = "fig8_T_vs_R1")]
    Fig8TVsR1,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        ExperimentId::Table1,
        ExperimentId::Fig2Gp,
        ExperimentId::Fig3Pd,
        ExperimentId::Fig4aLevelsVsLambda,
        ExperimentId::Fig4bGroundVsHeight,
        ExperimentId::Fig5Gaas,
        ExperimentId::Fig6TVsE,
        ExperimentId::Fig7TVsEEps,
        ExperimentId::Fig8TVsR1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Table1 => "table1",
            ExperimentId::Fig2Gp => "fig2_gp",
            ExperimentId::Fig3Pd => "fig3_pd",
            ExperimentId::Fig4aLevelsVsLambda => "fig4a_levels_vs_lambda",
            ExperimentId::Fig4bGroundVsHeight => "fig4b_ground_vs_height",
            ExperimentId::Fig5Gaas => "fig5_gaas",
            ExperimentId::Fig6TVsE => "fig6_T_vs_E",
            ExperimentId::Fig7TVsEEps => "fig7_T_vs_E_eps",
            ExperimentId::Fig8TVsR1 => "fig8_T_vs_R1",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ExperimentError::InvalidSpec(format!("unknown experiment '{s}'")))
    }
}

/// Inclusive uniform range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinSpace {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl LinSpace {
    pub fn new(start: f64, end: f64, points: usize) -> Self {
        LinSpace { start, end, points }
    }
    pub fn values(&self) -> Vec<f64> {
        linspace(self.start, self.end, self.points)
    }
}

/// Parameter grid of each experiment. Lengths in nm, energies in meV; the
/// bound-state studies other than `fig5_gaas` are dimensionless (ρ = 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepGrid {
    Table1 { lambda: f64, heights: Vec<f64>, count: usize },
    GpProfile { lambdas: Vec<f64>, height: f64, z_points: usize },
    Densities { lambda: f64, heights: Vec<f64>, count: usize, z_points: usize },
    LevelsVsLambda { lambdas: LinSpace, heights: Vec<f64>, count: usize },
    GroundVsHeight { lambdas: Vec<f64>, heights: LinSpace },
    Gaas { rho_nm: f64, mass_ratio: f64, lambdas: LinSpace, heights: LinSpace, contour_levels: Vec<f64> },
    TransmissionVsEnergy { r1_nm: Vec<f64>, r2_nm: f64, half_length_nm: f64, transition_nm: f64, energies_mev: LinSpace, grid_points: usize },
    TransmissionVsEnergyEps { r1_nm: f64, r2_nm: f64, half_length_nm: f64, transitions_nm: Vec<f64>, energies_mev: LinSpace, grid_points: usize },
    TransmissionVsR1 { r1_nm: LinSpace, r2_nm: f64, half_lengths_nm: Vec<f64>, transition_nm: f64, energy_l_mev: f64, grid_points: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub experiment_id: ExperimentId,
    pub grid: SweepGrid,
    /// Directory receiving the output files; not part of the content hash.
    #[serde(skip)]
    pub output_dir: PathBuf,
}

impl SweepSpec {
    /// The configuration of the reference study for `id`.
    pub fn default_for(id: ExperimentId, output_dir: impl Into<PathBuf>) -> Self {
        let grid = match id {
            ExperimentId::Table1 => SweepGrid::Table1 { lambda: 1.0, heights: vec![1.5, 4.0], count: 3 },
            ExperimentId::Fig2Gp => SweepGrid::GpProfile { lambdas: vec![1.0], height: 4.0, z_points: 201 },
            ExperimentId::Fig3Pd => SweepGrid::Densities { lambda: 1.0, heights: vec![1.5, 4.0], count: 3, z_points: 2001 },
            ExperimentId::Fig4aLevelsVsLambda => SweepGrid::LevelsVsLambda {
                lambdas: LinSpace::new(0.3, 2.0, 35),
                heights: vec![2.5, 4.0],
                count: 3,
            },
            ExperimentId::Fig4bGroundVsHeight => SweepGrid::GroundVsHeight {
                lambdas: vec![0.3, 0.8, 1.5, 2.0],
                heights: LinSpace::new(1.0, 6.0, 51),
            },
            ExperimentId::Fig5Gaas => SweepGrid::Gaas {
                rho_nm: 10.0,
                mass_ratio: crate::units::GAAS_MASS_RATIO,
                lambdas: LinSpace::new(0.1, 2.0, 40),
                heights: LinSpace::new(0.5, 2.0, 40),
                contour_levels: vec![0.05, 0.01],
            },
            ExperimentId::Fig6TVsE => SweepGrid::TransmissionVsEnergy {
                r1_nm: vec![40.0, 20.0, 10.0],
                r2_nm: 2.0,
                half_length_nm: 10.0,
                transition_nm: 2.0,
                energies_mev: LinSpace::new(0.1, 50.0, 500),
                grid_points: crate::transport::DEFAULT_GRID_POINTS,
            },
            ExperimentId::Fig7TVsEEps => SweepGrid::TransmissionVsEnergyEps {
                r1_nm: 30.0,
                r2_nm: 3.0,
                half_length_nm: 10.0,
                transitions_nm: vec![2.0, 1.0, 0.5],
                energies_mev: LinSpace::new(0.1, 50.0, 500),
                grid_points: crate::transport::DEFAULT_GRID_POINTS,
            },
            ExperimentId::Fig8TVsR1 => SweepGrid::TransmissionVsR1 {
                r1_nm: LinSpace::new(2.2, 40.0, 400),
                r2_nm: 2.0,
                half_lengths_nm: vec![5.0, 10.0, 20.0],
                transition_nm: 2.0,
                energy_l_mev: 10.0,
                grid_points: crate::transport::DEFAULT_GRID_POINTS,
            },
        };
        SweepSpec { experiment_id: id, grid, output_dir: output_dir.into() }
    }

    /// Checks that the grid matches the id and is non-empty and physical.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidSpec(format!("{}: {m}", self.experiment_id)));
        let positive = |v: &[f64]| !v.is_empty() && v.iter().all(|x| x.is_finite() && *x > 0.0);
        let space_ok = |s: &LinSpace| s.points >= 1 && positive(&[s.start, s.end]);
        let expected = match &self.grid {
            SweepGrid::Table1 { .. } => ExperimentId::Table1,
            SweepGrid::GpProfile { .. } => ExperimentId::Fig2Gp,
            SweepGrid::Densities { .. } => ExperimentId::Fig3Pd,
            SweepGrid::LevelsVsLambda { .. } => ExperimentId::Fig4aLevelsVsLambda,
            SweepGrid::GroundVsHeight { .. } => ExperimentId::Fig4bGroundVsHeight,
            SweepGrid::Gaas { .. } => ExperimentId::Fig5Gaas,
            SweepGrid::TransmissionVsEnergy { .. } => ExperimentId::Fig6TVsE,
            SweepGrid::TransmissionVsEnergyEps { .. } => ExperimentId::Fig7TVsEEps,
            SweepGrid::TransmissionVsR1 { .. } => ExperimentId::Fig8TVsR1,
        };
        if expected != self.experiment_id {
            return bad(&format!("grid kind belongs to {expected}"));
        }
        let ok = match &self.grid {
            SweepGrid::Table1 { lambda, heights, count } => positive(&[*lambda]) && positive(heights) && *count >= 1,
            SweepGrid::GpProfile { lambdas, height, z_points } => positive(lambdas) && positive(&[*height]) && *z_points >= 2,
            SweepGrid::Densities { lambda, heights, count, z_points } => {
                positive(&[*lambda]) && positive(heights) && *count >= 1 && *z_points >= 2
            }
            SweepGrid::LevelsVsLambda { lambdas, heights, count } => space_ok(lambdas) && positive(heights) && *count >= 1,
            SweepGrid::GroundVsHeight { lambdas, heights } => positive(lambdas) && space_ok(heights),
            SweepGrid::Gaas { rho_nm, mass_ratio, lambdas, heights, contour_levels } => {
                positive(&[*rho_nm, *mass_ratio])
                    && space_ok(lambdas)
                    && space_ok(heights)
                    && contour_levels.iter().all(|l| l.is_finite())
            }
            SweepGrid::TransmissionVsEnergy { r1_nm, r2_nm, half_length_nm, transition_nm, energies_mev, .. } => {
                positive(r1_nm) && positive(&[*r2_nm, *half_length_nm, *transition_nm]) && space_ok(energies_mev)
            }
            SweepGrid::TransmissionVsEnergyEps { r1_nm, r2_nm, half_length_nm, transitions_nm, energies_mev, .. } => {
                positive(&[*r1_nm, *r2_nm, *half_length_nm]) && positive(transitions_nm) && space_ok(energies_mev)
            }
            SweepGrid::TransmissionVsR1 { r1_nm, r2_nm, half_lengths_nm, transition_nm, energy_l_mev, .. } => {
                space_ok(r1_nm) && positive(&[*r2_nm, *transition_nm, *energy_l_mev]) && positive(half_lengths_nm)
            }
        };
        if ok {
            Ok(())
        } else {
            bad("grids must be non-empty with positive, finite parameters")
        }
    }

    /// SHA-256 of the serialized spec (hex).
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `<id>_<first 12 hex digits of the hash>`
    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.experiment_id, &self.content_hash()[..12])
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnchorStatus {
    Pass,
    Fail,
}

/// One embedded expectation and how the data fared against it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnchorOutcome {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub status: AnchorStatus,
}

impl AnchorOutcome {
    pub fn new(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, passed: bool) -> Self {
        AnchorOutcome {
            name: name.into(),
            expected: expected.into(),
            observed: observed.into(),
            status: if passed { AnchorStatus::Pass } else { AnchorStatus::Fail },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == AnchorStatus::Pass
    }
}

/// A grid point whose solve failed; its row carries NaN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFailure {
    pub table: String,
    pub row: usize,
    pub message: String,
}

/// Column name with its unit (`"1"` for dimensionless).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Column { name: name.into(), unit: unit.into() }
    }
}

/// A rectangular result table.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    /// Empty for the main table, otherwise appended to the file stem.
    pub suffix: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    /// Values of column `name`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// In-memory result of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentData {
    pub tables: Vec<Table>,
    pub anchors: Vec<AnchorOutcome>,
    pub failures: Vec<PointFailure>,
    /// Solver settings recorded in the metadata header.
    pub solver: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment_id: ExperimentId,
    pub spec_sha256: String,
    pub files: Vec<PathBuf>,
    pub rows: usize,
    pub anchors: Vec<AnchorOutcome>,
    pub failures: Vec<PointFailure>,
}

impl ExperimentSummary {
    /// All anchors pass and no point failed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.anchors.iter().all(AnchorOutcome::passed)
    }
}

/// Runs the sweep, writes `<stem>.csv` (plus any auxiliary tables and a
/// `<stem>.summary.json`) into `spec.output_dir`, and returns the summary.
/// Point failures are recorded, not fatal.
pub fn run_experiment(spec: &SweepSpec) -> Result<ExperimentSummary, ExperimentError> {
    spec.validate()?;
    let data = compute(spec)?;
    let dir = &spec.output_dir;
    fs::create_dir_all(dir).map_err(|source| ExperimentError::Io { path: dir.clone(), source })?;
    let stem = spec.file_stem();
    let mut files = Vec::new();
    for table in &data.tables {
        let name = if table.suffix.is_empty() {
            format!("{stem}.csv")
        } else {
            format!("{stem}_{}.csv", table.suffix)
        };
        let path = dir.join(name);
        write_table(&path, spec, &data, table)?;
        files.push(path);
    }
    let summary = ExperimentSummary {
        experiment_id: spec.experiment_id,
        spec_sha256: spec.content_hash(),
        files: files.clone(),
        rows: data.tables.iter().map(|t| t.rows.len()).sum(),
        anchors: data.anchors,
        failures: data.failures,
    };
    let path = dir.join(format!("{stem}.summary.json"));
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(&path, json + "\n").map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
    Ok(summary)
}

fn write_table(path: &Path, spec: &SweepSpec, data: &ExperimentData, table: &Table) -> Result<(), ExperimentError> {
    let io = |source| ExperimentError::Io { path: path.to_path_buf(), source };
    let mut out = Vec::new();
    let spec_json = serde_json::to_string(spec).expect("spec serializes");
    writeln!(out, "# experiment: {}", spec.experiment_id).map_err(io)?;
    writeln!(out, "# code: revsurf {}", env!("CARGO_PKG_VERSION")).map_err(io)?;
    writeln!(out, "# spec_sha256: {}", spec.content_hash()).map_err(io)?;
    writeln!(out, "# spec: {spec_json}").map_err(io)?;
    writeln!(out, "# units: lengths nm, energies meV; dimensionless studies use rho = 1").map_err(io)?;
    for (k, v) in &data.solver {
        writeln!(out, "# solver.{k}: {v}").map_err(io)?;
    }
    for a in &data.anchors {
        let status = if a.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "# anchor: {status} {} | expected {} | observed {}", a.name, a.expected, a.observed).map_err(io)?;
    }
    let failed = data.failures.iter().filter(|f| f.table == table.suffix).count();
    writeln!(out, "# failed_points: {failed}").map_err(io)?;

    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)))
        .map_err(|e| io(e.into()))?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format_value(*v))).map_err(|e| io(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| io(e.into_error()))?;
    fs::write(path, bytes).map_err(io)
}

fn format_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v == v.trunc() && v.abs() < 1e9 {
        format!("{v:.0}")
    } else {
        format!("{v:.10e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!("fig9".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn default_specs_validate_and_hash_stably() {
        for id in ExperimentId::ALL {
            let a = SweepSpec::default_for(id, "/tmp/a");
            let b = SweepSpec::default_for(id, "/tmp/b");
            a.validate().unwrap();
            assert_eq!(a.content_hash(), b.content_hash());
            assert!(a.file_stem().starts_with(id.as_str()));
        }
    }

    #[test]
    fn mismatched_or_empty_grid_is_rejected() {
        let mut s = SweepSpec::default_for(ExperimentId::Table1, "/tmp");
        s.experiment_id = ExperimentId::Fig2Gp;
        assert!(s.validate().is_err());
        let mut s = SweepSpec::default_for(ExperimentId::Table1, "/tmp");
        s.grid = SweepGrid::Table1 { lambda: 1.0, heights: vec![], count: 3 };
        assert!(s.validate().is_err());
    }

    #[test]
    fn values_format_compactly() {
        assert_eq!(format_value(3.0), "3");
        assert_eq!(format_value(f64::NAN), "NaN");
        assert_eq!(format_value(0.5), "5.0000000000e-1");
    }
}
