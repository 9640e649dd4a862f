//! Command-line front end: configuration handling and the five subcommands.
//!
//! Exit codes are a stable contract: `0` success, `1` a failed check, anchor
//! or solve, `2` a usage error (bad key, bad value, invalid geometry).

pub mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use revsurf::axial::{self, ConeGeometry};
use revsurf::experiments::{self, ExperimentId, SweepGrid, SweepSpec};
use revsurf::geometry::{self, Generatrix, JunctionGeometry};
use revsurf::transport::{self, LeadChannel, ScatterConfig, TransportError};
use revsurf::units::{GAAS_MASS_RATIO, HBAR2_OVER_2ME, JUNCTION_MASS_RATIO};
use revsurf::verify::{self, CheckId, VerifyOptions};
use revsurf::KineticScale;
use thiserror::Error;

pub use config::{parse_config, resolve_workers, ConfigError, Flags, RunConfig, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Output directory used by `experiment` and `verify` when none is given.
pub const DEFAULT_OUT_DIR: &str = "results";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn failure(msg: impl ToString) -> CliError {
    CliError::Failure(msg.to_string())
}

/// Runs the configured subcommand, writing human-readable output to `out`.
/// `Ok(false)` means the run completed but a check or anchor failed.
pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    match cfg.command {
        Subcommand::Geometry => geometry_cmd(cfg, out).map(|_| true),
        Subcommand::BoundStates => bound_states_cmd(cfg, out).map(|_| true),
        Subcommand::Transport => transport_cmd(cfg, out).map(|_| true),
        Subcommand::Experiment => experiment_cmd(cfg, out),
        Subcommand::Verify => verify_cmd(cfg, out),
    }
}

/// Sizes the global rayon pool; `0` keeps one thread per core.
pub fn init_workers(workers: Option<usize>) {
    if let Some(n) = workers {
        // a second initialization (e.g. in tests) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Help text listing the keys of a subcommand.
pub fn keys_help(cmd: Subcommand) -> String {
    let mut s = String::from("Keys (key=value, case-insensitive):\n");
    for k in config::keys_for(cmd) {
        s.push_str(&format!("  {:<16} {}\n", k.name, k.help));
    }
    s
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    failure(format!("{}: {e}", path.display()))
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| failure(format!("writing output: {e}")))
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{:.0}", v + 0.0)
    } else {
        format!("{v:.10e}")
    }
}

/// A CSV table preceded by `#` comment lines.
struct CsvText {
    text: String,
    rows: usize,
}

impl CsvText {
    fn new(comments: &[String], columns: &[String]) -> Self {
        let mut text = String::new();
        for c in comments {
            text.push_str("# ");
            text.push_str(c);
            text.push('\n');
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        CsvText { text, rows: 0 }
    }

    fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| num(*v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
        self.rows += 1;
    }
}

/// Writes `table` to `<out>/<name>.csv` when an output directory is set,
/// otherwise to `out`.
fn emit(cfg: &RunConfig, out: &mut dyn Write, name: &str, table: &CsvText) -> Result<(), CliError> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
            let path = dir.join(format!("{name}.csv"));
            fs::write(&path, &table.text).map_err(|e| io_err(&path, e))?;
            write_out(out, &format!("wrote {} ({} rows)\n", path.display(), table.rows))
        }
        None => write_out(out, &table.text),
    }
}

fn reject_dimensionless(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.dimensionless {
        return Err(usage(format!("{} works in nm and meV only; --dimensionless is not supported", cfg.command.name())));
    }
    Ok(())
}

// ---------------------------------------------------------------- geometry

fn shape_keys(shape: &str) -> Option<&'static [&'static str]> {
    match shape {
        "cone" => Some(&["rho", "lambda"]),
        "cylinder" => Some(&["radius"]),
        "junction" => Some(&["r1", "r2", "a", "eps"]),
        _ => None,
    }
}

fn geometry_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let shape = cfg.require_text("shape")?.to_ascii_lowercase();
    let own = shape_keys(&shape)
        .ok_or_else(|| usage(format!("{}: unknown shape '{shape}' (cone, cylinder, junction)", cfg.origin("shape"))))?;
    for other in ["rho", "lambda", "radius", "r1", "r2", "a", "eps"] {
        if cfg.has(other) && !own.contains(&other) {
            return Err(usage(format!("{}: key '{other}' does not apply to shape {shape}", cfg.origin(other))));
        }
    }
    let geo_err = |e: geometry::GeometryError| usage(format!("invalid {shape}: {e}"));
    let (gen, default_range, default_mass) = match shape.as_str() {
        "cone" => {
            let g = Generatrix::cone(cfg.require_number("rho")?, cfg.require_number("lambda")?).map_err(geo_err)?;
            (g, None, GAAS_MASS_RATIO)
        }
        "cylinder" => (Generatrix::cylinder(cfg.require_number("radius")?).map_err(geo_err)?, None, GAAS_MASS_RATIO),
        _ => {
            let j = junction_from(cfg)?;
            let a = j.half_length();
            (Generatrix::Junction(j), Some((-1.2 * a, 1.2 * a)), JUNCTION_MASS_RATIO)
        }
    };

    let zs: Vec<f64> = if let Some(z) = cfg.number("z") {
        for k in ["zmin", "zmax", "points"] {
            if cfg.has(k) {
                return Err(usage(format!("{}: '{k}' conflicts with a single z", cfg.origin(k))));
            }
        }
        vec![z]
    } else {
        let (lo, hi) = match (cfg.number("zmin"), cfg.number("zmax"), default_range) {
            (Some(lo), Some(hi), _) => (lo, hi),
            (lo, hi, Some((dlo, dhi))) => (lo.unwrap_or(dlo), hi.unwrap_or(dhi)),
            (lo, None, None) => (lo.unwrap_or(0.0), cfg.require_number("zmax")?),
            (None, Some(hi), None) => (0.0, hi),
        };
        if !(hi > lo) {
            return Err(usage(format!("zmax ({hi}) must exceed zmin ({lo})")));
        }
        let points = cfg.count("points").unwrap_or(101);
        if points < 2 {
            return Err(usage(format!("{}: points must be at least 2", cfg.origin("points"))));
        }
        experiments::analysis::linspace(lo, hi, points)
    };

    let (scale, len, energy) = if cfg.dimensionless {
        if cfg.has("mass") {
            return Err(usage(format!("{}: mass has no effect with --dimensionless", cfg.origin("mass"))));
        }
        (KineticScale::dimensionless(), "L", "hbar^2/(2m L^2)".to_string())
    } else {
        (KineticScale::from_mass_ratio(cfg.number_or("mass", default_mass)), "nm", "meV".to_string())
    };
    let columns: Vec<String> = [
        ("z", len.to_string()),
        ("f", len.to_string()),
        ("f_z", "1".into()),
        ("f_zz", format!("1/{len}")),
        ("g_thetatheta", format!("{len}^2")),
        ("g_zz", "1".into()),
        ("alpha_11", format!("1/{len}")),
        ("alpha_22", format!("1/{len}")),
        ("mean_curvature", format!("1/{len}")),
        ("gauss_curvature", format!("1/{len}^2")),
        ("U", energy.clone()),
    ]
    .into_iter()
    .map(|(n, u)| format!("{n}[{u}]"))
    .collect();
    let params: Vec<String> =
        own.iter().filter_map(|k| cfg.number(k).map(|v| format!("{k}={v}"))).collect();
    let mut comments =
        vec![format!("revsurf geometry shape={shape} {}", params.join(" ")), format!("units: length {len}, energy {energy}")];
    if !cfg.dimensionless {
        comments.push(format!("mass_ratio={}", scale_mass(cfg, default_mass)));
    }
    let mut table = CsvText::new(&comments, &columns);
    for &z in &zs {
        let p = gen.profile(z).map_err(|e| usage(format!("{shape} at z = {z}: {e}")))?;
        let m = geometry::metric_from_profile(p);
        let k = geometry::curvature_from_profile(p);
        let u = geometry::potential_from_profile(p, scale);
        table.row(&[
            z,
            p.f,
            p.f_z,
            p.f_zz,
            m.g_theta_theta,
            m.g_zz,
            k.alpha_11,
            k.alpha_22,
            k.mean_curvature,
            k.gauss_curvature,
            u,
        ]);
    }
    emit(cfg, out, "geometry", &table)
}

fn scale_mass(cfg: &RunConfig, default: f64) -> f64 {
    cfg.number_or("mass", default)
}

// ------------------------------------------------------------ bound states

fn bound_states_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let rho = if cfg.dimensionless { cfg.number_or("rho", 1.0) } else { cfg.require_number("rho")? };
    let lambda = cfg.require_number("lambda")?;
    let z_max = cfg.require_number("zmax")?;
    let eta = cfg.integer("eta").unwrap_or(0);
    let count = cfg.count("count").unwrap_or(3);
    if count == 0 {
        return Err(usage(format!("{}: count must be at least 1", cfg.origin("count"))));
    }
    if cfg.dimensionless && cfg.has("mass") {
        return Err(usage(format!("{}: mass has no effect with --dimensionless", cfg.origin("mass"))));
    }
    let mass = cfg.number_or("mass", GAAS_MASS_RATIO);
    let cone = ConeGeometry::new(rho, lambda, z_max).map_err(|e| usage(format!("invalid cone: {e}")))?;

    let levels = axial::find_eigenvalues_squared(&cone, eta, count).map_err(failure)?;
    // energies in meV, or in hbar^2/(2m rho^2) when dimensionless
    let (scale, energy_unit, len_unit, len_factor) = if cfg.dimensionless {
        (KineticScale::dimensionless(), "hbar^2/(2m rho^2)", "rho", rho)
    } else {
        (KineticScale::from_mass_ratio(mass), "meV", "nm", 1.0)
    };
    let energy_factor = if cfg.dimensionless { rho * rho } else { 1.0 };

    let points = cfg.count("points").unwrap_or(axial::DEFAULT_GRID_POINTS);
    if points < 2 {
        return Err(usage(format!("{}: points must be at least 2", cfg.origin("points"))));
    }
    let grid = axial::uniform_grid(z_max, points);
    let mut modes = Vec::with_capacity(count);
    let mut comments = vec![
        format!("revsurf bound-states rho={rho} lambda={lambda} zmax={z_max} eta={eta}"),
        format!("units: length {len_unit}, energy {energy_unit}"),
    ];
    if !cfg.dimensionless {
        comments.push(format!("mass_ratio={mass} hbar2_over_2me={HBAR2_OVER_2ME} meV nm^2"));
    }
    let columns: Vec<String> = vec![
        "n[1]".into(),
        "c_squared[1]".into(),
        "c[1]".into(),
        format!("omega[{energy_unit}]"),
        format!("gp_expectation[{energy_unit}]"),
        "gp_ratio[1]".into(),
    ];
    let mut table = CsvText::new(&comments, &columns);
    for (n, &c2) in levels.iter().enumerate() {
        let mode = axial::eigenfunction_squared(&cone, eta, c2, &grid).map_err(failure)?;
        let omega = mode.omega(&cone, scale) * energy_factor;
        let u = axial::gp_expectation(&cone, &mode, scale).map_err(failure)? * energy_factor;
        let c = mode.c_value().unwrap_or(f64::NAN);
        table.row(&[n as f64, c2, c, omega, u, (u / omega).abs()]);
        modes.push(mode);
    }
    emit(cfg, out, "bound_states", &table)?;

    // eigenfunctions only go to files
    if cfg.out.is_some() {
        let mut columns = vec![format!("z[{len_unit}]")];
        columns.extend((0..modes.len()).map(|n| format!("Z_{n}[1/{len_unit}]")));
        let mut wf = CsvText::new(&comments[..2], &columns);
        for (i, &z) in grid.iter().enumerate() {
            let mut row = vec![z / len_factor];
            row.extend(modes.iter().map(|m| m.samples[i] * len_factor));
            wf.row(&row);
        }
        emit(cfg, out, "bound_states_modes", &wf)?;
    }
    Ok(())
}

// --------------------------------------------------------------- transport

fn junction_from(cfg: &RunConfig) -> Result<JunctionGeometry<f64>, CliError> {
    let (r1, r2) = (cfg.require_number("r1")?, cfg.require_number("r2")?);
    let (a, eps) = (cfg.require_number("a")?, cfg.require_number("eps")?);
    JunctionGeometry::new(r1, r2, a, eps).map_err(|e| usage(format!("invalid junction: {e}")))
}

fn scatter_config(cfg: &RunConfig, energy: f64) -> Result<ScatterConfig<f64>, CliError> {
    let mut sc = ScatterConfig::new(energy).with_grid_points(cfg.count("grid").unwrap_or(transport::DEFAULT_GRID_POINTS));
    sc.mass_ratio = cfg.number_or("mass", JUNCTION_MASS_RATIO);
    sc.mode_n = match cfg.count("n") {
        Some(n) => u32::try_from(n).map_err(|_| usage(format!("{}: mode index too large", cfg.origin("n"))))?,
        None => 0,
    };
    sc.geometric_potential = cfg.flag("gp").unwrap_or(true);
    sc.validate().map_err(|e| match e {
        TransportError::GridTooCoarse { .. } => usage(format!("{}: {e}", cfg.origin("grid"))),
        e => usage(e.to_string()),
    })?;
    Ok(sc)
}

fn channel(c: &LeadChannel<f64>) -> String {
    match c {
        LeadChannel::Propagating(k) => format!("{k:.10e} 1/nm (propagating)"),
        LeadChannel::Evanescent(k) => format!("{k:.10e} 1/nm (evanescent)"),
    }
}

fn transport_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    reject_dimensionless(cfg)?;
    let j = junction_from(cfg)?;
    if let Some(energy) = cfg.number("energy") {
        for k in ["emin", "emax", "points"] {
            if cfg.has(k) {
                return Err(usage(format!("{}: '{k}' conflicts with a single energy", cfg.origin(k))));
            }
        }
        let sc = scatter_config(cfg, energy)?;
        let sol = transport::solve_scattering(&j, &sc).map_err(failure)?;
        let text = format!(
            "E_l          {energy} meV\nE_total      {:.10e} meV\nk1           {}\nk2           {}\n\
             r            {:.10e} {:+.10e}i\nt            {:.10e} {:+.10e}i\nT            {:.10e}\nR            {:.10e}\n\
             R+T-1        {:.3e}\n",
            sol.total_energy,
            channel(&sol.k1),
            channel(&sol.k2),
            sol.r.re,
            sol.r.im,
            sol.t.re,
            sol.t.im,
            sol.transmission,
            sol.reflection,
            sol.transmission + sol.reflection - 1.0,
        );
        return write_out(out, &text);
    }

    let (lo, hi) = (cfg.number_or("emin", 0.1), cfg.number_or("emax", 50.0));
    let points = cfg.count("points").unwrap_or(500);
    if points == 0 || (points > 1 && !(hi > lo)) {
        return Err(usage(format!("energy sweep needs points >= 1 and Emax > Emin (got {lo}..{hi}, {points} points)")));
    }
    let energies = experiments::analysis::linspace(lo, hi, points);
    let sc = scatter_config(cfg, lo)?;
    let sweep = transport::transmission_vs_energy(&j, &energies, &sc).map_err(failure)?;
    let comments = vec![
        format!(
            "revsurf transport R1={} R2={} a={} eps={} n={} mass_ratio={} grid_points={} geometric_potential={}",
            j.r1(),
            j.r2(),
            j.half_length(),
            j.transition(),
            sc.mode_n,
            sc.mass_ratio,
            sc.grid_points,
            sc.geometric_potential
        ),
        "units: length nm, energy meV".into(),
    ];
    let columns: Vec<String> = ["E_l[meV]", "E_total[meV]", "T[1]", "R[1]"].iter().map(|s| s.to_string()).collect();
    let mut table = CsvText::new(&comments, &columns);
    for p in &sweep {
        let e_total = transport::total_energy(&sc.with_energy(p.x), &j);
        table.row(&[p.x, e_total, p.transmission, p.reflection]);
    }
    emit(cfg, out, "transport", &table)
}

// -------------------------------------------------------------- experiment

fn out_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn set_grid_points(grid: &mut SweepGrid, n: usize) -> bool {
    match grid {
        SweepGrid::TransmissionVsEnergy { grid_points, .. }
        | SweepGrid::TransmissionVsEnergyEps { grid_points, .. }
        | SweepGrid::TransmissionVsR1 { grid_points, .. } => {
            *grid_points = n;
            true
        }
        _ => false,
    }
}

fn experiment_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    reject_dimensionless(cfg)?;
    let dir = out_dir(cfg);
    let mut specs = match (cfg.text("spec"), cfg.text("id")) {
        (Some(path), id) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {path}: {e}", cfg.origin("spec"))))?;
            let mut spec: SweepSpec =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: {path}: {e}", cfg.origin("spec"))))?;
            if let Some(id) = id {
                if !spec.experiment_id.as_str().eq_ignore_ascii_case(id) {
                    return Err(usage(format!("{path} describes {}, not {id}", spec.experiment_id)));
                }
            }
            spec.output_dir = dir.clone();
            vec![spec]
        }
        (None, Some(id)) if id.eq_ignore_ascii_case("all") => {
            ExperimentId::ALL.iter().map(|&i| SweepSpec::default_for(i, &dir)).collect()
        }
        (None, Some(id)) => {
            let id: ExperimentId = id.parse().map_err(|e| usage(format!("{}: {e}", cfg.origin("id"))))?;
            vec![SweepSpec::default_for(id, &dir)]
        }
        (None, None) => {
            let names: Vec<&str> = ExperimentId::ALL.iter().map(|i| i.as_str()).collect();
            return Err(usage(format!("missing required key 'id' for experiment (one of: all, {})", names.join(", "))));
        }
    };
    if let Some(n) = cfg.count("grid") {
        let mut applied = false;
        for s in &mut specs {
            applied |= set_grid_points(&mut s.grid, n);
        }
        if !applied {
            return Err(usage(format!("{}: grid applies only to transport experiments", cfg.origin("grid"))));
        }
    }

    let mut all_passed = true;
    for spec in &specs {
        let summary = experiments::run_experiment(spec).map_err(|e| match e {
            experiments::ExperimentError::InvalidSpec(m) => usage(m),
            e => failure(e),
        })?;
        let mut text = format!("{} ({} rows)\n", summary.experiment_id, summary.rows);
        for f in &summary.files {
            text.push_str(&format!("  wrote {}\n", f.display()));
        }
        for a in &summary.anchors {
            let status = if a.passed() { "PASS" } else { "FAIL" };
            text.push_str(&format!("  {status} {}: expected {}, observed {}\n", a.name, a.expected, a.observed));
        }
        for f in &summary.failures {
            text.push_str(&format!("  FAILED POINT {} row {}: {}\n", f.table, f.row, f.message));
        }
        write_out(out, &text)?;
        all_passed &= summary.passed();
    }
    Ok(all_passed)
}

// ------------------------------------------------------------------ verify

fn verify_cmd(cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    reject_dimensionless(cfg)?;
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        hbar2_over_2me: cfg.number_or("hbar2_over_2me", defaults.hbar2_over_2me),
        transport_grid_points: cfg.count("grid").unwrap_or(defaults.transport_grid_points),
        seed: cfg.count("seed").map_or(defaults.seed, |s| s as u64),
    };
    let checks: Vec<CheckId> = match cfg.text("only") {
        None => CheckId::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| s.trim().parse::<CheckId>().map_err(|e| usage(format!("{}: {e}", cfg.origin("only")))))
            .collect::<Result<_, _>>()?,
    };
    let mut outcomes = Vec::with_capacity(checks.len());
    for id in checks {
        let outcome = verify::run_check(id, &opts);
        write_out(out, &format!("{outcome}\n"))?;
        outcomes.push(outcome);
    }
    let report = verify::VerifyReport { options: opts, checks: outcomes };
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    let dir = out_dir(cfg);
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let path = dir.join("verify_report.json");
    fs::write(&path, report.to_json()).map_err(|e| io_err(&path, e))?;
    write_out(out, &format!("{} checks, {failed} failed; report in {}\n", report.checks.len(), path.display()))?;
    Ok(report.passed())
}
