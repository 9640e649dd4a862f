//! The acceptance suite: each check targets one reference value or
//! property and reports a named pass/fail outcome. Solver errors become
//! failures with the error text as diagnostic, never panics.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::axial::{
    eigenfunction, fd_spectrum_oracle, find_eigenvalues, uniform_grid, ConeGeometry,
    DEFAULT_GRID_POINTS,
};
use crate::experiments::analysis::{linspace, local_maxima, strictly_decreasing};
use crate::experiments::runs::{fig6_anchors, fig7_anchors, fig8_anchors, gaas_point};
use crate::experiments::{compute, AnchorOutcome, ExperimentId, SweepGrid, SweepSpec};
use crate::geometry::JunctionGeometry;
use crate::transport::{solve_scattering, solve_scattering_at, total_energy, Injection, ScatterConfig, DEFAULT_GRID_POINTS as TRANSPORT_GRID};
use crate::units::{codata, KineticScale, GAAS_MASS_RATIO, HBAR2_OVER_2ME};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    TableOne,
    OracleEquivalence,
    CylinderLimit,
    PdShape,
    MonotoneTrends,
    GaasRatio,
    GaasEnergyScale,
    Unitarity,
    TrivialJunction,
    Reciprocity,
    Fig6Property,
    Fig7Property,
    Fig8Property,
    Convergence,
}

impl CheckId {
    pub const ALL: [CheckId; 14] = [
        CheckId::TableOne,
        CheckId::OracleEquivalence,
        CheckId::CylinderLimit,
        CheckId::PdShape,
        CheckId::MonotoneTrends,
        CheckId::GaasRatio,
        CheckId::GaasEnergyScale,
        CheckId::Unitarity,
        CheckId::TrivialJunction,
        CheckId::Reciprocity,
        CheckId::Fig6Property,
        CheckId::Fig7Property,
        CheckId::Fig8Property,
        CheckId::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::TableOne => "table_one",
            CheckId::OracleEquivalence => "oracle_equivalence",
            CheckId::CylinderLimit => "cylinder_limit",
            CheckId::PdShape => "pd_shape",
            CheckId::MonotoneTrends => "monotone_trends",
            CheckId::GaasRatio => "gaas_ratio",
            CheckId::GaasEnergyScale => "gaas_energy_scale",
            CheckId::Unitarity => "unitarity",
            CheckId::TrivialJunction => "trivial_junction",
            CheckId::Reciprocity => "reciprocity",
            CheckId::Fig6Property => "fig6_property",
            CheckId::Fig7Property => "fig7_property",
            CheckId::Fig8Property => "fig8_property",
            CheckId::Convergence => "convergence",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CheckId::TableOne => "reference cone eigenvalues within 1e-3 relative, under 5 s",
            CheckId::OracleEquivalence => "shooting vs finite differences within 1e-4 on a 5x5 grid, under 2 min",
            CheckId::CylinderLimit => "lambda = 1e-6 matches the cylinder closed form within 1e-3",
            CheckId::PdShape => "ground density at lambda = 1, z_max = 1.5 has one peak below z_max/2",
            CheckId::MonotoneTrends => "levels fall with lambda; ground level falls with height",
            CheckId::GaasRatio => "GaAs |<U>|/omega_0 = 0.10 +/- 0.03 at (0.1, 2.0), decreasing in lambda",
            CheckId::GaasEnergyScale => "GaAs omega_0 and <U> in meV agree with CODATA constants to 1e-4",
            CheckId::Unitarity => "|R + T - 1| < 1e-6 for 100 random junctions",
            CheckId::TrivialJunction => "R1 = R2 transmits with T = 1 within 1e-8",
            CheckId::Reciprocity => "left vs right injection T within 1e-6 for 20 random junctions",
            CheckId::Fig6Property => "T(E_l) amplitude and off-resonance ordering in R1",
            CheckId::Fig7Property => "T(E_l) amplitude grows as eps shrinks, peaks shift < one spacing",
            CheckId::Fig8Property => "T(R1) oscillation grows with R1 and flattens for larger a",
            CheckId::Convergence => "T changes < 1e-4 under grid doubling, observed order about 2",
        }
    }

    /// Whether the check is one of the primary acceptance criteria (the
    /// energy-scale check is supplementary).
    pub fn is_primary(self) -> bool {
        self != CheckId::GaasEnergyScale
    }
}

impl std::str::FromStr for CheckId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        CheckId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| format!("unknown check '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// ħ²/(2 m_e) in meV·nm² used for physical-unit results.
    pub hbar2_over_2me: f64,
    /// Interior grid points for transport solves.
    pub transport_grid_points: usize,
    /// Seed for the random junction draws.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { hbar2_over_2me: HBAR2_OVER_2ME, transport_grid_points: TRANSPORT_GRID, seed: 20_140_101 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub id: CheckId,
    pub name: String,
    pub primary: bool,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {:<20} {:>7.2}s  {}", self.name, self.elapsed_s, self.detail)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Runs every check in order.
pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    VerifyReport { options: opts.clone(), checks: CheckId::ALL.iter().map(|&id| run_check(id, opts)).collect() }
}

pub fn run_check(id: CheckId, opts: &VerifyOptions) -> CheckOutcome {
    let start = Instant::now();
    let result = match id {
        CheckId::TableOne => table_one(),
        CheckId::OracleEquivalence => oracle_equivalence(),
        CheckId::CylinderLimit => cylinder_limit(),
        CheckId::PdShape => pd_shape(),
        CheckId::MonotoneTrends => monotone_trends(),
        CheckId::GaasRatio => gaas_ratio(opts),
        CheckId::GaasEnergyScale => gaas_energy_scale(opts),
        CheckId::Unitarity => unitarity(opts),
        CheckId::TrivialJunction => trivial_junction(opts),
        CheckId::Reciprocity => reciprocity(opts),
        CheckId::Fig6Property => transport_figure(ExperimentId::Fig6TVsE, opts),
        CheckId::Fig7Property => transport_figure(ExperimentId::Fig7TVsEEps, opts),
        CheckId::Fig8Property => transport_figure(ExperimentId::Fig8TVsR1, opts),
        CheckId::Convergence => convergence(opts),
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    let budget = match id {
        CheckId::TableOne => Some(5.0),
        CheckId::OracleEquivalence => Some(120.0),
        _ => None,
    };
    if let Some(b) = budget {
        if elapsed_s >= b {
            passed = false;
            detail = format!("{detail}; over the {b} s budget");
        }
    }
    CheckOutcome { id, name: id.name().to_string(), primary: id.is_primary(), passed, detail, elapsed_s }
}

type CheckResult = Result<(bool, String), String>;

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn cone(rho: f64, lambda: f64, z_max: f64) -> Result<ConeGeometry<f64>, String> {
    ConeGeometry::new(rho, lambda, z_max).map_err(err)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn table_one() -> CheckResult {
    let mut worst = 0.0f64;
    let mut found = Vec::new();
    for (h, want) in [(1.5, [1.451, 2.946, 4.432]), (4.0, [0.5233, 1.091, 1.652])] {
        let c = find_eigenvalues(&cone(1.0, 1.0, h)?, 0, 3).map_err(err)?;
        for (a, b) in c.iter().zip(want) {
            worst = worst.max(rel(*a, b));
        }
        found.push(format!("z_max={h}: [{:.5}, {:.5}, {:.5}]", c[0], c[1], c[2]));
    }
    Ok((worst < 1e-3, format!("{}; worst relative error {worst:.2e}", found.join(" "))))
}

fn oracle_equivalence() -> CheckResult {
    let points: Vec<(f64, f64)> = linspace(0.3, 2.0, 5)
        .into_iter()
        .flat_map(|l| linspace(1.5, 4.0, 5).into_iter().map(move |h| (l, h)))
        .collect();
    let worst: Vec<Result<f64, String>> = points
        .par_iter()
        .map(|&(l, h)| {
            let k = cone(1.0, l, h)?;
            let s = find_eigenvalues(&k, 0, 3).map_err(err)?;
            let f = fd_spectrum_oracle(&k, 0, 4000, 3).map_err(err)?;
            Ok(s.iter().zip(&f).map(|(a, b)| rel(*b, *a)).fold(0.0, f64::max))
        })
        .collect();
    let mut max = 0.0f64;
    for w in worst {
        max = max.max(w?);
    }
    Ok((max < 1e-4, format!("25 cones, 3 modes, 4000 FD points; worst relative gap {max:.2e}")))
}

fn cylinder_limit() -> CheckResult {
    let (rho, h) = (1.0, 1.5);
    let mut worst = 0.0f64;
    for eta in [0i64, 1] {
        let c = find_eigenvalues(&cone(rho, 1e-6, h)?, eta, 3).map_err(err)?;
        for (i, v) in c.iter().enumerate() {
            let x = (i + 1) as f64 * std::f64::consts::PI * rho / h;
            worst = worst.max(rel(*v, (x * x - 0.25 + (eta * eta) as f64).sqrt()));
        }
    }
    Ok((worst < 1e-3, format!("eta in {{0, 1}}, n = 1..3; worst relative error {worst:.2e}")))
}

fn pd_shape() -> CheckResult {
    let k = cone(1.0, 1.0, 1.5)?;
    let c = find_eigenvalues(&k, 0, 1).map_err(err)?[0];
    let mode = eigenfunction(&k, 0, c, &uniform_grid(1.5, DEFAULT_GRID_POINTS)).map_err(err)?;
    let peaks = local_maxima(&mode.probability_density());
    let z = peaks.first().map(|&i| mode.z_grid[i]).unwrap_or(f64::NAN);
    Ok((peaks.len() == 1 && z < 0.75, format!("{} peak(s), first at z = {z:.4} (z_max/2 = 0.75)", peaks.len())))
}

fn anchors_verdict(anchors: &[AnchorOutcome]) -> (bool, String) {
    let failed: Vec<&AnchorOutcome> = anchors.iter().filter(|a| !a.passed()).collect();
    if failed.is_empty() {
        let summary: Vec<String> = anchors.iter().map(|a| format!("{}={}", a.name, a.observed)).collect();
        (true, summary.join("; "))
    } else {
        let summary: Vec<String> =
            failed.iter().map(|a| format!("{}: expected {}, observed {}", a.name, a.expected, a.observed)).collect();
        (false, summary.join("; "))
    }
}

fn monotone_trends() -> CheckResult {
    let mut a = SweepSpec::default_for(ExperimentId::Fig4aLevelsVsLambda, "");
    // the criterion's sampling: 0.1 steps over [0.3, 2.0]
    if let SweepGrid::LevelsVsLambda { lambdas, .. } = &mut a.grid {
        lambdas.points = 18;
    }
    let da = compute(&a).map_err(err)?;
    let db = compute(&SweepSpec::default_for(ExperimentId::Fig4bGroundVsHeight, "")).map_err(err)?;
    let failures = da.failures.len() + db.failures.len();
    let anchors: Vec<AnchorOutcome> = da.anchors.into_iter().chain(db.anchors).collect();
    let falling: Vec<AnchorOutcome> = anchors.into_iter().filter(|x| !x.name.starts_with("gaps")).collect();
    let (ok, detail) = anchors_verdict(&falling);
    let names: Vec<&str> = falling.iter().map(|a| a.name.as_str()).collect();
    Ok((ok && failures == 0, if ok { format!("{} trends strictly monotone", names.len()) } else { detail }))
}

fn gaas_ratio(opts: &VerifyOptions) -> CheckResult {
    let scale = KineticScale::from_mass_ratio_with(GAAS_MASS_RATIO, opts.hbar2_over_2me);
    let lambdas = linspace(0.1, 2.0, 40);
    let mut ratios = Vec::with_capacity(lambdas.len());
    for &l in &lambdas {
        let (_, omega, u) = gaas_point(10.0, l, 2.0, scale)?;
        ratios.push(u.abs() / omega);
    }
    let r = ratios[0];
    let ok = (r - 0.10).abs() <= 0.03 && strictly_decreasing(&ratios);
    Ok((
        ok,
        format!(
            "ratio {r:.4} at (0.1, 2.0); {} along z_max/rho = 2 (last {:.4} at lambda = 2)",
            if strictly_decreasing(&ratios) { "decreasing" } else { "NOT decreasing" },
            ratios[ratios.len() - 1]
        ),
    ))
}

fn gaas_energy_scale(opts: &VerifyOptions) -> CheckResult {
    let scale = KineticScale::from_mass_ratio_with(GAAS_MASS_RATIO, opts.hbar2_over_2me);
    let rho = 10.0;
    let (c2, omega, u) = gaas_point(rho, 0.1, 2.0, scale)?;
    // the same quantities from the SI constants
    let reference = KineticScale::from_mass_ratio_with(GAAS_MASS_RATIO, codata::hbar2_over_2me());
    let omega_ref = reference.value() * c2 / (rho * rho);
    let (_, _, u_ref) = gaas_point(rho, 0.1, 2.0, reference)?;
    let worst = rel(omega, omega_ref).max(rel(u, u_ref));
    Ok((
        worst < 1e-4,
        format!("omega_0 = {omega:.5} meV (CODATA {omega_ref:.5}), <U> = {u:.5} meV (CODATA {u_ref:.5}); relative gap {worst:.1e}"),
    ))
}

/// Random junction in the acceptance ranges and an injection energy.
fn random_junction(rng: &mut ChaCha8Rng) -> Result<(JunctionGeometry<f64>, f64), String> {
    let r2 = rng.gen_range(1.0..5.0);
    let ratio = rng.gen_range(2.0..20.0);
    let a = rng.gen_range(5.0..20.0);
    let eps = a * rng.gen_range(0.2..0.8);
    let e = rng.gen_range(0.5..50.0);
    Ok((JunctionGeometry::new(ratio * r2, r2, a, eps).map_err(err)?, e))
}

fn unitarity(opts: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draws: Vec<_> = (0..100).map(|_| random_junction(&mut rng)).collect::<Result<_, _>>()?;
    let gaps: Vec<Result<f64, String>> = draws
        .par_iter()
        .map(|(j, e)| {
            let s = solve_scattering(j, &ScatterConfig::new(*e).with_grid_points(opts.transport_grid_points)).map_err(err)?;
            Ok((s.reflection + s.transmission - 1.0).abs())
        })
        .collect();
    let mut worst = 0.0f64;
    for g in gaps {
        worst = worst.max(g?);
    }
    Ok((worst < 1e-6, format!("100 draws at {} points; max |R + T - 1| = {worst:.2e}", opts.transport_grid_points)))
}

fn trivial_junction(opts: &VerifyOptions) -> CheckResult {
    let mut worst = 0.0f64;
    for r in [1.0, 2.0, 10.0, 40.0] {
        let j = JunctionGeometry::new(r, r, 10.0, 2.0).map_err(err)?;
        for e in linspace(0.1, 50.0, 25) {
            let s = solve_scattering(&j, &ScatterConfig::new(e).with_grid_points(opts.transport_grid_points)).map_err(err)?;
            worst = worst.max((s.transmission - 1.0).abs());
        }
    }
    Ok((worst < 1e-8, format!("4 radii x 25 energies; max |T - 1| = {worst:.2e}")))
}

fn reciprocity(opts: &VerifyOptions) -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (j, e) = random_junction(&mut rng)?;
        let cfg = ScatterConfig::new(e).with_grid_points(opts.transport_grid_points);
        let total = total_energy(&cfg, &j);
        let l = solve_scattering_at(&j, total, &cfg, Injection::Left).map_err(err)?;
        let r = solve_scattering_at(&j, total, &cfg, Injection::Right).map_err(err)?;
        worst = worst.max((l.transmission - r.transmission).abs());
    }
    Ok((worst < 1e-6, format!("20 draws; max |T_left - T_right| = {worst:.2e}")))
}

fn transport_figure(id: ExperimentId, opts: &VerifyOptions) -> CheckResult {
    let mut spec = SweepSpec::default_for(id, "");
    match &mut spec.grid {
        SweepGrid::TransmissionVsEnergy { grid_points, .. }
        | SweepGrid::TransmissionVsEnergyEps { grid_points, .. }
        | SweepGrid::TransmissionVsR1 { grid_points, .. } => *grid_points = opts.transport_grid_points,
        _ => unreachable!("transport experiment"),
    }
    let data = compute(&spec).map_err(err)?;
    if let Some(f) = data.failures.first() {
        return Ok((false, format!("{} failed points, first: {}", data.failures.len(), f.message)));
    }
    let table = &data.tables[0];
    let mut anchors = match id {
        ExperimentId::Fig6TVsE => fig6_anchors(table),
        ExperimentId::Fig7TVsEEps => fig7_anchors(table),
        _ => fig8_anchors(table),
    };
    // the resonance count is a property of the reproduction window, not of
    // the criterion
    anchors.retain(|a| a.name != "resonances_in_window" && a.name != "resonances_shift_down");
    Ok(anchors_verdict(&anchors))
}

fn convergence(opts: &VerifyOptions) -> CheckResult {
    let j = JunctionGeometry::new(40.0, 2.0, 10.0, 2.0).map_err(err)?;
    let n = opts.transport_grid_points;
    // node counts n+1 double exactly: (n+1)/2, n+1, 2(n+1)
    let t = |nodes: usize| -> Result<f64, String> {
        if nodes < 2 {
            return Err(format!("grid of {nodes} cells is too coarse"));
        }
        Ok(solve_scattering(&j, &ScatterConfig::new(10.0).with_grid_points(nodes - 1)).map_err(err)?.transmission)
    };
    let cells = n + 1;
    let coarse = t(cells / 2).map_err(|e| format!("at {} points: {e}", cells / 2 - 1))?;
    let mid = t(cells).map_err(|e| format!("at {n} points: {e}"))?;
    let fine = t(2 * cells)?;
    let change = (mid - fine).abs();
    let order = ((coarse - mid) / (mid - fine)).abs().log2();
    let ok = change < 1e-4 && (order - 2.0).abs() < 0.5;
    Ok((ok, format!("T = {mid:.8} at {n} points, |dT| = {change:.2e} vs {} points, observed order {order:.2}", 2 * cells - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_names_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.name().parse::<CheckId>().unwrap(), id);
        }
        assert_eq!(CheckId::ALL.iter().filter(|c| c.is_primary()).count(), 13);
    }

    #[test]
    fn coarse_transport_grid_fails_convergence_with_diagnostic() {
        let opts = VerifyOptions { transport_grid_points: 50, ..Default::default() };
        let out = run_check(CheckId::Convergence, &opts);
        assert!(!out.passed);
        assert!(out.detail.contains("below the minimum"), "{}", out.detail);
    }

    #[test]
    fn tampered_constant_breaks_only_the_energy_scale() {
        let opts = VerifyOptions { hbar2_over_2me: HBAR2_OVER_2ME * 1.01, ..Default::default() };
        assert!(run_check(CheckId::TableOne, &opts).passed);
        assert!(run_check(CheckId::GaasRatio, &opts).passed);
        assert!(!run_check(CheckId::GaasEnergyScale, &opts).passed);
        assert!(run_check(CheckId::GaasEnergyScale, &VerifyOptions::default()).passed);
    }
}
