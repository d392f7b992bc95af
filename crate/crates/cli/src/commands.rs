use bitdensity::detector::{
    approx_threshold, detection_probability, linear_grid, BscChannel, DetectorParams,
};
use bitdensity::scenarios::{
    plan, run_monte_carlo_multi, DetectorSelection, GaussianScenario, Scenario, TrialReport,
};
use serde::Serialize;

use crate::config::{FileConfig, RocSection};
use crate::table::{Cell, Metadata, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Params,
    Roc,
    SweepC,
    SimMimo,
    SimWsn,
    SimBsc,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Params => "params",
            Command::Roc => "roc",
            Command::SweepC => "sweep-c",
            Command::SimMimo => "sim-mimo",
            Command::SimWsn => "sim-wsn",
            Command::SimBsc => "sim-bsc",
        }
    }
}

/// Settings shared by every simulating command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunSettings {
    pub trials: u64,
    pub paired_baseline: bool,
}

#[derive(Serialize)]
struct Resolved<'a, S: Serialize> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<RunSettings>,
    parameters: &'a S,
}

fn metadata<S: Serialize>(
    cmd: Command,
    seed: u64,
    run: Option<RunSettings>,
    section: &S,
) -> Metadata {
    let resolved = Resolved {
        command: cmd.name(),
        run,
        parameters: section,
    };
    Metadata::new(cmd.name(), seed, &resolved)
}

pub fn execute(
    cmd: Command,
    cfg: &FileConfig,
    seed: u64,
    run: RunSettings,
) -> Result<(Metadata, Table), CliError> {
    match cmd {
        Command::Params => Ok((metadata(cmd, seed, None, &cfg.params), params(cfg)?)),
        Command::SweepC => Ok((metadata(cmd, seed, None, &cfg.sweep_c), sweep_c(cfg)?)),
        Command::Roc => Ok((
            metadata(cmd, seed, Some(run), &cfg.roc),
            roc(&cfg.roc, seed, run)?,
        )),
        Command::SimMimo => {
            let mut points = Vec::new();
            for p in cfg.mimo.points() {
                points.push(GridPoint {
                    key: vec![
                        p.antennas.into(),
                        p.jammer_antennas.into(),
                        p.jammer_power_db.into(),
                    ],
                    scenario: p.scenario()?.into(),
                    selections: vec![DetectorSelection::new(cfg.mimo.p_f, cfg.mimo.c)],
                });
            }
            let key = vec!["antennas", "jammer_antennas", "jammer_power_db"];
            let table = simulate(key, &points, seed, run)?;
            Ok((metadata(cmd, seed, Some(run), &cfg.mimo), table))
        }
        Command::SimWsn => {
            let mut points = Vec::new();
            for p in cfg.wsn.points() {
                points.push(GridPoint {
                    key: vec![p.sensors.into(), p.snr_db.into(), p.tau.into()],
                    scenario: p.scenario()?.into(),
                    selections: vec![DetectorSelection::new(cfg.wsn.p_f, cfg.wsn.c)],
                });
            }
            let table = simulate(vec!["sensors", "snr_db", "tau"], &points, seed, run)?;
            Ok((metadata(cmd, seed, Some(run), &cfg.wsn), table))
        }
        Command::SimBsc => {
            let b = &cfg.bsc;
            let scenario: Scenario = GaussianScenario::new(b.sigma0_sq, b.delta_var, b.n)?.into();
            let mut selections = Vec::new();
            let mut keys = Vec::new();
            for eps in b.epsilon.to_vec() {
                selections.push(DetectorSelection::new(b.p_f, b.c).with_bsc(BscChannel::new(eps)?));
                keys.push(vec![eps.into()]);
            }
            let table = simulate_shared(vec!["epsilon"], keys, &scenario, &selections, seed, run)?;
            Ok((metadata(cmd, seed, Some(run), b), table))
        }
    }
}

fn params(cfg: &FileConfig) -> Result<Table, CliError> {
    let s = &cfg.params;
    let mut t = Table::new(vec![
        "n",
        "p_f",
        "c",
        "theta0",
        "gamma",
        "zeta",
        "gamma_approx",
        "false_alarm",
    ]);
    for n in s.n.to_vec() {
        for p_f in s.p_f.to_vec() {
            let p = DetectorParams::new(n, p_f, s.c)?;
            t.push(vec![
                n.into(),
                p_f.into(),
                s.c.into(),
                p.theta0().value().into(),
                p.gamma().into(),
                p.zeta().value().into(),
                approx_threshold(n, p_f, s.c)?.into(),
                p.false_alarm_probability().value().into(),
            ]);
        }
    }
    Ok(t)
}

fn sweep_c(cfg: &FileConfig) -> Result<Table, CliError> {
    let s = &cfg.sweep_c;
    let grid = linear_grid(s.c_start, s.c_stop, s.c_step)?;
    let mut t = Table::new(vec!["n", "p_f", "alpha", "c", "p_d", "argmax"]);
    for p_f in s.p_f.to_vec() {
        for alpha in s.alpha.to_vec() {
            let curve = grid
                .iter()
                .map(|&c| detection_probability(s.n, p_f, c, alpha).map(|p| p.value()))
                .collect::<Result<Vec<_>, _>>()?;
            // First maximum, so ties resolve to the narrower window.
            let best = curve
                .iter()
                .enumerate()
                .fold(0, |b, (i, &v)| if v > curve[b] { i } else { b });
            for (i, (&c, &pd)) in grid.iter().zip(&curve).enumerate() {
                t.push(vec![
                    s.n.into(),
                    p_f.into(),
                    alpha.into(),
                    c.into(),
                    pd.into(),
                    (i == best).into(),
                ]);
            }
        }
    }
    Ok(t)
}

fn roc(s: &RocSection, seed: u64, run: RunSettings) -> Result<Table, CliError> {
    if s.n.is_some() && (s.mimo.is_some() || s.wsn.is_some()) {
        return Err(CliError::Config(
            "roc: n is set by the mimo or wsn model and cannot be given".into(),
        ));
    }
    let scenarios: Vec<Scenario> = match (&s.mimo, &s.wsn) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "roc: give at most one of the mimo and wsn models".into(),
            ))
        }
        (Some(m), None) => vec![m.scenario()?.into()],
        (None, Some(w)) => vec![w.scenario()?.into()],
        (None, None) => {
            let dv = bitdensity::quantizer::VarianceRatio::new(s.alpha)?
                .value()
                .powi(-2)
                - 1.0;
            let ns =
                s.n.as_ref()
                    .map(|n| n.to_vec())
                    .unwrap_or_else(|| vec![200]);
            ns.into_iter()
                .map(|n| GaussianScenario::new(1.0, dv, n).map(Scenario::from))
                .collect::<Result<_, _>>()?
        }
    };
    let selections: Vec<_> = s
        .p_f
        .to_vec()
        .into_iter()
        .map(|p_f| DetectorSelection::new(p_f, s.c))
        .collect();
    let mut points = Vec::new();
    for scenario in scenarios {
        points.push(GridPoint {
            key: Vec::new(),
            scenario,
            selections: selections.clone(),
        });
    }
    simulate(Vec::new(), &points, seed, run)
}

struct GridPoint {
    key: Vec<Cell>,
    scenario: Scenario,
    selections: Vec<DetectorSelection>,
}

fn columns(key: Vec<&'static str>, run: RunSettings) -> Vec<&'static str> {
    let mut cols = key;
    cols.extend([
        "n",
        "p_f",
        "c",
        "gamma",
        "zeta",
        "alpha",
        "theory_pd",
        "theory_exact",
    ]);
    if run.trials > 0 {
        cols.extend(["trials", "empirical_pf", "pf_ci", "empirical_pd", "pd_ci"]);
    }
    if run.paired_baseline {
        cols.extend(["baseline_threshold", "baseline_theory_pd"]);
        if run.trials > 0 {
            cols.extend([
                "baseline_pf",
                "baseline_pf_ci",
                "baseline_pd",
                "baseline_pd_ci",
            ]);
        }
    }
    cols
}

fn simulate(
    key: Vec<&'static str>,
    points: &[GridPoint],
    seed: u64,
    run: RunSettings,
) -> Result<Table, CliError> {
    let mut table = Table::new(columns(key, run));
    for p in points {
        for sel in &p.selections {
            plan(&p.scenario, sel)?;
        }
    }
    for p in points {
        let keys = vec![p.key.clone(); p.selections.len()];
        for row in simulate_rows(keys, &p.scenario, &p.selections, seed, run)? {
            table.push(row);
        }
    }
    Ok(table)
}

fn simulate_shared(
    key: Vec<&'static str>,
    keys: Vec<Vec<Cell>>,
    scenario: &Scenario,
    selections: &[DetectorSelection],
    seed: u64,
    run: RunSettings,
) -> Result<Table, CliError> {
    let mut table = Table::new(columns(key, run));
    for row in simulate_rows(keys, scenario, selections, seed, run)? {
        table.push(row);
    }
    Ok(table)
}

/// All selections run on one scenario, so they share sample streams.
fn simulate_rows(
    keys: Vec<Vec<Cell>>,
    scenario: &Scenario,
    selections: &[DetectorSelection],
    seed: u64,
    run: RunSettings,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let selections: Vec<_> = selections
        .iter()
        .map(|s| DetectorSelection {
            paired_baseline: run.paired_baseline,
            ..*s
        })
        .collect();
    // Validate every point before spending any time on simulation.
    let plans = selections
        .iter()
        .map(|s| plan(scenario, s))
        .collect::<Result<Vec<_>, _>>()?;
    let reports: Option<Vec<TrialReport>> = if run.trials > 0 {
        let reports = run_monte_carlo_multi(scenario, &selections, run.trials, seed)?;
        if let Some(r) = reports.first() {
            eprintln!("simulated n = {} in {:.2?}", r.n, r.wall_time);
        }
        Some(reports)
    } else {
        None
    };
    let mut rows = Vec::new();
    for (i, (sel, p)) in selections.iter().zip(&plans).enumerate() {
        let mut row = keys[i].clone();
        row.extend([
            p.n.into(),
            sel.p_f.into(),
            sel.c.into(),
            p.gamma.into(),
            p.zeta.into(),
            p.alpha.into(),
            p.theory_pd.into(),
            p.theory_exact.into(),
        ]);
        if let Some(reports) = &reports {
            let r = &reports[i];
            row.extend([
                r.trials.into(),
                r.empirical_pf.value.into(),
                r.empirical_pf.ci.into(),
                r.empirical_pd.value.into(),
                r.empirical_pd.ci.into(),
            ]);
        }
        if let Some((threshold, theory)) = p.baseline {
            row.extend([threshold.into(), theory.into()]);
            if let Some(reports) = &reports {
                let b = reports[i].baseline.expect("paired baseline requested");
                row.extend([
                    b.empirical_pf.value.into(),
                    b.empirical_pf.ci.into(),
                    b.empirical_pd.value.into(),
                    b.empirical_pd.ci.into(),
                ]);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
