//! Runs a validated [`ExperimentConfig`] and returns its table.

use crate::code::build_code;
use crate::config::{Command, ExperimentConfig};
use crate::error::Result;
use crate::fit::{fit_power_law, NUMERICAL_FLOOR};
use crate::heisenberg::IdentityReport;
use crate::output::{Cell, FitStatus, Table};
use crate::protocol::{epsilon_sweep, two_time_protocol, zeno_sweep, TwoTimeResult};
use crate::verify::run_suite;

pub const SWEEP_COLUMNS: [&str; 3] = ["epsilon", "failure_probability", "infidelity"];
pub const ZENO_COLUMNS: [&str; 3] = ["k", "cumulative_failure", "final_infidelity"];
pub const TWO_TIME_COLUMNS: [&str; 7] = [
    "epsilon",
    "p_x0_y0",
    "p_x2_y0",
    "p_x0_y2",
    "p_x2_y2",
    "other_outcome_mass",
    "infidelity",
];
pub const VERIFY_COLUMNS: [&str; 4] = ["identity", "status", "max_defect", "detail"];

pub fn run(config: &ExperimentConfig) -> Result<Table> {
    config.validate()?;
    match config.command {
        Command::Verify => Ok(verify_table(&run_suite()?)),
        Command::Sweep => sweep(config),
        Command::Zeno => zeno(config),
        Command::Twotime => two_time(config),
    }
}

pub fn verify_table(reports: &[IdentityReport]) -> Table {
    let mut t = Table::new(&VERIFY_COLUMNS);
    for r in reports {
        let status = serde_json::to_value(r.status).expect("status serializes");
        t.push(vec![
            Cell::Text(r.identity.clone()),
            Cell::Text(status.as_str().unwrap_or_default().to_string()),
            Cell::Real(r.max_defect),
            Cell::Text(r.detail.clone()),
        ]);
    }
    t
}

fn sweep(config: &ExperimentConfig) -> Result<Table> {
    let code = build_code(config.n)?;
    let sweep = epsilon_sweep(
        &code,
        &config.noise_model()?,
        &config.epsilons,
        &config.psi_state()?,
        config.observable,
    )?;
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in &sweep.rows {
        t.push(vec![
            Cell::Real(r.param),
            Cell::Real(r.failure_probability),
            Cell::Real(r.infidelity),
        ]);
    }
    Ok(t.with_fit(sweep.fit.into()))
}

fn zeno(config: &ExperimentConfig) -> Result<Table> {
    let code = build_code(config.n)?;
    let sweep = zeno_sweep(
        &code,
        &config.noise_model()?,
        config.total_epsilon,
        &config.ks,
        config.env_policy,
        &config.psi_state()?,
        config.seed,
    )?;
    let mut t = Table::new(&ZENO_COLUMNS);
    for r in &sweep.rows {
        t.push(vec![
            Cell::Int(r.param as u64),
            Cell::Real(r.failure_probability),
            Cell::Real(r.infidelity),
        ]);
    }
    Ok(t.with_fit(sweep.fit.into()))
}

fn two_time(config: &ExperimentConfig) -> Result<Table> {
    let model = config.noise_model()?;
    let psi = config.psi_state()?;
    let results: Vec<TwoTimeResult> = config
        .epsilons
        .iter()
        .map(|&eps| two_time_protocol(&model, eps, &psi, config.seed))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&TWO_TIME_COLUMNS);
    for (&eps, r) in config.epsilons.iter().zip(&results) {
        let mut row = vec![Cell::Real(eps)];
        row.extend(r.probabilities.iter().map(|&p| Cell::Real(p)));
        row.push(Cell::Real(r.other_outcome_mass()));
        row.push(Cell::Real(1.0 - r.conditional_fidelity));
        t.push(row);
    }
    let mass: Vec<f64> = results
        .iter()
        .map(TwoTimeResult::other_outcome_mass)
        .collect();
    Ok(t.with_fit(FitStatus::from(fit_power_law(
        &config.epsilons,
        &mass,
        NUMERICAL_FLOOR,
    ))))
}
