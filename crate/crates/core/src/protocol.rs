//! End-to-end experiments built from the code, the noise model and the
//! syndrome measurement.
//!
//! A protected cycle is `prepare → encode → exp(iεH) → decode → measure`, with
//! all probabilities computed exactly from the state vector. Repeated cycles
//! post-select on the "no error" syndrome; any other outcome ends the run.

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::ZenoCode;
use crate::error::{Result, ZenoError};
use crate::fit::{fit_power_law, PowerLawFit, NUMERICAL_FLOOR};
use crate::noise::{environment_ground, NoiseModel};
use crate::pauli::Pauli;
use crate::rng_from_seed;
use crate::statevec::{
    kron, outcome_probabilities, overlap_probability, pauli_matrix, project_onto, CMatrix,
    DenseOperator, RegisterLayout, StateVector, C64, ONE, ZERO,
};
use crate::ANCILLA_QUBITS;

/// Outcome statistics of one protected cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleResult {
    /// Probability of syndrome 0 ("no error detected").
    pub success_probability: f64,
    /// Overlap of the post-selected system with `|ψ⟩`, environment traced out.
    pub conditional_fidelity: f64,
    pub failure_probability: f64,
    pub syndrome_probabilities: [f64; 4],
    /// Syndrome drawn from `syndrome_probabilities` with the cycle's seed.
    pub sampled_outcome: Pauli,
}

/// What happens to the environment between repeated cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvPolicy {
    /// Fresh `|0⟩` environment every cycle.
    #[default]
    Reset,
    /// The environment keeps its state across cycles.
    Persist,
}

impl std::str::FromStr for EnvPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "reset" => Ok(EnvPolicy::Reset),
            "persist" => Ok(EnvPolicy::Persist),
            other => Err(format!(
                "unknown environment policy '{other}' (expected reset or persist)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub cycles: usize,
    pub env_policy: EnvPolicy,
    /// Per-cycle statistics, each conditioned on all earlier cycles succeeding.
    pub per_cycle: Vec<CycleResult>,
    pub cumulative_success: f64,
    pub final_conditional_fidelity: f64,
    /// First cycle (0-based) at which a sampled trajectory saw a nonzero
    /// syndrome, if any.
    pub sampled_failure_cycle: Option<usize>,
}

impl RunResult {
    pub fn cumulative_failure(&self) -> f64 {
        1.0 - self.cumulative_success
    }
}

fn check_model(code: &ZenoCode, model: &NoiseModel) -> Result<()> {
    if model.n() != code.n() {
        return Err(ZenoError::DimensionMismatch(format!(
            "noise model for n = {} used with an n = {} code",
            model.n(),
            code.n()
        )));
    }
    Ok(())
}

fn full_layout(n: usize) -> RegisterLayout {
    RegisterLayout::new(ANCILLA_QUBITS, n, n)
}

/// `|in⟩|ψ⟩|0⟩_env` on the full register.
fn initial_state(code: &ZenoCode, psi: &StateVector) -> Result<StateVector> {
    code.prepare(psi)?;
    StateVector::product(
        code.in_state(),
        psi.amplitudes(),
        &environment_ground(code.n()),
    )
}

/// Encode, evolve with `propagator`, decode.
fn protected_evolution(
    code: &ZenoCode,
    propagator: &DenseOperator,
    state: &StateVector,
) -> Result<StateVector> {
    code.decode(&propagator.apply(&code.encode(state)?)?)
}

fn conditional_fidelity(
    code: &ZenoCode,
    postselected: &StateVector,
    psi: &StateVector,
) -> Result<f64> {
    let norm = postselected.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let mut post = postselected.clone();
    post.normalize();
    let reference = code.prepare(psi)?;
    let targets: Vec<usize> = (0..ANCILLA_QUBITS + code.n()).collect();
    overlap_probability(&post, &reference, &targets)
}

fn sample_outcome(probabilities: &[f64; 4], seed: u64) -> Pauli {
    let draw = rng_from_seed(seed).random::<f64>() * probabilities.iter().sum::<f64>();
    let mut acc = 0.0;
    for (b, p) in probabilities.iter().enumerate() {
        acc += p;
        if draw < acc && *p > 0.0 {
            return Pauli::ALL[b];
        }
    }
    Pauli::ALL[probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)]
}

fn cycle_with(
    code: &ZenoCode,
    propagator: &DenseOperator,
    psi: &StateVector,
    seed: u64,
) -> Result<CycleResult> {
    let state = protected_evolution(code, propagator, &initial_state(code, psi)?)?;
    let syndrome_probabilities = code.syndrome_probabilities(&state)?;
    let success_probability = syndrome_probabilities[0].clamp(0.0, 1.0);
    let post = code.postselect_success(&state)?;
    Ok(CycleResult {
        success_probability,
        conditional_fidelity: conditional_fidelity(code, &post, psi)?.clamp(0.0, 1.0),
        failure_probability: (1.0 - success_probability).clamp(0.0, 1.0),
        syndrome_probabilities,
        sampled_outcome: sample_outcome(&syndrome_probabilities, seed),
    })
}

/// One protected cycle at the model's `ε`, with exact outcome probabilities.
pub fn single_cycle(
    code: &ZenoCode,
    model: &NoiseModel,
    psi: &StateVector,
    seed: u64,
) -> Result<CycleResult> {
    check_model(code, model)?;
    let propagator = model.propagator(full_layout(code.n()))?;
    cycle_with(code, &propagator, psi, seed)
}

/// `k` protected cycles of strength `total_epsilon / k` each.
///
/// Under [`EnvPolicy::Reset`] the system is carried between cycles as a
/// density matrix, since tracing out the environment generally leaves it
/// mixed; each cycle runs its pure eigencomponents separately.
pub fn zeno_run(
    code: &ZenoCode,
    model: &NoiseModel,
    total_epsilon: f64,
    k: usize,
    env_policy: EnvPolicy,
    psi: &StateVector,
    seed: u64,
) -> Result<RunResult> {
    check_model(code, model)?;
    if k == 0 {
        return Err(ZenoError::Contract(
            "a Zeno run needs at least one cycle".into(),
        ));
    }
    let propagator = model
        .with_epsilon(total_epsilon / k as f64)
        .propagator(full_layout(code.n()))?;
    let mut rng = rng_from_seed(seed);
    let per_cycle = match env_policy {
        EnvPolicy::Persist => persist_cycles(code, &propagator, psi, k, &mut rng)?,
        EnvPolicy::Reset => reset_cycles(code, &propagator, psi, k, &mut rng)?,
    };
    let cumulative_success: f64 = per_cycle.iter().map(|c| c.success_probability).product();
    let sampled_failure_cycle = per_cycle.iter().position(|c| c.sampled_outcome != Pauli::I);
    Ok(RunResult {
        cycles: k,
        env_policy,
        final_conditional_fidelity: per_cycle.last().map_or(1.0, |c| c.conditional_fidelity),
        cumulative_success,
        per_cycle,
        sampled_failure_cycle,
    })
}

fn cycle_record(syndrome: [f64; 4], total: f64, fidelity: f64, rng: &mut impl Rng) -> CycleResult {
    let syndrome_probabilities = if total > 0.0 {
        syndrome.map(|p| p / total)
    } else {
        syndrome
    };
    let success = syndrome_probabilities[0].clamp(0.0, 1.0);
    CycleResult {
        success_probability: success,
        conditional_fidelity: fidelity.clamp(0.0, 1.0),
        failure_probability: (1.0 - success).clamp(0.0, 1.0),
        syndrome_probabilities,
        sampled_outcome: sample_outcome(&syndrome_probabilities, rng.random()),
    }
}

fn persist_cycles(
    code: &ZenoCode,
    propagator: &DenseOperator,
    psi: &StateVector,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<CycleResult>> {
    let mut state = initial_state(code, psi)?;
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let evolved = protected_evolution(code, propagator, &state)?;
        let syndrome = code.syndrome_probabilities(&evolved)?;
        let mut post = code.postselect_success(&evolved)?;
        let fidelity = conditional_fidelity(code, &post, psi)?;
        out.push(cycle_record(syndrome, syndrome.iter().sum(), fidelity, rng));
        if post.normalize() == 0.0 {
            break;
        }
        state = post;
    }
    Ok(out)
}

fn reset_cycles(
    code: &ZenoCode,
    propagator: &DenseOperator,
    psi: &StateVector,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<CycleResult>> {
    let n = code.n();
    let sys_qubits: Vec<usize> = (0..n).collect();
    let psi_vec = DVector::from_column_slice(psi.amplitudes());
    let mut rho = &psi_vec * psi_vec.adjoint();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let eig = rho.clone().symmetric_eigen();
        let mut next = CMatrix::zeros(rho.nrows(), rho.ncols());
        let mut syndrome = [0.0; 4];
        for (idx, &weight) in eig.eigenvalues.iter().enumerate() {
            if weight <= 1e-15 {
                continue;
            }
            let component: Vec<C64> = eig.eigenvectors.column(idx).iter().copied().collect();
            let component = StateVector::from_amplitudes(RegisterLayout::plain(n), component)?;
            let state = protected_evolution(code, propagator, &initial_state(code, &component)?)?;
            for (s, p) in syndrome
                .iter_mut()
                .zip(code.syndrome_probabilities(&state)?)
            {
                *s += weight * p;
            }
            let kept = StateVector::from_amplitudes(
                RegisterLayout::new(0, n, n),
                code.contract_in(&state)?,
            )?;
            next += kept.reduced_density(&sys_qubits)? * C64::new(weight, 0.0);
        }
        let success = next.trace().re;
        let fidelity = if success > 0.0 {
            (psi_vec.adjoint() * &next * &psi_vec)[(0, 0)].re / success
        } else {
            0.0
        };
        out.push(cycle_record(syndrome, syndrome.iter().sum(), fidelity, rng));
        if success <= 0.0 {
            break;
        }
        rho = next / C64::new(success, 0.0);
    }
    Ok(out)
}

/// Which column of a sweep is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    #[default]
    Failure,
    Infidelity,
}

impl std::str::FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "failure" => Ok(Observable::Failure),
            "infidelity" => Ok(Observable::Infidelity),
            other => Err(format!(
                "unknown observable '{other}' (expected failure or infidelity)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// ε for strength sweeps, `k` for cycle-count sweeps.
    pub param: f64,
    pub failure_probability: f64,
    pub infidelity: f64,
}

impl SweepRow {
    pub fn value(&self, observable: Observable) -> f64 {
        match observable {
            Observable::Failure => self.failure_probability,
            Observable::Infidelity => self.infidelity,
        }
    }
}

/// Sweep rows plus a log-log fit of the chosen observable against `param`.
/// `fit` is `None` when fewer than two rows rise above the numerical floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub param_name: String,
    pub observable: Observable,
    pub rows: Vec<SweepRow>,
    pub fit: Option<PowerLawFit>,
}

impl SweepTable {
    pub fn from_rows(param_name: &str, observable: Observable, rows: Vec<SweepRow>) -> Self {
        let xs: Vec<f64> = rows.iter().map(|r| r.param).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.value(observable)).collect();
        let fit = fit_power_law(&xs, &ys, NUMERICAL_FLOOR);
        Self {
            param_name: param_name.to_string(),
            observable,
            rows,
            fit,
        }
    }

    pub fn is_floor(&self) -> bool {
        self.fit.is_none()
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

fn check_sweep_grid(epsilons: &[f64]) -> Result<()> {
    if epsilons.len() < 4 {
        return Err(ZenoError::Contract(format!(
            "a sweep needs at least 4 points, got {}",
            epsilons.len()
        )));
    }
    if epsilons
        .iter()
        .any(|&e| e.is_nan() || e <= 0.0 || e.is_infinite())
    {
        return Err(ZenoError::Contract(
            "sweep points must be positive and finite".into(),
        ));
    }
    let lo = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(ZenoError::Contract(format!(
            "sweep spans {lo:e}..{hi:e}, less than one decade"
        )));
    }
    Ok(())
}

/// Single-cycle failure and conditional infidelity at each `ε`, with a
/// power-law fit of `observable`. Points run in parallel; row order follows
/// `epsilons`.
pub fn epsilon_sweep(
    code: &ZenoCode,
    model: &NoiseModel,
    epsilons: &[f64],
    psi: &StateVector,
    observable: Observable,
) -> Result<SweepTable> {
    check_model(code, model)?;
    check_sweep_grid(epsilons)?;
    let layout = full_layout(code.n());
    let h = model.build_hamiltonian(layout)?;
    let rows = epsilons
        .par_iter()
        .map(|&eps| {
            let propagator = crate::statevec::hermitian_exp(&h, eps)?;
            let c = cycle_with(code, &propagator, psi, 0)?;
            Ok(SweepRow {
                param: eps,
                failure_probability: c.failure_probability,
                infidelity: 1.0 - c.conditional_fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::from_rows("epsilon", observable, rows))
}

/// Cumulative failure and final infidelity of [`zeno_run`] for each cycle count.
pub fn zeno_sweep(
    code: &ZenoCode,
    model: &NoiseModel,
    total_epsilon: f64,
    ks: &[usize],
    env_policy: EnvPolicy,
    psi: &StateVector,
    seed: u64,
) -> Result<SweepTable> {
    let rows = ks
        .par_iter()
        .map(|&k| {
            let run = zeno_run(code, model, total_epsilon, k, env_policy, psi, seed)?;
            Ok(SweepRow {
                param: k as f64,
                failure_probability: run.cumulative_failure(),
                infidelity: 1.0 - run.final_conditional_fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::from_rows("k", Observable::Failure, rows))
}

/// One coupling step of the two-time measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTimeCoupling {
    /// 0 couples in the σ_x basis, 1 in the σ_y basis.
    pub test_qubit: usize,
    pub system: usize,
    pub basis: Pauli,
}

/// Coupling order before the disturbance window; the closing half runs the
/// same steps in reverse. Test qubit 0 measures σ_x, test qubit 1 measures σ_y.
pub fn two_time_schedule(n: usize) -> Vec<TwoTimeCoupling> {
    let x = (0..n).map(|j| TwoTimeCoupling {
        test_qubit: 0,
        system: j,
        basis: Pauli::X,
    });
    let y = (0..n).map(|j| TwoTimeCoupling {
        test_qubit: 1,
        system: j,
        basis: Pauli::Y,
    });
    x.chain(y).collect()
}

/// CNOT in the eigenbasis of `basis` on the system: the test qubit flips iff
/// the system is in the `-1` eigenstate. Local bit 0 is the test qubit.
fn basis_cnot(basis: Pauli) -> CMatrix {
    let sigma = pauli_matrix(basis);
    let id = CMatrix::identity(2, 2);
    let half = C64::new(0.5, 0.0);
    let plus = (&id + &sigma) * half;
    let minus = (&id - &sigma) * half;
    kron(&plus, &id) + kron(&minus, &pauli_matrix(Pauli::X))
}

/// Joint result of the two mod-4 two-time variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoTimeResult {
    /// Indexed by `x_flip + 2·y_flip`; a flip means the corresponding variable
    /// `(σ(t) − σ(t'))mod 4` came out 2 instead of 0.
    pub probabilities: [f64; 4],
    pub sampled: usize,
    /// Overlap of the system with `|ψ⟩` given the all-zero outcome.
    pub conditional_fidelity: f64,
}

impl TwoTimeResult {
    /// `(x, y)` values of the two mod-4 variables for outcome index `k`.
    pub fn outcome_values(k: usize) -> (u8, u8) {
        (2 * (k & 1) as u8, 2 * (k >> 1 & 1) as u8)
    }

    /// Probability mass outside the undisturbed outcome `(0, 0)`.
    pub fn other_outcome_mass(&self) -> f64 {
        self.probabilities[1..].iter().sum()
    }
}

/// Two test qubits couple to each system at the start and end of a window in
/// which `disturbance` acts with strength `epsilon`; the test qubits are then
/// read out. Works for one system qubit, or two sharing the test qubits.
pub fn two_time_protocol(
    disturbance: &NoiseModel,
    epsilon: f64,
    psi: &StateVector,
    seed: u64,
) -> Result<TwoTimeResult> {
    let n = disturbance.n();
    if !(1..=2).contains(&n) {
        return Err(ZenoError::SizeOutOfRange { n, min: 1, max: 2 });
    }
    if psi.num_qubits() != n {
        return Err(ZenoError::DimensionMismatch(format!(
            "{}-qubit state for {n} systems",
            psi.num_qubits()
        )));
    }
    let layout = full_layout(n);
    let test_ground = [ONE, ZERO, ZERO, ZERO];
    let mut state = StateVector::product(&test_ground, psi.amplitudes(), &environment_ground(n))?;
    let schedule = two_time_schedule(n);
    let gates: Vec<DenseOperator> = schedule
        .iter()
        .map(|c| {
            DenseOperator::new(
                basis_cnot(c.basis),
                vec![c.test_qubit, ANCILLA_QUBITS + c.system],
            )
        })
        .collect::<Result<_>>()?;
    for g in &gates {
        state = g.apply(&state)?;
    }
    state = disturbance
        .with_epsilon(epsilon)
        .propagator(layout)?
        .apply(&state)?;
    for g in gates.iter().rev() {
        state = g.apply(&state)?;
    }
    let readout: Vec<Vec<C64>> = (0..4)
        .map(|k| (0..4).map(|j| if j == k { ONE } else { ZERO }).collect())
        .collect();
    let p = outcome_probabilities(&state, &[0, 1], &readout)?;
    let probabilities = [p[0], p[1], p[2], p[3]];
    let mut post = project_onto(&state, &[0, 1], &readout[0])?;
    let conditional_fidelity = if post.normalize() > 0.0 {
        let reference = StateVector::product(&test_ground, psi.amplitudes(), &[])?;
        overlap_probability(
            &post,
            &reference,
            &(0..ANCILLA_QUBITS + n).collect::<Vec<_>>(),
        )?
    } else {
        0.0
    };
    Ok(TwoTimeResult {
        probabilities,
        sampled: sample_outcome(&probabilities, seed) as usize,
        conditional_fidelity,
    })
}

/// Other-outcome mass of the two-time protocol against `ε`, fitted like
/// [`epsilon_sweep`].
pub fn two_time_sweep(
    disturbance: &NoiseModel,
    epsilons: &[f64],
    psi: &StateVector,
    seed: u64,
) -> Result<SweepTable> {
    check_sweep_grid(epsilons)?;
    let rows = epsilons
        .par_iter()
        .map(|&eps| {
            let r = two_time_protocol(disturbance, eps, psi, seed)?;
            Ok(SweepRow {
                param: eps,
                failure_probability: r.other_outcome_mass(),
                infidelity: 1.0 - r.conditional_fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable::from_rows("epsilon", Observable::Failure, rows))
}
