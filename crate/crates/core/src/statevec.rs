//! Dense state vectors and operators on small qubit registers.
//!
//! Bit convention: qubit `q` of a register is bit `q` of the amplitude index
//! (little-endian). An operator acting on `targets = [t0, t1, ..]` uses local
//! index bit `k` for qubit `targets[k]`, so a two-target operator built as
//! `kron(B, A)` applies `A` to `t0` and `B` to `t1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::pauli::{Pauli, PauliString};
use crate::rng_from_seed;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const TOLERANCE: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// The 2x2 matrix of a Pauli letter.
pub fn pauli_matrix(p: Pauli) -> CMatrix {
    let m = match p {
        Pauli::I => [ONE, ZERO, ZERO, ONE],
        Pauli::X => [ZERO, ONE, ONE, ZERO],
        Pauli::Y => [ZERO, -I, I, ZERO],
        Pauli::Z => [ONE, ZERO, ZERO, -ONE],
    };
    CMatrix::from_row_slice(2, 2, &m)
}

/// Kronecker product `a ⊗ b` (row index of `a` is the high part).
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Tensor product of operators listed from the lowest local qubit upward.
pub fn kron_little_endian(ops: &[CMatrix]) -> CMatrix {
    ops.iter()
        .fold(CMatrix::identity(1, 1), |acc, op| kron(op, &acc))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral norm via singular values.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// A square complex matrix acting on an ordered list of register qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    targets: Vec<usize>,
    hermitian: bool,
    unitary: bool,
}

impl DenseOperator {
    /// Wraps `matrix` without asserting any structure. Flags are filled in by
    /// checking the matrix against [`TOLERANCE`].
    pub fn new(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        check_targets(&targets)?;
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(ZenoError::DimensionMismatch(format!(
                "{}x{} matrix for {} target qubits",
                matrix.nrows(),
                matrix.ncols(),
                targets.len()
            )));
        }
        let hermitian = hermiticity_defect(&matrix) <= TOLERANCE;
        let unitary = unitarity_defect(&matrix) <= TOLERANCE;
        Ok(Self {
            matrix,
            targets,
            hermitian,
            unitary,
        })
    }

    /// Like [`DenseOperator::new`] but fails unless the matrix is hermitian.
    pub fn hermitian(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        let op = Self::new(matrix, targets)?;
        if !op.hermitian {
            return Err(ZenoError::NotHermitian(hermiticity_defect(&op.matrix)));
        }
        Ok(op)
    }

    /// Like [`DenseOperator::new`] but fails unless the matrix is unitary.
    pub fn unitary(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        let op = Self::new(matrix, targets)?;
        if !op.unitary {
            return Err(ZenoError::NotUnitary(unitarity_defect(&op.matrix)));
        }
        Ok(op)
    }

    pub fn identity(targets: Vec<usize>) -> Result<Self> {
        let dim = 1usize << targets.len();
        Self::new(CMatrix::identity(dim, dim), targets)
    }

    /// Dense matrix of a Pauli string; letter `k` acts on `targets[k]`.
    pub fn from_pauli_string(p: &PauliString, targets: Vec<usize>) -> Result<Self> {
        if p.len() != targets.len() {
            return Err(ZenoError::LengthMismatch {
                expected: targets.len(),
                actual: p.len(),
            });
        }
        let mats: Vec<CMatrix> = p.letters().iter().map(|&l| pauli_matrix(l)).collect();
        let phase = I.powu(u32::from(p.phase_exponent()));
        Self::new(kron_little_endian(&mats) * phase, targets)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            targets: self.targets.clone(),
            hermitian: self.hermitian,
            unitary: self.unitary,
        }
    }

    /// Operator product `self * rhs` (rhs acts first). Both must share targets.
    pub fn compose(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.targets != rhs.targets {
            return Err(ZenoError::DimensionMismatch(format!(
                "cannot compose operators on {:?} and {:?}",
                self.targets, rhs.targets
            )));
        }
        Self::new(&self.matrix * &rhs.matrix, self.targets.clone())
    }

    /// The same operator as a full `2^m x 2^m` matrix on an `m`-qubit register.
    pub fn embed(&self, num_qubits: usize) -> Result<CMatrix> {
        let dim = 1usize << num_qubits;
        let mut columns = Vec::with_capacity(dim);
        for col in 0..dim {
            let basis = StateVector::basis(RegisterLayout::plain(num_qubits), col)?;
            columns.push(self.apply(&basis)?.amplitudes);
        }
        Ok(CMatrix::from_fn(dim, dim, |r, c| columns[c][r]))
    }

    /// Applies the operator to its target qubits of `state`, identity elsewhere.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        self.apply_in_place(&mut out.amplitudes, state.num_qubits())?;
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, amps: &mut [C64], num_qubits: usize) -> Result<()> {
        for &t in &self.targets {
            if t >= num_qubits {
                return Err(ZenoError::QubitOutOfRange {
                    index: t,
                    num_qubits,
                });
            }
        }
        let offsets = local_offsets(&self.targets);
        let mask: usize = self.targets.iter().map(|&t| 1usize << t).sum();
        let d = offsets.len();
        let mut gathered = vec![ZERO; d];
        for base in 0..amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (g, &off) in gathered.iter_mut().zip(&offsets) {
                *g = amps[base + off];
            }
            for (r, &off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (c, g) in gathered.iter().enumerate() {
                    acc += self.matrix[(r, c)] * g;
                }
                amps[base + off] = acc;
            }
        }
        Ok(())
    }
}

fn check_targets(targets: &[usize]) -> Result<()> {
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(ZenoError::DuplicateTarget(*t));
        }
    }
    Ok(())
}

/// Register offset of every local index of an operator on `targets`.
fn local_offsets(targets: &[usize]) -> Vec<usize> {
    (0..1usize << targets.len())
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .filter(|(k, _)| local >> k & 1 == 1)
                .map(|(_, &t)| 1usize << t)
                .sum()
        })
        .collect()
}

/// `exp(+i H t)` for hermitian `H`, computed from its eigendecomposition.
pub fn hermitian_exp(h: &DenseOperator, t: f64) -> Result<DenseOperator> {
    if !h.is_hermitian() {
        return Err(ZenoError::NotHermitian(hermiticity_defect(h.matrix())));
    }
    let eig = h.matrix().clone().symmetric_eigen();
    let phases = eig.eigenvalues.map(|e| C64::from_polar(1.0, e * t));
    let v = &eig.eigenvectors;
    let u = v * CMatrix::from_diagonal(&phases) * v.adjoint();
    DenseOperator::new(u, h.targets().to_vec())
}

/// Sizes of the ancilla, system and environment blocks. Ancilla qubits come
/// first (lowest indices), then system, then environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    pub ancilla: usize,
    pub system: usize,
    pub environment: usize,
}

impl RegisterLayout {
    pub fn new(ancilla: usize, system: usize, environment: usize) -> Self {
        Self {
            ancilla,
            system,
            environment,
        }
    }

    /// A register with no block structure.
    pub fn plain(num_qubits: usize) -> Self {
        Self {
            ancilla: 0,
            system: num_qubits,
            environment: 0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.ancilla + self.system + self.environment
    }

    pub fn ancilla_qubits(&self) -> Vec<usize> {
        (0..self.ancilla).collect()
    }

    pub fn system_qubits(&self) -> Vec<usize> {
        (self.ancilla..self.ancilla + self.system).collect()
    }

    pub fn environment_qubits(&self) -> Vec<usize> {
        (self.ancilla + self.system..self.num_qubits()).collect()
    }
}

/// Amplitudes of a pure state on a qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(layout: RegisterLayout, amplitudes: Vec<C64>) -> Result<Self> {
        let expected = 1usize << layout.num_qubits();
        if amplitudes.len() != expected {
            return Err(ZenoError::LengthMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        Ok(Self { layout, amplitudes })
    }

    /// Like [`StateVector::from_amplitudes`], rejecting vectors off the unit sphere.
    pub fn normalized(layout: RegisterLayout, amplitudes: Vec<C64>) -> Result<Self> {
        let s = Self::from_amplitudes(layout, amplitudes)?;
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(ZenoError::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let dim = 1usize << layout.num_qubits();
        if index >= dim {
            return Err(ZenoError::DimensionMismatch(format!(
                "basis index {index} >= {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self { layout, amplitudes })
    }

    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0).expect("index 0 always exists")
    }

    /// Haar-like random state from complex gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(layout: RegisterLayout, rng: &mut R) -> Self {
        let dim = 1usize << layout.num_qubits();
        let amplitudes = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut s = Self { layout, amplitudes };
        s.normalize();
        s
    }

    pub fn random_seeded(layout: RegisterLayout, seed: u64) -> Self {
        Self::random(layout, &mut rng_from_seed(seed))
    }

    /// Product state of the ancilla, system and environment blocks. An empty
    /// slice stands for a block with no qubits.
    pub fn product(ancilla: &[C64], system: &[C64], environment: &[C64]) -> Result<Self> {
        let unit = [ONE];
        let or_unit = |v: &'_ [C64]| -> Vec<C64> {
            if v.is_empty() {
                unit.to_vec()
            } else {
                v.to_vec()
            }
        };
        let (ancilla, system, environment) =
            (or_unit(ancilla), or_unit(system), or_unit(environment));
        let (ancilla, system, environment) = (&ancilla[..], &system[..], &environment[..]);
        let qubits = |v: &[C64]| -> Result<usize> {
            if !v.len().is_power_of_two() {
                return Err(ZenoError::DimensionMismatch(format!(
                    "block of length {}",
                    v.len()
                )));
            }
            Ok(v.len().trailing_zeros() as usize)
        };
        let layout = RegisterLayout::new(qubits(ancilla)?, qubits(system)?, qubits(environment)?);
        let (da, ds) = (ancilla.len(), system.len());
        let mut amplitudes = vec![ZERO; da * ds * environment.len()];
        for (e, &ze) in environment.iter().enumerate() {
            for (s, &zs) in system.iter().enumerate() {
                for (a, &za) in ancilla.iter().enumerate() {
                    amplitudes[a + da * (s + ds * e)] = za * zs * ze;
                }
            }
        }
        Ok(Self { layout, amplitudes })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.num_qubits()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Rescales to unit norm. Returns the norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            for z in &mut self.amplitudes {
                *z /= n;
            }
        }
        n
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(ZenoError::LengthMismatch {
                expected: self.amplitudes.len(),
                actual: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(ZenoError::LengthMismatch {
                expected: self.amplitudes.len(),
                actual: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    pub fn apply(&self, op: &DenseOperator) -> Result<StateVector> {
        op.apply(self)
    }

    /// Projects the qubits `targets` onto `reference` (local bit `k` on
    /// `targets[k]`) and returns the unnormalized remainder on the other qubits,
    /// i.e. `(⟨reference| ⊗ 1) |self⟩`, indexed by the compressed index of the
    /// remaining qubits in increasing order.
    pub fn contract(&self, targets: &[usize], reference: &[C64]) -> Result<Vec<C64>> {
        check_targets(targets)?;
        let m = self.num_qubits();
        for &t in targets {
            if t >= m {
                return Err(ZenoError::QubitOutOfRange {
                    index: t,
                    num_qubits: m,
                });
            }
        }
        let expected = 1usize << targets.len();
        if reference.len() != expected {
            return Err(ZenoError::LengthMismatch {
                expected,
                actual: reference.len(),
            });
        }
        let rest: Vec<usize> = (0..m).filter(|q| !targets.contains(q)).collect();
        let t_off = local_offsets(targets);
        let r_off = local_offsets(&rest);
        Ok(r_off
            .iter()
            .map(|&ro| {
                t_off
                    .iter()
                    .zip(reference)
                    .map(|(&to, r)| r.conj() * self.amplitudes[ro + to])
                    .sum()
            })
            .collect())
    }

    /// Reduced density matrix of the qubits in `keep` (local bit `k` on `keep[k]`).
    pub fn reduced_density(&self, keep: &[usize]) -> Result<CMatrix> {
        check_targets(keep)?;
        let m = self.num_qubits();
        for &t in keep {
            if t >= m {
                return Err(ZenoError::QubitOutOfRange {
                    index: t,
                    num_qubits: m,
                });
            }
        }
        let rest: Vec<usize> = (0..m).filter(|q| !keep.contains(q)).collect();
        let k_off = local_offsets(keep);
        let r_off = local_offsets(&rest);
        let d = k_off.len();
        let mut rho = CMatrix::zeros(d, d);
        for &ro in &r_off {
            for (i, &ki) in k_off.iter().enumerate() {
                let zi = self.amplitudes[ro + ki];
                if zi == ZERO {
                    continue;
                }
                for (j, &kj) in k_off.iter().enumerate() {
                    rho[(i, j)] += zi * self.amplitudes[ro + kj].conj();
                }
            }
        }
        Ok(rho)
    }
}

fn check_basis(basis: &[Vec<C64>], num_targets: usize) -> Result<()> {
    let dim = 1usize << num_targets;
    if basis.len() != dim {
        return Err(ZenoError::DimensionMismatch(format!(
            "{} basis vectors for {} target qubits",
            basis.len(),
            num_targets
        )));
    }
    let mut defect: f64 = 0.0;
    for (i, u) in basis.iter().enumerate() {
        if u.len() != dim {
            return Err(ZenoError::LengthMismatch {
                expected: dim,
                actual: u.len(),
            });
        }
        for (j, v) in basis.iter().enumerate() {
            let dot: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
            let expected = if i == j { ONE } else { ZERO };
            defect = defect.max((dot - expected).norm());
        }
    }
    if defect > TOLERANCE {
        return Err(ZenoError::NotOrthonormal(defect));
    }
    Ok(())
}

/// Outcome of a projective measurement.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: usize,
    pub probability: f64,
    /// Born probability of every basis vector, in basis order.
    pub probabilities: Vec<f64>,
    /// Renormalized post-measurement state for the sampled outcome.
    pub post_state: StateVector,
}

/// Unnormalized projection `(|u⟩⟨u| ⊗ 1)|state⟩` onto one basis vector.
pub fn project_onto(state: &StateVector, targets: &[usize], u: &[C64]) -> Result<StateVector> {
    let rest_amps = state.contract(targets, u)?;
    let m = state.num_qubits();
    let rest: Vec<usize> = (0..m).filter(|q| !targets.contains(q)).collect();
    let t_off = local_offsets(targets);
    let r_off = local_offsets(&rest);
    let mut amplitudes = vec![ZERO; state.amplitudes.len()];
    for (&ro, &z) in r_off.iter().zip(&rest_amps) {
        for (&to, &ui) in t_off.iter().zip(u) {
            amplitudes[ro + to] = ui * z;
        }
    }
    StateVector::from_amplitudes(state.layout(), amplitudes)
}

/// Born probabilities of measuring `targets` in `basis`, without sampling.
pub fn outcome_probabilities(
    state: &StateVector,
    targets: &[usize],
    basis: &[Vec<C64>],
) -> Result<Vec<f64>> {
    check_basis(basis, targets.len())?;
    basis
        .iter()
        .map(|u| {
            Ok(state
                .contract(targets, u)?
                .iter()
                .map(|z| z.norm_sqr())
                .sum())
        })
        .collect()
}

/// Projective measurement of `targets` in an orthonormal `basis`, sampled
/// with a generator seeded from `seed`.
pub fn project_measure(
    state: &StateVector,
    targets: &[usize],
    basis: &[Vec<C64>],
    seed: u64,
) -> Result<Measurement> {
    let probabilities = outcome_probabilities(state, targets, basis)?;
    let total: f64 = probabilities.iter().sum();
    let draw = rng_from_seed(seed).random::<f64>() * total;
    let mut acc = 0.0;
    let mut outcome = probabilities.len() - 1;
    for (k, p) in probabilities.iter().enumerate() {
        acc += p;
        if draw < acc && *p > 0.0 {
            outcome = k;
            break;
        }
    }
    let mut post_state = project_onto(state, targets, &basis[outcome])?;
    post_state.normalize();
    Ok(Measurement {
        outcome,
        probability: probabilities[outcome],
        probabilities,
        post_state,
    })
}

/// `‖(|ref⟩⟨ref| ⊗ 1)|state⟩‖²`: the probability of finding the qubits
/// `targets` in `reference`.
pub fn overlap_probability(
    state: &StateVector,
    reference: &StateVector,
    targets: &[usize],
) -> Result<f64> {
    if reference.num_qubits() != targets.len() {
        return Err(ZenoError::DimensionMismatch(format!(
            "{}-qubit reference for {} target qubits",
            reference.num_qubits(),
            targets.len()
        )));
    }
    Ok(state
        .contract(targets, reference.amplitudes())?
        .iter()
        .map(|z| z.norm_sqr())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        let mut rng = rng_from_seed(seed);
        let a = CMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        (&a + a.adjoint()) * C64::new(0.5, 0.0)
    }

    #[test]
    fn identity_apply() {
        let s = StateVector::random_seeded(RegisterLayout::plain(3), 1);
        let id = DenseOperator::identity(vec![2, 0]).unwrap();
        assert_eq!(id.apply(&s).unwrap(), s);
    }

    #[test]
    fn x_on_qubit_zero_flips_low_bit() {
        let s = StateVector::zero(RegisterLayout::plain(4));
        let x = DenseOperator::from_pauli_string(&PauliString::new(vec![Pauli::X], 0), vec![0])
            .unwrap();
        let out = x.apply(&s).unwrap();
        assert_eq!(out.amplitudes()[1], ONE);
        let x3 = DenseOperator::from_pauli_string(&PauliString::new(vec![Pauli::X], 0), vec![3])
            .unwrap();
        assert_eq!(x3.apply(&s).unwrap().amplitudes()[8], ONE);
    }

    #[test]
    fn targets_order_is_respected() {
        // X on local bit 0, Z on local bit 1, placed on qubits [2, 0].
        let p = PauliString::new(vec![Pauli::X, Pauli::Z], 0);
        let op = DenseOperator::from_pauli_string(&p, vec![2, 0]).unwrap();
        let s = StateVector::basis(RegisterLayout::plain(3), 0b001).unwrap();
        let out = op.apply(&s).unwrap();
        assert_eq!(out.amplitudes()[0b101], -ONE);
    }

    #[test]
    fn rejects_bad_operators() {
        assert!(DenseOperator::new(CMatrix::identity(4, 4), vec![0]).is_err());
        assert!(matches!(
            DenseOperator::new(CMatrix::identity(4, 4), vec![1, 1]),
            Err(ZenoError::DuplicateTarget(1))
        ));
        let op = DenseOperator::identity(vec![5]).unwrap();
        assert!(op
            .apply(&StateVector::zero(RegisterLayout::plain(2)))
            .is_err());
        let nh = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(
            DenseOperator::hermitian(nh, vec![0]),
            Err(ZenoError::NotHermitian(_))
        ));
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = DenseOperator::hermitian(CMatrix::zeros(4, 4), vec![0, 1]).unwrap();
        let u = hermitian_exp(&h, 3.0).unwrap();
        assert!(max_abs(&(u.matrix() - CMatrix::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn exp_of_sigma_x_at_half_pi() {
        let h = DenseOperator::hermitian(pauli_matrix(Pauli::X), vec![0]).unwrap();
        let u = hermitian_exp(&h, FRAC_PI_2).unwrap();
        let expected = pauli_matrix(Pauli::X) * I;
        assert!(max_abs(&(u.matrix() - expected)) < 1e-12);
        assert!(u.is_unitary());
    }

    #[test]
    fn exp_matches_series_remainder_bound() {
        let hm = random_hermitian(8, 11);
        let t = 0.1;
        let h = DenseOperator::hermitian(hm.clone(), vec![0, 1, 2]).unwrap();
        let u = hermitian_exp(&h, t).unwrap();
        // Series oracle, summed to convergence.
        let ht = &hm * C64::new(0.0, t);
        let mut term = CMatrix::identity(8, 8);
        let mut series = CMatrix::identity(8, 8);
        for k in 1..60 {
            term = &term * &ht / C64::new(k as f64, 0.0);
            series += &term;
        }
        assert!(max_abs(&(u.matrix() - &series)) < 1e-12);
        let first_order = CMatrix::identity(8, 8) + &ht;
        let x = spectral_norm(&(&hm * C64::new(t, 0.0)));
        let remainder = spectral_norm(&(u.matrix() - first_order));
        assert!(remainder <= x * x * x.exp() / 2.0);
    }

    #[test]
    fn exp_forward_backward_is_identity() {
        let h = DenseOperator::hermitian(random_hermitian(16, 3), vec![0, 1, 2, 3]).unwrap();
        let f = hermitian_exp(&h, 0.7).unwrap();
        let b = hermitian_exp(&h, -0.7).unwrap();
        let p = f.compose(&b).unwrap();
        assert!(max_abs(&(p.matrix() - CMatrix::identity(16, 16))) < 1e-12);
    }

    #[test]
    fn measurement_of_eigenstate_is_certain() {
        let plus = C64::new(0.5, 0.0);
        let s = StateVector::product(&[plus; 4], &[ONE, ZERO], &[]).unwrap();
        let basis: Vec<Vec<C64>> = (0..4)
            .map(|b| {
                crate::pauli::tilde_state(b)
                    .unwrap()
                    .iter()
                    .map(|&x| C64::new(x, 0.0))
                    .collect()
            })
            .collect();
        let m = project_measure(&s, &[0, 1], &basis, 9).unwrap();
        assert_eq!(m.outcome, 0);
        assert!((m.probability - 1.0).abs() < 1e-12);
        assert!((m.post_state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_state_in_computational_basis() {
        let s = StateVector::product(&[C64::new(0.5, 0.0); 4], &[ONE], &[]).unwrap();
        let basis: Vec<Vec<C64>> = (0..4)
            .map(|k| (0..4).map(|j| if j == k { ONE } else { ZERO }).collect())
            .collect();
        let p = outcome_probabilities(&s, &[0, 1], &basis).unwrap();
        for x in p {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let s = StateVector::zero(RegisterLayout::plain(1));
        let basis = vec![vec![ONE, ZERO], vec![ONE, ONE]];
        assert!(matches!(
            project_measure(&s, &[0], &basis, 0),
            Err(ZenoError::NotOrthonormal(_))
        ));
    }

    #[test]
    fn measurement_sampling_is_seeded() {
        let s = StateVector::random_seeded(RegisterLayout::plain(3), 5);
        let basis: Vec<Vec<C64>> = vec![vec![ONE, ZERO], vec![ZERO, ONE]];
        let a = project_measure(&s, &[1], &basis, 42).unwrap();
        let b = project_measure(&s, &[1], &basis, 42).unwrap();
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.post_state, b.post_state);
        assert!((a.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_of_product_and_orthogonal() {
        let r = StateVector::random_seeded(RegisterLayout::plain(2), 3);
        let other = StateVector::random_seeded(RegisterLayout::plain(1), 4);
        let s = StateVector::product(r.amplitudes(), other.amplitudes(), &[]).unwrap();
        assert!((overlap_probability(&s, &r, &[0, 1]).unwrap() - 1.0).abs() < 1e-12);
        let zero = StateVector::zero(RegisterLayout::plain(1));
        let one = StateVector::basis(RegisterLayout::plain(1), 1).unwrap();
        let s = StateVector::product(one.amplitudes(), other.amplitudes(), &[]).unwrap();
        assert_eq!(overlap_probability(&s, &zero, &[0]).unwrap(), 0.0);
        assert!(overlap_probability(&s, &zero, &[0, 1]).is_err());
    }

    #[test]
    fn embed_matches_kron() {
        let p = PauliString::new(vec![Pauli::Y, Pauli::Z], 0);
        let op = DenseOperator::from_pauli_string(&p, vec![0, 1]).unwrap();
        let full = op.embed(2).unwrap();
        let expected = kron(&pauli_matrix(Pauli::Z), &pauli_matrix(Pauli::Y));
        assert!(max_abs(&(full - expected)) < 1e-15);
    }

    #[test]
    fn reduced_density_of_product_state() {
        let a = StateVector::random_seeded(RegisterLayout::plain(1), 1);
        let b = StateVector::random_seeded(RegisterLayout::plain(2), 2);
        let s = StateVector::product(a.amplitudes(), b.amplitudes(), &[]).unwrap();
        let rho = s.reduced_density(&[0]).unwrap();
        let amps = a.amplitudes();
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho[(i, j)] - amps[i] * amps[j].conj()).norm() < 1e-12);
            }
        }
    }
}
