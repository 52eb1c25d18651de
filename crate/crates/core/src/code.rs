//! The two-ancilla encoder and its syndrome measurement.
//!
//! Ancilla label `a` is the integer value of the two ancilla qubits
//! (`a = q0 + 2 q1`), so `a = 1 ↔ |01⟩`, `a = 2 ↔ |10⟩` written `|q1 q0⟩`.

use crate::error::{Result, ZenoError};
use crate::pauli::{CoefficientTable, Pauli};
use crate::statevec::{
    kron_little_endian, outcome_probabilities, pauli_matrix, project_measure, project_onto,
    CMatrix, DenseOperator, StateVector, C64,
};
use crate::ANCILLA_QUBITS;

pub const MIN_SYSTEM_QUBITS: usize = 1;
pub const MAX_SYSTEM_QUBITS: usize = 6;

/// The code for `n` system qubits. Immutable once built.
#[derive(Debug, Clone)]
pub struct ZenoCode {
    n: usize,
    encoder: DenseOperator,
    in_state: [C64; 4],
    tilde_basis: Vec<Vec<C64>>,
    coefficients: CoefficientTable,
}

/// Result of measuring the ancilla in the tilde basis.
#[derive(Debug, Clone)]
pub struct Syndrome {
    /// Detected error letter; `Pauli::I` means no error detected.
    pub outcome: Pauli,
    pub probability: f64,
    /// Probability of each outcome `b = 0..3`.
    pub probabilities: [f64; 4],
    pub post_state: StateVector,
}

impl Syndrome {
    pub fn error_detected(&self) -> bool {
        self.outcome != Pauli::I
    }
}

/// Builds the encoder `Σ_a |a⟩⟨a| ⊗ ∏_i σ_a^i` for `n` system qubits.
pub fn build_code(n: usize) -> Result<ZenoCode> {
    if !(MIN_SYSTEM_QUBITS..=MAX_SYSTEM_QUBITS).contains(&n) {
        return Err(ZenoError::SizeOutOfRange {
            n,
            min: MIN_SYSTEM_QUBITS,
            max: MAX_SYSTEM_QUBITS,
        });
    }
    let sys_dim = 1usize << n;
    let dim = 4 * sys_dim;
    let mut m = CMatrix::zeros(dim, dim);
    for a in Pauli::ALL {
        let block = kron_little_endian(&vec![pauli_matrix(a); n]);
        let a = a as usize;
        for r in 0..sys_dim {
            for c in 0..sys_dim {
                m[(a + 4 * r, a + 4 * c)] = block[(r, c)];
            }
        }
    }
    let encoder = DenseOperator::unitary(m, (0..ANCILLA_QUBITS + n).collect())?;
    let coefficients = CoefficientTable::new();
    let tilde_basis: Vec<Vec<C64>> = Pauli::ALL
        .iter()
        .map(|&b| {
            coefficients
                .column(b)
                .iter()
                .map(|&c| C64::new(0.5 * f64::from(c), 0.0))
                .collect()
        })
        .collect();
    let in_state = [C64::new(0.5, 0.0); 4];
    Ok(ZenoCode {
        n,
        encoder,
        in_state,
        tilde_basis,
        coefficients,
    })
}

impl ZenoCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encoder(&self) -> &DenseOperator {
        &self.encoder
    }

    pub fn in_state(&self) -> &[C64; 4] {
        &self.in_state
    }

    /// `|b̃⟩` for `b = 0..3`, as amplitudes over the ancilla labels.
    pub fn tilde_basis(&self) -> &[Vec<C64>] {
        &self.tilde_basis
    }

    pub fn coefficients(&self) -> &CoefficientTable {
        &self.coefficients
    }

    pub fn ancilla_qubits(&self) -> [usize; ANCILLA_QUBITS] {
        [0, 1]
    }

    /// `|in⟩ ⊗ |ψ⟩` on the ancilla|system register.
    pub fn prepare(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.num_qubits() != self.n {
            return Err(ZenoError::DimensionMismatch(format!(
                "{}-qubit state for an n = {} code",
                psi.num_qubits(),
                self.n
            )));
        }
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(ZenoError::NotNormalized(norm));
        }
        StateVector::product(&self.in_state, psi.amplitudes(), &[])
    }

    fn check_register(&self, state: &StateVector) -> Result<()> {
        let layout = state.layout();
        if layout.ancilla != ANCILLA_QUBITS || layout.system != self.n {
            return Err(ZenoError::DimensionMismatch(format!(
                "register {:?} does not hold {} ancilla and {} system qubits",
                layout, ANCILLA_QUBITS, self.n
            )));
        }
        Ok(())
    }

    /// Applies the encoder to the ancilla|system block; any environment block is untouched.
    pub fn encode(&self, state: &StateVector) -> Result<StateVector> {
        self.check_register(state)?;
        self.encoder.apply(state)
    }

    /// The encoder is a hermitian involution, so decoding applies it again.
    pub fn decode(&self, state: &StateVector) -> Result<StateVector> {
        self.encode(state)
    }

    /// Exact probability of each syndrome outcome `b = 0..3`.
    pub fn syndrome_probabilities(&self, state: &StateVector) -> Result<[f64; 4]> {
        self.check_register(state)?;
        let p = outcome_probabilities(state, &self.ancilla_qubits(), &self.tilde_basis)?;
        Ok([p[0], p[1], p[2], p[3]])
    }

    /// Measures the ancilla in the tilde basis. Outcomes `b ≠ 0` are reported,
    /// never corrected.
    pub fn syndrome_measure(&self, state: &StateVector, seed: u64) -> Result<Syndrome> {
        self.check_register(state)?;
        let m = project_measure(state, &self.ancilla_qubits(), &self.tilde_basis, seed)?;
        Ok(Syndrome {
            outcome: Pauli::from_label(m.outcome as u8)?,
            probability: m.probability,
            probabilities: [
                m.probabilities[0],
                m.probabilities[1],
                m.probabilities[2],
                m.probabilities[3],
            ],
            post_state: m.post_state,
        })
    }

    /// Unnormalized post-selection on outcome 0: `(|in⟩⟨in| ⊗ 1)|state⟩`.
    pub fn postselect_success(&self, state: &StateVector) -> Result<StateVector> {
        self.check_register(state)?;
        project_onto(state, &self.ancilla_qubits(), &self.in_state)
    }

    /// `(⟨in| ⊗ 1)|state⟩` as amplitudes on the remaining system|environment qubits.
    pub fn contract_in(&self, state: &StateVector) -> Result<Vec<C64>> {
        self.check_register(state)?;
        state.contract(&self.ancilla_qubits(), &self.in_state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::statevec::{kron, max_abs, overlap_probability, RegisterLayout, ONE, ZERO};

    fn nonzero_support(amps: &[C64]) -> Vec<usize> {
        amps.iter()
            .enumerate()
            .filter(|(_, z)| **z != ZERO)
            .map(|(i, _)| i)
            .collect()
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            build_code(0),
            Err(ZenoError::SizeOutOfRange { n: 0, .. })
        ));
        assert!(build_code(7).is_err());
        assert_eq!(build_code(3).unwrap().encoder().dim(), 32);
    }

    #[test]
    fn encoder_is_hermitian_unitary_involution() {
        for n in 1..=4 {
            let code = build_code(n).unwrap();
            let c = code.encoder();
            assert!(c.is_hermitian() && c.is_unitary());
            let sq = c.compose(c).unwrap();
            let d = sq.dim();
            assert!(max_abs(&(sq.matrix() - CMatrix::identity(d, d))) < 1e-12);
        }
    }

    #[test]
    fn n2_entries_match_kron_construction() {
        let code = build_code(2).unwrap();
        let c = code.encoder().matrix();
        for a in Pauli::ALL {
            // Oracle: the system block for label a is σ_a ⊗ σ_a.
            let block = kron(&pauli_matrix(a), &pauli_matrix(a));
            for r in 0..4 {
                for s in 0..4 {
                    assert_eq!(c[(a as usize + 4 * r, a as usize + 4 * s)], block[(r, s)]);
                    for a2 in 0..4 {
                        if a2 != a as usize {
                            assert_eq!(c[(a2 + 4 * r, a as usize + 4 * s)], ZERO);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prepare_basis_state() {
        let code = build_code(2).unwrap();
        let psi = StateVector::zero(RegisterLayout::plain(2));
        let s = code.prepare(&psi).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert_eq!(nonzero_support(s.amplitudes()), vec![0, 1, 2, 3]);
        for a in 0..4 {
            assert_eq!(s.amplitudes()[a], C64::new(0.5, 0.0));
        }
        assert!(code
            .prepare(&StateVector::zero(RegisterLayout::plain(3)))
            .is_err());
        let unnormalized =
            StateVector::from_amplitudes(RegisterLayout::plain(2), vec![ONE, ONE, ZERO, ZERO])
                .unwrap();
        assert!(matches!(
            code.prepare(&unnormalized),
            Err(ZenoError::NotNormalized(_))
        ));
    }

    #[test]
    fn encoded_state_has_equal_branch_weights() {
        let code = build_code(2).unwrap();
        let psi = StateVector::random_seeded(RegisterLayout::plain(2), 21);
        let enc = code.encode(&code.prepare(&psi).unwrap()).unwrap();
        for a in 0..4 {
            let basis = StateVector::basis(RegisterLayout::plain(2), a).unwrap();
            let w = overlap_probability(&enc, &basis, &[0, 1]).unwrap();
            assert!((w - 0.25).abs() < 1e-12);
        }
        // Branch a holds (1/2) σ_a⊗σ_a |ψ⟩.
        for a in Pauli::ALL {
            let op = DenseOperator::from_pauli_string(&PauliString::new(vec![a, a], 0), vec![0, 1])
                .unwrap();
            let branch = op.apply(&psi).unwrap();
            for s in 0..4 {
                let z = enc.amplitudes()[a as usize + 4 * s];
                assert!((z - branch.amplitudes()[s] * 0.5).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn decode_inverts_encode() {
        let code = build_code(3).unwrap();
        let s = StateVector::random_seeded(RegisterLayout::new(2, 3, 3), 8);
        let back = code.decode(&code.encode(&s).unwrap()).unwrap();
        assert!(back.distance(&s).unwrap() < 1e-12);
        assert!(code
            .encode(&StateVector::zero(RegisterLayout::new(2, 2, 0)))
            .is_err());
    }

    #[test]
    fn undisturbed_state_has_no_syndrome() {
        let code = build_code(2).unwrap();
        let psi = StateVector::random_seeded(RegisterLayout::plain(2), 4);
        let s = code
            .decode(&code.encode(&code.prepare(&psi).unwrap()).unwrap())
            .unwrap();
        let syn = code.syndrome_measure(&s, 1).unwrap();
        assert_eq!(syn.outcome, Pauli::I);
        assert!(!syn.error_detected());
        assert!((syn.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_error_lands_on_its_tilde_state() {
        for n in 1..=3 {
            let code = build_code(n).unwrap();
            let psi = StateVector::random_seeded(RegisterLayout::plain(n), 40 + n as u64);
            for b in Pauli::ALL {
                for j in 0..n {
                    let enc = code.encode(&code.prepare(&psi).unwrap()).unwrap();
                    let err = DenseOperator::from_pauli_string(
                        &PauliString::single(n, j, b).unwrap(),
                        (2..2 + n).collect(),
                    )
                    .unwrap();
                    let dec = code.decode(&err.apply(&enc).unwrap()).unwrap();
                    let p = code.syndrome_probabilities(&dec).unwrap();
                    assert!(
                        (p[b as usize] - 1.0).abs() < 1e-12,
                        "n={n} b={b} j={j}: {p:?}"
                    );
                    // And the system holds σ_b^j |ψ⟩.
                    let flipped = DenseOperator::from_pauli_string(
                        &PauliString::single(n, j, b).unwrap(),
                        (0..n).collect(),
                    )
                    .unwrap()
                    .apply(&psi)
                    .unwrap();
                    let tilde: Vec<C64> = code.tilde_basis()[b as usize].clone();
                    let reference =
                        StateVector::product(&tilde, flipped.amplitudes(), &[]).unwrap();
                    let f = overlap_probability(&dec, &reference, &(0..2 + n).collect::<Vec<_>>())
                        .unwrap();
                    assert!((f - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tilde_basis_is_joint_sigma_x_eigenbasis() {
        let code = build_code(1).unwrap();
        let x0 = DenseOperator::from_pauli_string(
            &PauliString::new(vec![Pauli::X, Pauli::I], 0),
            vec![0, 1],
        )
        .unwrap();
        let x1 = DenseOperator::from_pauli_string(
            &PauliString::new(vec![Pauli::I, Pauli::X], 0),
            vec![0, 1],
        )
        .unwrap();
        for t in code.tilde_basis() {
            let s = StateVector::from_amplitudes(RegisterLayout::plain(2), t.clone()).unwrap();
            for op in [&x0, &x1] {
                let image = op.apply(&s).unwrap();
                let ev = s.inner(&image).unwrap();
                assert!((ev.norm() - 1.0).abs() < 1e-12);
                assert!((ev.im).abs() < 1e-15);
            }
        }
        assert_eq!(code.tilde_basis()[0].as_slice(), code.in_state());
    }
}
