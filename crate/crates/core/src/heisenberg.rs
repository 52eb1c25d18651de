//! Operator-level checks of the conditional-flip construction for one system
//! qubit.
//!
//! Matrices here use plain Kronecker order `H1 ⊗ H2 ⊗ H3`, with `H1, H2` the
//! ancilla qubits and `H3` the system qubit. Ancilla label `a = 2·h1 + h2`
//! coincides with the code's label when `H1` is ancilla qubit 1 and `H2` is
//! ancilla qubit 0 of the register.

use serde::{Deserialize, Serialize};

use crate::code::build_code;
use crate::error::{Result, ZenoError};
use crate::noise::NoiseModel;
use crate::pauli::Pauli;
use crate::statevec::{
    hermitian_exp, kron, max_abs, pauli_matrix, CMatrix, DenseOperator, RegisterLayout,
    StateVector, C64, ONE, ZERO,
};

/// Controlled Pauli `|0⟩⟨0|_c ⊗ 1 + |1⟩⟨1|_c ⊗ σ_letter` on a register of
/// `num_qubits` qubits in Kronecker order (qubit 1 is the leftmost factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionalFlip {
    pub control: usize,
    pub target: usize,
    pub letter: Pauli,
}

impl ConditionalFlip {
    pub fn new(control: usize, target: usize, letter: Pauli) -> Result<Self> {
        if control == target || control == 0 || target == 0 {
            return Err(ZenoError::Contract(format!(
                "invalid conditional flip {control}->{target}"
            )));
        }
        if letter == Pauli::I {
            return Err(ZenoError::Contract(
                "conditional flip needs a non-identity letter".into(),
            ));
        }
        Ok(Self {
            control,
            target,
            letter,
        })
    }

    pub fn matrix(&self, num_qubits: usize) -> CMatrix {
        let p0 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let p1 = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        let id = CMatrix::identity(2, 2);
        let factors = |ctrl: &CMatrix, tgt: &CMatrix| -> CMatrix {
            (1..=num_qubits).fold(CMatrix::identity(1, 1), |acc, q| {
                let f = if q == self.control {
                    ctrl
                } else if q == self.target {
                    tgt
                } else {
                    &id
                };
                kron(&acc, f)
            })
        };
        factors(&p0, &id) + factors(&p1, &pauli_matrix(self.letter))
    }
}

/// Kronecker product of one letter per qubit, leftmost first.
pub fn pauli_product(letters: &[Pauli]) -> CMatrix {
    letters.iter().fold(CMatrix::identity(1, 1), |acc, &p| {
        kron(&acc, &pauli_matrix(p))
    })
}

/// `C = C_y^{1,3} C_z^{2,3}` on `H1 ⊗ H2 ⊗ H3`.
pub fn conditional_flip_encoder() -> CMatrix {
    let cy = ConditionalFlip {
        control: 1,
        target: 3,
        letter: Pauli::Y,
    }
    .matrix(3);
    let cz = ConditionalFlip {
        control: 2,
        target: 3,
        letter: Pauli::Z,
    }
    .matrix(3);
    cy * cz
}

/// `|in⟩ = |↑_x, ↑_x⟩` as four amplitudes.
pub fn in_state_x_up() -> [C64; 4] {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let plus = [h, h];
    [
        plus[0] * plus[0],
        plus[0] * plus[1],
        plus[1] * plus[0],
        plus[1] * plus[1],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Computed value differs from the stated one; the computed value is used.
    Discrepancy,
}

/// One checked identity: `{identity, status, max_defect}` plus a free-text note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub status: Status,
    pub max_defect: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl IdentityReport {
    pub fn check(identity: impl Into<String>, max_defect: f64, tolerance: f64) -> Self {
        let status = if max_defect <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            identity: identity.into(),
            status,
            max_defect,
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

pub const EXACT: f64 = 1e-12;

fn letter_name(p: Pauli) -> &'static str {
    match p {
        Pauli::I => "1",
        Pauli::X => "σx",
        Pauli::Y => "σy",
        Pauli::Z => "σz",
    }
}

/// `C_a σ_b C_a` on two qubits against `1⊗σ_b` (a = b) or `σ_z⊗σ_b` (a ≠ b).
pub fn verify_flip_conjugation(a: Pauli, b: Pauli) -> Result<IdentityReport> {
    if a == Pauli::I || b == Pauli::I {
        return Err(ZenoError::Contract(
            "flip conjugation takes letters x, y, z".into(),
        ));
    }
    let c = ConditionalFlip::new(1, 2, a)?.matrix(2);
    let conj = &c * pauli_product(&[Pauli::I, b]) * &c;
    let ancilla = if a == b { Pauli::I } else { Pauli::Z };
    let expected = pauli_product(&[ancilla, b]);
    Ok(IdentityReport::check(
        format!(
            "C_{f} (1⊗{}) C_{f} = {}⊗{}",
            letter_name(b),
            letter_name(ancilla),
            letter_name(b),
            f = a.to_string().to_lowercase()
        ),
        max_abs(&(conj - expected)),
        EXACT,
    ))
}

/// Expansion of an 8x8 operator as `phase · P1⊗P2⊗P3` when it is a single
/// Pauli product; `None` otherwise.
pub fn decompose_pauli_product(m: &CMatrix) -> Option<(C64, [Pauli; 3])> {
    let dim = m.nrows() as f64;
    for p1 in Pauli::ALL {
        for p2 in Pauli::ALL {
            for p3 in Pauli::ALL {
                let p = pauli_product(&[p1, p2, p3]);
                let coeff = (p.adjoint() * m).trace() / dim;
                if (coeff.norm() - 1.0).abs() < 1e-9 && max_abs(&(m - &p * coeff)) < 1e-9 {
                    return Some((coeff, [p1, p2, p3]));
                }
            }
        }
    }
    None
}

/// `C (1⊗σ_b) C†` for the conditional-flip encoder.
pub fn heisenberg_image(b: Pauli) -> CMatrix {
    let c = conditional_flip_encoder();
    &c * pauli_product(&[Pauli::I, Pauli::I, b]) * c.adjoint()
}

/// The three Heisenberg-picture images of the system Paulis. Lines for
/// `σ_x` and `σ_y` are asserted against their stated forms; the `σ_z` line
/// is resolved by computation and compared with the stated `(σ_z⊗1)⊗σ_x`.
pub fn verify_heisenberg_images() -> Vec<IdentityReport> {
    let stated = [
        (Pauli::X, [Pauli::Z, Pauli::Z, Pauli::X]),
        (Pauli::Y, [Pauli::I, Pauli::Z, Pauli::Y]),
        (Pauli::Z, [Pauli::Z, Pauli::I, Pauli::X]),
    ];
    stated
        .iter()
        .map(|&(b, form)| {
            let image = heisenberg_image(b);
            let defect = max_abs(&(&image - pauli_product(&form)));
            let name = format!(
                "C(1⊗{})C† = ({}⊗{})⊗{}",
                letter_name(b),
                letter_name(form[0]),
                letter_name(form[1]),
                letter_name(form[2])
            );
            if b != Pauli::Z {
                return IdentityReport::check(name, defect, EXACT);
            }
            match decompose_pauli_product(&image) {
                Some((phase, computed)) => {
                    let resolved = max_abs(&(&image - pauli_product(&computed) * phase));
                    let mut r = IdentityReport::check(name, resolved, EXACT).with_detail(format!(
                        "computed ({}⊗{})⊗{} with phase {:+}; stated form is off by {:.1}",
                        letter_name(computed[0]),
                        letter_name(computed[1]),
                        letter_name(computed[2]),
                        phase,
                        defect
                    ));
                    if defect > EXACT && r.status == Status::Pass {
                        r.status = Status::Discrepancy;
                    }
                    r
                }
                None => IdentityReport::check(name, defect, EXACT)
                    .with_detail("image is not a Pauli product"),
            }
        })
        .collect()
}

/// `Σ_a` read off from `C σ_a C† = Σ_a ⊗ σ_a`, with `Σ_0 = 1`.
pub fn sigma_operator(a: Pauli) -> CMatrix {
    if a == Pauli::I {
        return CMatrix::identity(4, 4);
    }
    let image = heisenberg_image(a);
    // Contract the system factor: Σ = (1/2) tr_sys[(1 ⊗ σ_a) image].
    let full = pauli_product(&[Pauli::I, Pauli::I, a]) * image;
    CMatrix::from_fn(4, 4, |r, c| {
        (full[(2 * r, 2 * c)] + full[(2 * r + 1, 2 * c + 1)]) * 0.5
    })
}

/// Compact-form check `C σ_a C† = Σ_a ⊗ σ_a`, plus `Σ_a` diagonal with square one.
pub fn verify_sigma_compact_form() -> Vec<IdentityReport> {
    Pauli::ALL
        .iter()
        .map(|&a| {
            let sigma = sigma_operator(a);
            let image = if a == Pauli::I {
                CMatrix::identity(8, 8)
            } else {
                heisenberg_image(a)
            };
            let compact = max_abs(&(image - kron(&sigma, &pauli_matrix(a))));
            let off_diag = max_abs(&CMatrix::from_fn(4, 4, |r, c| {
                if r == c {
                    ZERO
                } else {
                    sigma[(r, c)]
                }
            }));
            let square = max_abs(&(&sigma * &sigma - CMatrix::identity(4, 4)));
            IdentityReport::check(
                format!(
                    "C {} C† = Σ_{}⊗{} (Σ diagonal, Σ² = 1)",
                    letter_name(a),
                    a.label(),
                    letter_name(a)
                ),
                compact.max(off_diag).max(square),
                EXACT,
            )
        })
        .collect()
}

/// `⟨in|Σ_a|in⟩` with `|in⟩ = |↑_x, ↑_x⟩`.
pub fn sigma_expectation(a: Pauli) -> f64 {
    let v = nalgebra::DVector::from_column_slice(&in_state_x_up());
    (v.adjoint() * sigma_operator(a) * &v)[(0, 0)].re
}

/// How the conditional-flip encoder acts on each ancilla branch, next to the
/// code's encoder: `(label, code letter, flip letter, flip phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchComparison {
    pub ancilla_label: usize,
    pub code_letter: Pauli,
    pub flip_letter: Pauli,
    pub flip_phase: C64,
}

/// Per-branch system operator of `C_y^{1,3} C_z^{2,3}`, compared with the
/// code's `σ_a` on the same ancilla label.
pub fn compare_branches() -> Vec<BranchComparison> {
    let c = conditional_flip_encoder();
    (0..4)
        .map(|a| {
            let block = CMatrix::from_fn(2, 2, |r, s| c[(2 * a + r, 2 * a + s)]);
            let (flip_phase, flip_letter) = Pauli::ALL
                .iter()
                .find_map(|&p| {
                    let coeff = (pauli_matrix(p).adjoint() * &block).trace() * 0.5;
                    ((coeff.norm() - 1.0).abs() < 1e-9
                        && max_abs(&(&block - pauli_matrix(p) * coeff)) < 1e-9)
                        .then_some((coeff, p))
                })
                .expect("each branch is a phased Pauli");
            BranchComparison {
                ancilla_label: a,
                code_letter: Pauli::ALL[a],
                flip_letter,
                flip_phase,
            }
        })
        .collect()
}

/// The conditional-flip encoder on the ancilla|system qubits of a code register.
/// `H3` sits on register qubit 2, `H2` on qubit 0 and `H1` on qubit 1.
pub fn conditional_flip_encoder_on_register() -> Result<DenseOperator> {
    DenseOperator::unitary(conditional_flip_encoder(), vec![2, 0, 1])
}

/// Largest difference in any syndrome probability between the code's encoder
/// and the conditional-flip encoder, for one noisy cycle on `psi`.
///
/// The conditional-flip run encodes with `C†`, decodes with `C`, and measures
/// in the basis `{Σ_b|in⟩}` so that outcome `b` means the same letter in both.
pub fn syndrome_agreement(model: &NoiseModel, psi: &StateVector) -> Result<f64> {
    if model.n() != 1 || psi.num_qubits() != 1 {
        return Err(ZenoError::DimensionMismatch(
            "syndrome agreement is defined for one system qubit".into(),
        ));
    }
    let code = build_code(1)?;
    let layout = RegisterLayout::new(2, 1, 1);
    let start = StateVector::product(code.in_state(), psi.amplitudes(), &[ONE, ZERO])?;
    let u = model.propagator(layout)?;

    let ours = code.decode(&u.apply(&code.encode(&start)?)?)?;
    let p_code = code.syndrome_probabilities(&ours)?;

    let flip = conditional_flip_encoder_on_register()?;
    let theirs = flip.apply(&u.apply(&flip.adjoint().apply(&start)?)?)?;
    let in_vec = nalgebra::DVector::from_column_slice(&in_state_x_up());
    let basis: Vec<Vec<C64>> = Pauli::ALL
        .iter()
        .map(|&b| (sigma_operator(b) * &in_vec).iter().copied().collect())
        .collect();
    let p_flip = crate::statevec::outcome_probabilities(&theirs, &[0, 1], &basis)?;
    Ok(p_code
        .iter()
        .zip(&p_flip)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Distance (Frobenius) between the post-selected noise operator
/// `⟨in|C N C|in⟩` on system⊗environment and `exp(iε Σ_i A^{i,0}) ⊗ 1_sys`.
pub fn effective_noise_check(model: &NoiseModel, epsilon: f64) -> Result<f64> {
    let n = model.n();
    let code = build_code(n)?;
    let full = RegisterLayout::new(2, n, n);
    let model = model.with_epsilon(epsilon);
    let u = model.propagator(full)?;
    let rest = 1usize << (2 * n);
    let mut conditioned = CMatrix::zeros(rest, rest);
    for col in 0..rest {
        // |in⟩ ⊗ |col⟩ on system|environment.
        let mut amps = vec![ZERO; 4 * rest];
        for (a, &z) in code.in_state().iter().enumerate() {
            amps[a + 4 * col] = z;
        }
        let s = StateVector::from_amplitudes(full, amps)?;
        let out = code.decode(&u.apply(&code.encode(&s)?)?)?;
        for (row, z) in code.contract_in(&out)?.into_iter().enumerate() {
            conditioned[(row, col)] = z;
        }
    }
    let harmless = model
        .restricted_to(&[Pauli::I])
        .propagator(RegisterLayout::new(0, n, n))?;
    Ok((conditioned - harmless.matrix()).norm())
}

/// `exp(iεA)` for a single hermitian 2x2 coupling, exposed for tests.
pub fn coupling_exponential(a: &CMatrix, epsilon: f64) -> Result<CMatrix> {
    Ok(hermitian_exp(&DenseOperator::hermitian(a.clone(), vec![0])?, epsilon)?.into_matrix())
}
