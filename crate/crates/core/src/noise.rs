//! Independent per-qubit coupling to an environment.
//!
//! System qubit `i` couples to its own environment qubit through
//! `H = Σ_{i,b} σ_b^{s_i} ⊗ A^{i,b}`, and a noise step of strength `ε` is
//! `exp(+iεH)`. The overall energy scale and its sign are folded into `ε`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::pauli::Pauli;
use crate::rng_from_seed;
use crate::statevec::{
    hermitian_exp, hermiticity_defect, kron, pauli_matrix, spectral_norm, CMatrix, DenseOperator,
    RegisterLayout, StateVector, C64, I, ONE, TOLERANCE,
};

/// A 2x2 hermitian environment operator, stored row-major as real and
/// imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub re: [f64; 4],
    pub im: [f64; 4],
}

impl Coupling {
    pub const ZERO: Coupling = Coupling {
        re: [0.0; 4],
        im: [0.0; 4],
    };

    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        if m.nrows() != 2 || m.ncols() != 2 {
            return Err(ZenoError::DimensionMismatch(format!(
                "{}x{} coupling",
                m.nrows(),
                m.ncols()
            )));
        }
        let entries = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
        Ok(Self {
            re: entries.map(|z| z.re),
            im: entries.map(|z| z.im),
        })
    }

    pub fn from_pauli(p: Pauli) -> Self {
        Self::from_matrix(&pauli_matrix(p)).expect("2x2")
    }

    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(2, 2, |r, c| {
            C64::new(self.re[2 * r + c], self.im[2 * r + c])
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            re: self.re.map(|x| x * factor),
            im: self.im.map(|x| x * factor),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().chain(&self.im).all(|&x| x == 0.0)
    }
}

/// Couplings `A^{i,b}` for every system qubit `i` and letter `b`, plus the
/// dimensionless strength `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    n: usize,
    epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// `couplings[i][b]`.
    couplings: Vec<[Coupling; 4]>,
}

impl NoiseModel {
    /// Validates hermiticity and `‖A‖ ≤ 1` for every coupling.
    pub fn new(n: usize, couplings: Vec<[Coupling; 4]>, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(ZenoError::SizeOutOfRange {
                n,
                min: 1,
                max: usize::MAX,
            });
        }
        if couplings.len() != n {
            return Err(ZenoError::LengthMismatch {
                expected: n,
                actual: couplings.len(),
            });
        }
        if !epsilon.is_finite() {
            return Err(ZenoError::Contract(format!(
                "epsilon must be finite, got {epsilon}"
            )));
        }
        for (i, row) in couplings.iter().enumerate() {
            for (b, a) in row.iter().enumerate() {
                let m = a.matrix();
                let defect = hermiticity_defect(&m);
                if defect > TOLERANCE {
                    return Err(ZenoError::NotHermitian(defect));
                }
                let norm = spectral_norm(&m);
                if norm > 1.0 + TOLERANCE {
                    return Err(ZenoError::Contract(format!(
                        "coupling A^({i},{b}) has norm {norm} > 1"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            epsilon,
            seed: None,
            couplings,
        })
    }

    /// All couplings zero.
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, vec![[Coupling::ZERO; 4]; n], 0.0)
    }

    /// Seeded random hermitian couplings, each normalized to spectral norm 1.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let mut couplings = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = [Coupling::ZERO; 4];
            for slot in &mut row {
                let mut g = || -> f64 { rng.sample(StandardNormal) };
                let (d0, d1, re, im) = (g(), g(), g(), g());
                let m = CMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new(d0, 0.0),
                        C64::new(re, im),
                        C64::new(re, -im),
                        C64::new(d1, 0.0),
                    ],
                );
                let norm = spectral_norm(&m);
                *slot = Coupling::from_matrix(&(m / C64::new(norm, 0.0)))?;
            }
            couplings.push(row);
        }
        let mut model = Self::new(n, couplings, 0.0)?;
        model.seed = Some(seed);
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn coupling(&self, qubit: usize, letter: Pauli) -> &Coupling {
        &self.couplings[qubit][letter as usize]
    }

    pub fn couplings(&self) -> &[[Coupling; 4]] {
        &self.couplings
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    /// Replaces one coupling, re-validating it.
    pub fn with_coupling(&self, qubit: usize, letter: Pauli, coupling: Coupling) -> Result<Self> {
        if qubit >= self.n {
            return Err(ZenoError::QubitOutOfRange {
                index: qubit,
                num_qubits: self.n,
            });
        }
        let mut couplings = self.couplings.clone();
        couplings[qubit][letter as usize] = coupling;
        let mut m = Self::new(self.n, couplings, self.epsilon)?;
        m.seed = self.seed;
        Ok(m)
    }

    /// Keeps only the couplings whose letter is in `letters`.
    pub fn restricted_to(&self, letters: &[Pauli]) -> Self {
        let couplings = self
            .couplings
            .iter()
            .map(|row| {
                let mut r = *row;
                for b in Pauli::ALL {
                    if !letters.contains(&b) {
                        r[b as usize] = Coupling::ZERO;
                    }
                }
                r
            })
            .collect();
        Self {
            couplings,
            ..self.clone()
        }
    }

    /// Every coupling multiplied by `factor`; fails if a norm would exceed 1.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let couplings = self
            .couplings
            .iter()
            .map(|row| row.map(|a| a.scaled(factor)))
            .collect();
        let mut m = Self::new(self.n, couplings, self.epsilon)?;
        m.seed = self.seed;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("noise model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: NoiseModel = serde_json::from_str(text)
            .map_err(|e| ZenoError::Contract(format!("invalid noise model JSON: {e}")))?;
        let mut m = Self::new(raw.n, raw.couplings, raw.epsilon)?;
        m.seed = raw.seed;
        Ok(m)
    }

    /// `Σ_{i,b} σ_b^{s_i} ⊗ A^{i,b}` on a `2n`-qubit register: local qubits
    /// `0..n` are the system, `n..2n` the environment.
    pub fn hamiltonian_matrix(&self) -> CMatrix {
        let n = self.n;
        let dim = 1usize << (2 * n);
        let mut h = CMatrix::zeros(dim, dim);
        for (i, row) in self.couplings.iter().enumerate() {
            for b in Pauli::ALL {
                let a = &row[b as usize];
                if a.is_zero() {
                    continue;
                }
                // Local bit 0 is the system qubit, bit 1 the environment qubit.
                let term = kron(&a.matrix(), &pauli_matrix(b));
                let op = DenseOperator::new(term, vec![i, n + i]).expect("two distinct targets");
                h += op.embed(2 * n).expect("targets inside register");
            }
        }
        h
    }

    /// The hamiltonian placed on the system and environment qubits of `layout`.
    pub fn build_hamiltonian(&self, layout: RegisterLayout) -> Result<DenseOperator> {
        DenseOperator::hermitian(self.hamiltonian_matrix(), self.noise_targets(layout)?)
    }

    fn noise_targets(&self, layout: RegisterLayout) -> Result<Vec<usize>> {
        if layout.system != self.n || layout.environment != self.n {
            return Err(ZenoError::DimensionMismatch(format!(
                "register {layout:?} lacks {} system and environment qubits",
                self.n
            )));
        }
        let mut targets = layout.system_qubits();
        targets.extend(layout.environment_qubits());
        Ok(targets)
    }

    /// `exp(iεH)` on the system and environment qubits of `layout`.
    pub fn propagator(&self, layout: RegisterLayout) -> Result<DenseOperator> {
        hermitian_exp(&self.build_hamiltonian(layout)?, self.epsilon)
    }

    /// `1 + iεH` on the system and environment qubits of `layout`.
    pub fn first_order_operator(&self, layout: RegisterLayout) -> Result<DenseOperator> {
        let h = self.hamiltonian_matrix();
        let d = h.nrows();
        DenseOperator::new(
            CMatrix::identity(d, d) + h * (I * self.epsilon),
            self.noise_targets(layout)?,
        )
    }
}

/// `|0…0⟩` on `n` environment qubits.
pub fn environment_ground(n: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    v[0] = ONE;
    v
}

/// Exact evolution `exp(iεH)` of the system and environment; ancilla untouched.
pub fn evolve_exact(state: &StateVector, model: &NoiseModel) -> Result<StateVector> {
    model.propagator(state.layout())?.apply(state)
}

/// First-order evolution `(1 + iεH)`. The result has norm `1 + O(ε²)` unless
/// `renormalize` is set.
pub fn evolve_first_order(
    state: &StateVector,
    model: &NoiseModel,
    renormalize: bool,
) -> Result<StateVector> {
    let mut out = model.first_order_operator(state.layout())?.apply(state)?;
    if renormalize {
        out.normalize();
    }
    Ok(out)
}
