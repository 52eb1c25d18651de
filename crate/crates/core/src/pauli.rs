//! Symbolic Pauli-string algebra with exact phase tracking, and the closed-form
//! rules for conjugating system Pauli strings by the two-ancilla encoder.
//!
//! Phases are stored as an exponent `k` of `i^k` (mod 4), so products stay exact
//! and never touch floating point.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZenoError};
use crate::ANCILLA_QUBITS;

/// Single-qubit Pauli letter. The discriminant is the conventional label
/// `0=I, 1=X, 2=Y, 3=Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            0 => Ok(Pauli::I),
            1 => Ok(Pauli::X),
            2 => Ok(Pauli::Y),
            3 => Ok(Pauli::Z),
            other => Err(ZenoError::InvalidLabel(other)),
        }
    }

    #[inline]
    pub fn label(self) -> u8 {
        self as u8
    }

    /// Product `self * rhs` as `(i^k, letter)`.
    pub fn multiply(self, rhs: Pauli) -> (u8, Pauli) {
        let (a, b) = (self.label(), rhs.label());
        if a == 0 || b == 0 || a == b {
            return (0, Pauli::from_label(a ^ b).unwrap());
        }
        // XY = iZ, YZ = iX, ZX = iY; reversed order picks up -i.
        let k = if (b + 3 - a) % 3 == 1 { 1 } else { 3 };
        (k, Pauli::from_label(a ^ b).unwrap())
    }

    /// Whether the two letters commute.
    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A tensor product of Pauli letters, one per qubit, times a phase `i^k`.
///
/// `letters[q]` acts on qubit `q` of whatever register the string is placed on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    letters: Vec<Pauli>,
    phase_exponent: u8,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        Self {
            letters: vec![Pauli::I; len],
            phase_exponent: 0,
        }
    }

    pub fn new(letters: Vec<Pauli>, phase_exponent: u8) -> Self {
        Self {
            letters,
            phase_exponent: phase_exponent % 4,
        }
    }

    pub fn from_labels(labels: &[u8]) -> Result<Self> {
        let letters = labels
            .iter()
            .map(|&l| Pauli::from_label(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(letters, 0))
    }

    /// `letter` on qubit `qubit` of a `len`-qubit register, identity elsewhere.
    pub fn single(len: usize, qubit: usize, letter: Pauli) -> Result<Self> {
        if qubit >= len {
            return Err(ZenoError::QubitOutOfRange {
                index: qubit,
                num_qubits: len,
            });
        }
        let mut s = Self::identity(len);
        s.letters[qubit] = letter;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase_exponent(&self) -> u8 {
        self.phase_exponent
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.weight() == 0
    }

    /// Exact product `self * rhs`.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.len() != rhs.len() {
            return Err(ZenoError::LengthMismatch {
                expected: self.len(),
                actual: rhs.len(),
            });
        }
        let mut k = self.phase_exponent + rhs.phase_exponent;
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (dk, c) = a.multiply(b);
                k += dk;
                c
            })
            .collect();
        Ok(PauliString::new(letters, k))
    }

    pub fn commutes_with(&self, other: &PauliString) -> Result<bool> {
        if self.len() != other.len() {
            return Err(ZenoError::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count();
        Ok(anti % 2 == 0)
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    /// Panics on length mismatch; use [`PauliString::multiply`] for the fallible form.
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs)
            .expect("pauli strings of different length")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase_exponent as usize];
        write!(f, "{prefix}")?;
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Sign table `c[a][b]`: the sign picked up by `σ_b` under conjugation by `σ_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientTable {
    c: [[i8; 4]; 4],
}

impl CoefficientTable {
    pub fn new() -> Self {
        let mut c = [[0i8; 4]; 4];
        for a in Pauli::ALL {
            for b in Pauli::ALL {
                c[a as usize][b as usize] = sign_of_conjugation(a, b);
            }
        }
        Self { c }
    }

    pub fn get(&self, a: Pauli, b: Pauli) -> i8 {
        self.c[a as usize][b as usize]
    }

    /// Column `b` as the 4-vector `(c[0][b], .., c[3][b])`.
    pub fn column(&self, b: Pauli) -> [i8; 4] {
        [
            self.c[0][b as usize],
            self.c[1][b as usize],
            self.c[2][b as usize],
            self.c[3][b as usize],
        ]
    }
}

impl Default for CoefficientTable {
    fn default() -> Self {
        Self::new()
    }
}

fn sign_of_conjugation(a: Pauli, b: Pauli) -> i8 {
    if a.commutes_with(b) {
        1
    } else {
        -1
    }
}

/// `+1` if `a = 0` or `a = b`, else `-1`.
pub fn c_coefficient(a: u8, b: u8) -> Result<i8> {
    Ok(sign_of_conjugation(
        Pauli::from_label(a)?,
        Pauli::from_label(b)?,
    ))
}

/// Amplitudes of the ancilla state that a letter-`b` error rotates `|in⟩` into:
/// `(1/2)(c[0][b], c[1][b], c[2][b], c[3][b])` in the ancilla computational basis.
pub fn tilde_state(b: u8) -> Result<[f64; 4]> {
    let b = Pauli::from_label(b)?;
    Ok(CoefficientTable::new()
        .column(b)
        .map(|c| 0.5 * f64::from(c)))
}

/// Result of `C p C` for a system Pauli string `p`: a diagonal ancilla operator
/// (one sign per ancilla label `a`) tensored with the unchanged system string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncoderConjugation {
    pub ancilla_diagonal: [i8; 4],
    pub system: PauliString,
}

/// Conjugates a system Pauli string by the encoder of an `n`-qubit code.
///
/// `p` is either a length-`n` string on the system block, or a full
/// ancilla|system string of length `n + 2` whose ancilla letters are identity.
pub fn conjugate_by_encoder(n: usize, p: &PauliString) -> Result<EncoderConjugation> {
    let system = if p.len() == n {
        p.clone()
    } else if p.len() == n + ANCILLA_QUBITS {
        let (anc, sys) = p.letters().split_at(ANCILLA_QUBITS);
        if anc.iter().any(|&l| l != Pauli::I) {
            return Err(ZenoError::TouchesAncilla(p.to_string()));
        }
        PauliString::new(sys.to_vec(), p.phase_exponent())
    } else {
        return Err(ZenoError::LengthMismatch {
            expected: n,
            actual: p.len(),
        });
    };
    let table = CoefficientTable::new();
    let mut diag = [1i8; 4];
    for &letter in system.letters() {
        let col = table.column(letter);
        for (d, c) in diag.iter_mut().zip(col) {
            *d *= c;
        }
    }
    Ok(EncoderConjugation {
        ancilla_diagonal: diag,
        system,
    })
}
