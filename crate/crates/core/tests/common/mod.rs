//! Independent dense oracles for the integration tests. Nothing here calls
//! into the crate's operator or code construction.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Label order 0=I, 1=X, 2=Y, 3=Z.
pub fn sigma(label: usize) -> M {
    let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
    let entries = match label {
        0 => [o, z, z, o],
        1 => [z, o, o, z],
        2 => [z, c(0.0, -1.0), c(0.0, 1.0), z],
        3 => [o, z, z, -o],
        _ => panic!("label {label}"),
    };
    M::from_row_slice(2, 2, &entries)
}

/// Plain Kronecker product, `a` on the high bits.
pub fn kron(a: &M, b: &M) -> M {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    M::from_fn(ar * br, ac * bc, |r, s| {
        a[(r / br, s / bc)] * b[(r % br, s % bc)]
    })
}

/// Operator on a little-endian register: `ops[q]` acts on qubit `q`.
pub fn little_endian(ops: &[M]) -> M {
    ops.iter().fold(M::identity(1, 1), |acc, op| kron(op, &acc))
}

/// `Σ_a |a⟩⟨a| ⊗ σ_a^{⊗n}` on ancilla(2) | system(n), ancilla on the low bits.
pub fn encoder(n: usize) -> M {
    let mut total = M::zeros(4 << n, 4 << n);
    for a in 0..4 {
        let mut proj = M::zeros(4, 4);
        proj[(a, a)] = c(1.0, 0.0);
        let system = little_endian(&vec![sigma(a); n]);
        total += kron(&system, &proj);
    }
    total
}

/// `σ_letter` on system qubit `j` of ancilla(2) | system(n).
pub fn system_pauli(n: usize, j: usize, letter: usize) -> M {
    let ops: Vec<M> = (0..n + 2)
        .map(|q| if q == j + 2 { sigma(letter) } else { sigma(0) })
        .collect();
    little_endian(&ops)
}

/// `c_a^(b)` by conjugating 2x2 matrices: the sign `s` in `σ_a σ_b σ_a = s σ_b`.
pub fn sign_by_matrices(a: usize, b: usize) -> f64 {
    let conj = sigma(a) * sigma(b) * sigma(a);
    let s = (sigma(b).adjoint() * conj).trace() / c(2.0, 0.0);
    s.re
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_exp_series(h: &M, t: f64) -> M {
    let dim = h.nrows();
    let mut term = M::identity(dim, dim);
    let mut total = term.clone();
    for k in 1..60 {
        term = &term * h * c(0.0, t / k as f64);
        total += &term;
    }
    total
}

/// Least squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

pub fn max_abs_v(v: &V) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `high ⊗ low` for vectors, `low` on the low bits.
pub fn kron_vec(high: &V, low: &V) -> V {
    V::from_fn(high.len() * low.len(), |i, _| {
        high[i / low.len()] * low[i % low.len()]
    })
}
