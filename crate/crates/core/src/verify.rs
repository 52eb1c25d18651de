//! The full identity suite run by `zeno verify`: exact Pauli algebra, the
//! encoder conjugation rules for every system size up to four, and the
//! conditional-flip operator identities.

use nalgebra::DVector;

use crate::code::build_code;
use crate::error::Result;
use crate::heisenberg::{
    compare_branches, effective_noise_check, sigma_expectation, syndrome_agreement,
    verify_flip_conjugation, verify_heisenberg_images, verify_sigma_compact_form, IdentityReport,
    Status, EXACT,
};
use crate::noise::NoiseModel;
use crate::pauli::{conjugate_by_encoder, tilde_state, Pauli, PauliString};
use crate::statevec::{max_abs, pauli_matrix, CMatrix, RegisterLayout, StateVector, C64};

/// Largest system size covered by the encoder checks.
pub const MAX_VERIFIED_QUBITS: usize = 4;

fn phase_of(k: u8) -> C64 {
    [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ][k as usize % 4]
}

fn pauli_products() -> IdentityReport {
    let mut worst = 0.0f64;
    for a in Pauli::ALL {
        for b in Pauli::ALL {
            let (k, c) = a.multiply(b);
            let dense = pauli_matrix(a) * pauli_matrix(b);
            worst = worst.max(max_abs(&(dense - pauli_matrix(c) * phase_of(k))));
        }
    }
    IdentityReport::check(
        "pauli products match 2x2 matrices (16 ordered pairs)",
        worst,
        EXACT,
    )
}

fn tilde_orthonormality() -> Result<IdentityReport> {
    let mut worst = 0.0f64;
    for b in 0..4u8 {
        for b2 in 0..4u8 {
            let (u, v) = (tilde_state(b)?, tilde_state(b2)?);
            let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
            let expected = if b == b2 { 1.0 } else { 0.0 };
            worst = worst.max((dot - expected).abs());
        }
    }
    let in_defect = tilde_state(0)?
        .iter()
        .map(|x| (x - 0.5).abs())
        .fold(0.0, f64::max);
    Ok(IdentityReport::check(
        "tilde basis orthonormal, first element equals |in⟩",
        worst.max(in_defect),
        EXACT,
    ))
}

/// Dense `C (1⊗σ_b^j) C` against the symbolic ancilla diagonal, every `b`, `j`.
fn encoder_conjugation(n: usize) -> Result<IdentityReport> {
    let code = build_code(n)?;
    let c = code.encoder().matrix();
    let sys_dim = 1usize << n;
    let mut worst = 0.0f64;
    for j in 0..n {
        for b in Pauli::ALL {
            let p = PauliString::single(n, j, b)?;
            let sym = conjugate_by_encoder(n, &p)?;
            let sys_op =
                crate::DenseOperator::from_pauli_string(&p, (0..n).collect())?.into_matrix();
            let dense =
                c * CMatrix::from_fn(4 * sys_dim, 4 * sys_dim, |r, s| {
                    if r % 4 == s % 4 {
                        sys_op[(r / 4, s / 4)]
                    } else {
                        C64::new(0.0, 0.0)
                    }
                }) * c;
            let expected = CMatrix::from_fn(4 * sys_dim, 4 * sys_dim, |r, s| {
                if r % 4 == s % 4 {
                    sys_op[(r / 4, s / 4)] * f64::from(sym.ancilla_diagonal[r % 4])
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            worst = worst.max(max_abs(&(dense - expected)));
        }
    }
    Ok(IdentityReport::check(
        format!("encoder conjugation rules, n = {n}"),
        worst,
        EXACT,
    ))
}

fn encoder_involution(n: usize) -> Result<IdentityReport> {
    let code = build_code(n)?;
    let c = code.encoder().matrix();
    let dim = c.nrows();
    let square = max_abs(&(c * c - CMatrix::identity(dim, dim)));
    let herm = max_abs(&(c - c.adjoint()));
    Ok(IdentityReport::check(
        format!("encoder is a hermitian involution, n = {n}"),
        square.max(herm),
        EXACT,
    ))
}

fn sigma_expectations() -> IdentityReport {
    let worst = Pauli::ALL
        .iter()
        .map(|&a| (sigma_expectation(a) - if a == Pauli::I { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    IdentityReport::check("⟨in|Σ_a|in⟩ = δ_a0", worst, EXACT)
}

fn in_state_descriptions_agree() -> Result<IdentityReport> {
    let code = build_code(1)?;
    let x_up = DVector::from_column_slice(&crate::heisenberg::in_state_x_up());
    let uniform = DVector::from_column_slice(code.in_state());
    let defect = (x_up - uniform)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Ok(IdentityReport::check(
        "|↑x,↑x⟩ equals the uniform ancilla state",
        defect,
        EXACT,
    ))
}

fn branch_structure() -> IdentityReport {
    let branches = compare_branches();
    let detail = branches
        .iter()
        .map(|b| {
            format!(
                "a={}: {} vs {}·{}",
                b.ancilla_label, b.code_letter, b.flip_phase, b.flip_letter
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    let differs = branches
        .iter()
        .any(|b| b.code_letter != b.flip_letter || (b.flip_phase - 1.0).norm() > EXACT);
    let mut r = IdentityReport::check(
        "conditional-flip encoder branches vs code encoder",
        0.0,
        EXACT,
    )
    .with_detail(detail);
    if differs {
        r.status = Status::Discrepancy;
    }
    r
}

fn syndrome_agreement_report() -> Result<IdentityReport> {
    let mut worst = 0.0f64;
    for seed in 0..4 {
        let model = NoiseModel::random(1, seed)?.with_epsilon(0.05);
        let psi = StateVector::random_seeded(RegisterLayout::plain(1), seed + 1000);
        worst = worst.max(syndrome_agreement(&model, &psi)?);
    }
    Ok(IdentityReport::check(
        "both encoders give the same syndrome statistics",
        worst,
        EXACT,
    ))
}

fn harmless_noise_exact() -> Result<IdentityReport> {
    let mut worst = 0.0f64;
    for seed in 0..4 {
        let model = NoiseModel::random(1, seed)?.restricted_to(&[Pauli::I]);
        for eps in [0.01, 0.05, 0.1] {
            worst = worst.max(effective_noise_check(&model, eps)?);
        }
    }
    Ok(IdentityReport::check(
        "environment-only couplings pass post-selection unchanged",
        worst,
        EXACT,
    ))
}

/// Every identity, in a fixed order.
pub fn run_suite() -> Result<Vec<IdentityReport>> {
    let mut out = vec![pauli_products(), tilde_orthonormality()?];
    for n in 1..=MAX_VERIFIED_QUBITS {
        out.push(encoder_involution(n)?);
        out.push(encoder_conjugation(n)?);
    }
    for a in Pauli::NON_IDENTITY {
        for b in Pauli::NON_IDENTITY {
            out.push(verify_flip_conjugation(a, b)?);
        }
    }
    out.extend(verify_heisenberg_images());
    out.extend(verify_sigma_compact_form());
    out.push(sigma_expectations());
    out.push(in_state_descriptions_agree()?);
    out.push(branch_structure());
    out.push(syndrome_agreement_report()?);
    out.push(harmless_noise_exact()?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_has_no_failures() {
        let reports = run_suite().unwrap();
        for r in &reports {
            assert!(
                r.passed(),
                "{} failed with defect {:e}",
                r.identity,
                r.max_defect
            );
        }
        let flagged: Vec<_> = reports
            .iter()
            .filter(|r| r.status == Status::Discrepancy)
            .collect();
        assert_eq!(flagged.len(), 2);
    }

    #[test]
    fn third_image_is_flagged() {
        let reports = verify_heisenberg_images();
        assert_eq!(reports[2].status, Status::Discrepancy);
        assert!(reports[2].detail.contains("(σz⊗1)⊗σz"));
    }
}
