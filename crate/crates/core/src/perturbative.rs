//! Small-phase diagnostics for the leading eigenvalue of walker B's reduced state.
//!
//! Walker B's reduced state is the Hadamard product `K ∘ |φ⟩⟨φ|` with
//! `K_jk = Σ_l P_l e^{-i(g_lj - g_lk)}`. Projecting `K - 1` onto `|φ⟩` gives the
//! shift of the unit eigenvalue; expanding that shift to second order in the
//! phases gives a functional of the walkers' durations and distributions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gravity::{check_step, MassPair, PhaseField};
use crate::walk::PositionDistribution;

/// `Σ_{j,k,l} Q_j Q_k P_l (e^{-i(g_lj - g_lk)} - 1)`.
///
/// The shift of the leading eigenvalue of walker B's reduced state obtained by
/// projecting onto the unperturbed eigenvector. The phase-dependent parts of
/// `g` that only involve one walker rotate that eigenvector, so pass
/// [`PhaseField::interaction_part`] to compare against `1 - λ_max`.
pub fn perturbation_correction(
    p: &PositionDistribution,
    q: &PositionDistribution,
    field: &PhaseField,
) -> Result<Complex64> {
    check_step("P", p.t(), field.t())?;
    check_step("Q", q.t(), field.t())?;
    let n = field.side();
    let (pa, qb) = (p.probabilities(), q.probabilities());
    let mut total = Complex64::new(0.0, 0.0);
    for l in 0..n {
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                let delta = field.at(l, j) - field.at(l, k);
                // e^{-iδ} - 1 without cancellation for small δ
                let half = (delta / 2.0).sin();
                let term = Complex64::new(-2.0 * half * half, -delta.sin());
                inner += term * (qb[j] * qb[k]);
            }
        }
        total += inner * pa[l];
    }
    Ok(total)
}

/// Second-order expansion of [`perturbation_correction`] in the coupling.
///
/// With `D_lj = t - max(|l|, |j|)` the interaction durations, returns
///
/// ```text
/// sin²θ_A sin²θ_B · Σ_l P_l [ Σ_j Q_j D_lj² - (Σ_j Q_j D_lj)² ]
/// ```
///
/// i.e. `½ Σ_{i,j,l} Q_i Q_j P_l (D_li - D_lj)²`, the spread of walker B's
/// interaction durations averaged over walker A. The distance denominator and
/// the overall constant are dropped, so only ratios are meaningful.
pub fn second_moment_functional(
    p: &PositionDistribution,
    q: &PositionDistribution,
    t: usize,
    masses: &MassPair,
) -> Result<f64> {
    check_step("P", p.t(), t)?;
    check_step("Q", q.t(), t)?;
    let ti = t as i64;
    let duration = |l: i64, j: i64| (ti - l.abs().max(j.abs())) as f64;
    let spread: f64 = p
        .iter()
        .map(|(l, pl)| {
            let (first, second) = q.iter().fold((0.0, 0.0), |(m1, m2), (j, qj)| {
                let d = duration(l, j);
                (m1 + qj * d, m2 + qj * d * d)
            });
            pl * (second - first * first)
        })
        .sum();
    let weight = (masses.theta_a().sin() * masses.theta_b().sin()).powi(2);
    if !spread.is_finite() {
        return Err(Error::Numerical("non-finite moment functional".into()));
    }
    Ok(weight * spread.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{reduce_density, Subsystem};
    use crate::gravity::{build_joint_state, GeometrySpec};
    use crate::walk::{evolve, Coin, SpinState};
    use approx::assert_abs_diff_eq;

    fn dists(t: usize, ta: f64, tb: f64) -> (PositionDistribution, PositionDistribution) {
        (
            evolve(SpinState::UP, &Coin::rotation(ta).unwrap(), t).position_distribution(),
            evolve(SpinState::DOWN, &Coin::rotation(tb).unwrap(), t).position_distribution(),
        )
    }

    #[test]
    fn zero_field_gives_zero() {
        let (p, q) = dists(6, 0.8, 0.3);
        assert_eq!(
            perturbation_correction(&p, &q, &PhaseField::zero(6)).unwrap(),
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn factorized_form_and_sign() {
        // Σ_l P_l (|Σ_j Q_j e^{-i g_lj}|² - 1): the triple sum collapses per l
        let (p, q) = dists(7, 0.9, 0.5);
        let masses = MassPair::new(0.9, 0.5).unwrap();
        let f = PhaseField::build(7, &GeometrySpec::with_separation(40).unwrap(), &masses);
        let got = perturbation_correction(&p, &q, &f).unwrap();
        let n = f.side();
        let expect: f64 = (0..n)
            .map(|l| {
                let z: Complex64 = (0..n)
                    .map(|j| Complex64::from_polar(q.probabilities()[j], -f.at(l, j)))
                    .sum();
                p.probabilities()[l] * (z.norm_sqr() - 1.0)
            })
            .sum();
        assert_abs_diff_eq!(got.re, expect, epsilon = 1e-14);
        assert!(got.im.abs() < 1e-15);
        assert!(got.re <= 0.0);
    }

    #[test]
    fn projected_overlap_bounds_the_eigenvalue_drop() {
        // ⟨φ|ρ_B|φ⟩ ≤ λ_max, hence |δλ| ≥ 1 - λ_max for the raw field
        let t = 6;
        let masses = MassPair::new(0.2, 0.1).unwrap();
        let geom = GeometrySpec::default();
        let a = evolve(SpinState::UP, &Coin::rotation(0.2).unwrap(), t);
        let b = evolve(SpinState::DOWN, &Coin::rotation(0.1).unwrap(), t);
        let f = PhaseField::build(t, &geom, &masses);
        let rho_b = reduce_density(
            &build_joint_state(&a, &b, &f).unwrap(),
            &Subsystem::WALKER_B,
        )
        .unwrap();
        let drop = 1.0 - rho_b.spectrum().unwrap().last().copied().unwrap();
        let raw =
            perturbation_correction(&a.position_distribution(), &b.position_distribution(), &f)
                .unwrap();
        assert!(raw.norm() >= drop);
    }

    #[test]
    fn moment_functional_edge_cases() {
        let (p, q) = dists(0, 0.8, 0.8);
        assert_eq!(
            second_moment_functional(&p, &q, 0, &MassPair::new(0.8, 0.8).unwrap()).unwrap(),
            0.0
        );
        let (p, q) = dists(9, 0.0, 0.8);
        assert_eq!(
            second_moment_functional(&p, &q, 9, &MassPair::new(0.0, 0.8).unwrap()).unwrap(),
            0.0
        );
        assert!(second_moment_functional(&p, &q, 8, &MassPair::new(0.0, 0.8).unwrap()).is_err());
    }

    #[test]
    fn moment_functional_matches_pairwise_form() {
        let t = 5;
        let (p, q) = dists(t, 0.7, 1.1);
        let masses = MassPair::new(0.7, 1.1).unwrap();
        let ti = t as i64;
        let d = |l: i64, j: i64| (ti - l.abs().max(j.abs())) as f64;
        let mut pairwise = 0.0;
        for (l, pl) in p.iter() {
            for (i, qi) in q.iter() {
                for (j, qj) in q.iter() {
                    pairwise += 0.5 * qi * qj * pl * (d(l, i) - d(l, j)).powi(2);
                }
            }
        }
        pairwise *= (0.7f64.sin() * 1.1f64.sin()).powi(2);
        assert_abs_diff_eq!(
            second_moment_functional(&p, &q, t, &masses).unwrap(),
            pairwise,
            epsilon = 1e-12
        );
    }
}
