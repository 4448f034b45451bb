//! Component-wise gravitational phases between two parallel walkers.
//!
//! Walker A lives on the line `y = 0` and walker B on `y = L`, both in
//! lattice units. The joint component `|i_A⟩|j_B⟩` at step `t` picks up the
//! phase `e^{-i g_ij(t)}` with
//!
//! ```text
//! g_ij(t) = -κ · (t - max(|i|, |j|)) / √(L² + (i - j)²),   κ = r · sin θ_A · sin θ_B
//! ```
//!
//! where `r = N_t / N_d` is the time/space step ratio. Masses are measured in
//! Planck units through `m = sin θ`, so no physical constants appear. The
//! constant retardation term is a global phase and is dropped.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::walk::{PositionDistribution, WalkState};

/// Default perpendicular separation between the two walk lines.
pub const DEFAULT_SEPARATION: u32 = 100;

/// Placement of the two walk lines and the time/space step ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySpec {
    separation: u32,
    step_ratio: f64,
}

impl GeometrySpec {
    pub fn new(separation: u32, step_ratio: f64) -> Result<Self> {
        if separation == 0 {
            return Err(Error::invalid("separation", "must be a positive integer"));
        }
        if !(step_ratio.is_finite() && step_ratio > 0.0) {
            return Err(Error::invalid(
                "step_ratio",
                format!("{step_ratio} must be positive"),
            ));
        }
        Ok(GeometrySpec {
            separation,
            step_ratio,
        })
    }

    pub fn with_separation(separation: u32) -> Result<Self> {
        Self::new(separation, 1.0)
    }

    pub fn separation(&self) -> u32 {
        self.separation
    }

    pub fn step_ratio(&self) -> f64 {
        self.step_ratio
    }

    /// Whether the lines are far enough apart for walks of `steps` steps (`L > 2·steps`).
    pub fn covers(&self, steps: usize) -> bool {
        self.separation as usize > 2 * steps
    }
}

impl Default for GeometrySpec {
    fn default() -> Self {
        GeometrySpec {
            separation: DEFAULT_SEPARATION,
            step_ratio: 1.0,
        }
    }
}

/// Mass in Planck units carried by a walker with coin angle `theta`.
pub fn mass_from_theta(theta: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::invalid(
            "theta",
            format!("{theta} is outside [0, pi/2]"),
        ));
    }
    Ok(theta.sin())
}

/// Coin angles of the two walkers, which double as their masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPair {
    theta_a: f64,
    theta_b: f64,
}

impl MassPair {
    pub fn new(theta_a: f64, theta_b: f64) -> Result<Self> {
        mass_from_theta(theta_a)
            .map_err(|_| Error::invalid("theta_a", format!("{theta_a} is outside [0, pi/2]")))?;
        mass_from_theta(theta_b)
            .map_err(|_| Error::invalid("theta_b", format!("{theta_b} is outside [0, pi/2]")))?;
        Ok(MassPair { theta_a, theta_b })
    }

    pub fn theta_a(&self) -> f64 {
        self.theta_a
    }

    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }

    pub fn swapped(&self) -> MassPair {
        MassPair {
            theta_a: self.theta_b,
            theta_b: self.theta_a,
        }
    }

    /// `κ = step_ratio · sin θ_A · sin θ_B`.
    pub fn coupling(&self, geom: &GeometrySpec) -> f64 {
        geom.step_ratio * self.theta_a.sin() * self.theta_b.sin()
    }
}

/// Euclidean distance between site `i` of line A and site `j` of line B.
pub fn pair_distance(i: i64, j: i64, geom: &GeometrySpec) -> f64 {
    let l = geom.separation as f64;
    let dx = (i - j) as f64;
    (l * l + dx * dx).sqrt()
}

fn phase_unchecked(i: i64, j: i64, t: i64, geom: &GeometrySpec, kappa: f64) -> f64 {
    let duration = (t - i.abs().max(j.abs())).max(0) as f64;
    if duration == 0.0 || kappa == 0.0 {
        return 0.0;
    }
    -kappa * duration / pair_distance(i, j, geom)
}

/// Phase `g_ij(t)` in radians acquired by the joint component at `(i, j)`.
pub fn phase_at(i: i64, j: i64, t: usize, geom: &GeometrySpec, masses: &MassPair) -> Result<f64> {
    let t = t as i64;
    if i.abs() > t || j.abs() > t {
        return Err(Error::invalid(
            "position",
            format!("({i}, {j}) lies outside the light cone of step {t}"),
        ));
    }
    Ok(phase_unchecked(i, j, t, geom, masses.coupling(geom)))
}

/// Phases `g_ij(t)` for every `(i, j) ∈ [-t, t]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    t: usize,
    // row-major, (i + t) * n + (j + t)
    values: Vec<f64>,
}

impl PhaseField {
    pub fn zero(t: usize) -> Self {
        let n = 2 * t + 1;
        PhaseField {
            t,
            values: vec![0.0; n * n],
        }
    }

    pub fn build(t: usize, geom: &GeometrySpec, masses: &MassPair) -> Self {
        let kappa = masses.coupling(geom);
        let ti = t as i64;
        let values = (-ti..=ti)
            .flat_map(|i| (-ti..=ti).map(move |j| (i, j)))
            .map(|(i, j)| phase_unchecked(i, j, ti, geom, kappa))
            .collect();
        PhaseField { t, values }
    }

    pub fn from_values(t: usize, values: Vec<f64>) -> Result<Self> {
        let n = 2 * t + 1;
        if values.len() != n * n {
            return Err(Error::Mismatch(format!(
                "{} phase values for step {t}, expected {}",
                values.len(),
                n * n
            )));
        }
        Ok(PhaseField { t, values })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn side(&self) -> usize {
        2 * self.t + 1
    }

    /// Phase at lattice positions `(i, j)`.
    pub fn get(&self, i: i64, j: i64) -> f64 {
        let t = self.t as i64;
        self.at((i + t) as usize, (j + t) as usize)
    }

    /// Phase at array indices `(i + t, j + t)`.
    #[inline]
    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.side() + b]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Remove the parts of the field that depend on one walker's position only.
    ///
    /// Returns `h_ij = g_ij - Σ_j' Q_j' g_ij' - Σ_i' P_i' g_i'j + Σ P_i' Q_j' g_i'j'`.
    /// The dropped terms are products of local unitaries, so the entanglement
    /// spectrum of the phased state is unchanged, and `h` has zero weighted
    /// mean along each axis.
    pub fn interaction_part(
        &self,
        p: &PositionDistribution,
        q: &PositionDistribution,
    ) -> Result<PhaseField> {
        check_step("P", p.t(), self.t)?;
        check_step("Q", q.t(), self.t)?;
        let n = self.side();
        let (pa, qb) = (p.probabilities(), q.probabilities());
        let row_mean: Vec<f64> = (0..n)
            .map(|a| (0..n).map(|b| qb[b] * self.at(a, b)).sum())
            .collect();
        let col_mean: Vec<f64> = (0..n)
            .map(|b| (0..n).map(|a| pa[a] * self.at(a, b)).sum())
            .collect();
        let grand: f64 = (0..n).map(|a| pa[a] * row_mean[a]).sum();
        let values = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.at(a, b) - row_mean[a] - col_mean[b] + grand)
            .collect();
        Ok(PhaseField { t: self.t, values })
    }
}

pub(crate) fn check_step(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::Mismatch(format!(
            "{what} is at step {got}, expected step {expected}"
        )));
    }
    Ok(())
}

/// Phased two-walker state over `(i, s_A, j, s_B)`.
///
/// Stored as a `dim_A × dim_B` row-major matrix with `dim = 2(2t+1)`; the row
/// index is `2·(i + t) + s_A` and the column index `2·(j + t) + s_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    t: usize,
    amps: Vec<Complex64>,
}

impl JointState {
    pub fn from_amplitudes(t: usize, amps: Vec<Complex64>) -> Result<Self> {
        let d = 2 * (2 * t + 1);
        if amps.len() != d * d {
            return Err(Error::Mismatch(format!(
                "{} joint amplitudes for step {t}, expected {}",
                amps.len(),
                d * d
            )));
        }
        Ok(JointState { t, amps })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Dimension of one walker's `(position, spin)` space.
    pub fn walker_dim(&self) -> usize {
        2 * (2 * self.t + 1)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, i: i64, s_a: usize, j: i64, s_b: usize) -> Complex64 {
        let t = self.t as i64;
        let d = self.walker_dim();
        let row = 2 * (i + t) as usize + s_a;
        let col = 2 * (j + t) as usize + s_b;
        self.amps[row * d + col]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Coefficient matrix with rows indexed by walker A and columns by walker B.
    pub fn coefficient_matrix(&self) -> faer::Mat<Complex64> {
        let d = self.walker_dim();
        faer::Mat::from_fn(d, d, |r, c| self.amps[r * d + c])
    }
}

/// `Ψ(i, s_A, j, s_B) = e^{-i g_ij} · ψ_A(i, s_A) · ψ_B(j, s_B)`.
pub fn build_joint_state(
    walk_a: &WalkState,
    walk_b: &WalkState,
    field: &PhaseField,
) -> Result<JointState> {
    check_step("walker B", walk_b.t(), walk_a.t())?;
    check_step("phase field", field.t(), walk_a.t())?;
    let n = field.side();
    let d = 2 * n;
    let (sa, sb) = (walk_a.sites(), walk_b.sites());
    let mut amps = Vec::with_capacity(d * d);
    for a in 0..n {
        for s_a in 0..2 {
            let amp_a = sa[a][s_a];
            for b in 0..n {
                let g = field.at(a, b);
                let phased = amp_a * Complex64::from_polar(1.0, -g);
                amps.push(phased * sb[b][0]);
                amps.push(phased * sb[b][1]);
            }
        }
    }
    Ok(JointState { t: field.t(), amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{evolve, Coin, SpinState};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn distance_examples() {
        let g = GeometrySpec::with_separation(100).unwrap();
        assert_eq!(pair_distance(7, 7, &g), 100.0);
        let g4 = GeometrySpec::with_separation(4).unwrap();
        assert_eq!(pair_distance(3, 0, &g4), 5.0);
        assert_eq!(pair_distance(0, 3, &g4), pair_distance(3, 0, &g4));
    }

    #[test]
    fn phase_examples() {
        let g = GeometrySpec::default();
        let heavy = MassPair::new(FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(
            phase_at(0, 0, 5, &g, &heavy).unwrap(),
            -0.05,
            epsilon = 1e-15
        );
        assert_eq!(phase_at(-3, 5, 5, &g, &heavy).unwrap(), 0.0);
        let massless = MassPair::new(0.0, FRAC_PI_4).unwrap();
        assert_eq!(phase_at(1, 2, 9, &g, &massless).unwrap(), 0.0);
        assert!(phase_at(6, 0, 5, &g, &heavy).is_err());
    }

    #[test]
    fn field_shape_sign_and_reflection() {
        assert_eq!(
            PhaseField::build(
                0,
                &GeometrySpec::default(),
                &MassPair::new(1.0, 1.0).unwrap()
            )
            .values(),
            &[0.0]
        );
        let f = PhaseField::build(
            6,
            &GeometrySpec::with_separation(20).unwrap(),
            &MassPair::new(FRAC_PI_4, FRAC_PI_6).unwrap(),
        );
        for i in -6..=6 {
            for j in -6..=6 {
                assert!(f.get(i, j) <= 0.0);
                assert_eq!(f.get(i, j), f.get(-i, -j));
            }
        }
    }

    #[test]
    fn mass_mapping() {
        assert_eq!(mass_from_theta(FRAC_PI_2).unwrap(), 1.0);
        assert_abs_diff_eq!(mass_from_theta(FRAC_PI_6).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(mass_from_theta(0.0).unwrap(), 0.0);
        assert!(mass_from_theta(-0.01).is_err());
        assert!(mass_from_theta(1.6).is_err());
    }

    #[test]
    fn zero_field_gives_product_and_norm_is_kept() {
        let a = evolve(SpinState::UP, &Coin::rotation(FRAC_PI_4).unwrap(), 4);
        let b = evolve(SpinState::DOWN, &Coin::rotation(FRAC_PI_6).unwrap(), 4);
        let psi = build_joint_state(&a, &b, &PhaseField::zero(4)).unwrap();
        for i in -4..=4 {
            for j in -4..=4 {
                for (sa, sb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let spin = |s| {
                        if s == 0 {
                            crate::walk::Spin::Up
                        } else {
                            crate::walk::Spin::Down
                        }
                    };
                    let expect = a.amplitude(i, spin(sa)) * b.amplitude(j, spin(sb));
                    assert_eq!(psi.amplitude(i, sa, j, sb), expect);
                }
            }
        }
        let f = PhaseField::build(
            4,
            &GeometrySpec::with_separation(9).unwrap(),
            &MassPair::new(1.2, 1.5).unwrap(),
        );
        let phased = build_joint_state(&a, &b, &f).unwrap();
        assert_abs_diff_eq!(phased.norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_steps_rejected() {
        let a = evolve(SpinState::UP, &Coin::Hadamard, 3);
        let b = evolve(SpinState::UP, &Coin::Hadamard, 2);
        assert!(build_joint_state(&a, &b, &PhaseField::zero(3)).is_err());
        assert!(build_joint_state(&a, &a, &PhaseField::zero(2)).is_err());
    }

    #[test]
    fn interaction_part_is_centered() {
        let t = 5;
        let m = MassPair::new(0.9, 0.4).unwrap();
        let g = GeometrySpec::with_separation(30).unwrap();
        let p = evolve(SpinState::UP, &Coin::rotation(0.9).unwrap(), t).position_distribution();
        let q = evolve(SpinState::DOWN, &Coin::rotation(0.4).unwrap(), t).position_distribution();
        let h = PhaseField::build(t, &g, &m)
            .interaction_part(&p, &q)
            .unwrap();
        let n = 2 * t + 1;
        for a in 0..n {
            let s: f64 = (0..n).map(|b| q.probabilities()[b] * h.at(a, b)).sum();
            assert_abs_diff_eq!(s, 0.0, epsilon = 1e-15);
        }
        for b in 0..n {
            let s: f64 = (0..n).map(|a| p.probabilities()[a] * h.at(a, b)).sum();
            assert_abs_diff_eq!(s, 0.0, epsilon = 1e-15);
        }
    }
}
