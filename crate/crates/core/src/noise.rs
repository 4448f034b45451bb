//! Bit-flip and phase-flip noise on walker A.
//!
//! After every walk step, walker A's spin register is flipped by a Pauli
//! operator with probability `p`. Each flip pattern (a trajectory) leaves the
//! walker in a pure state; weighting the phased joint state of each pattern
//! reproduces the mixed state of the noisy evolution. The ensemble is either
//! enumerated exactly (`2^t` patterns) or sampled from a seeded generator.

use std::collections::BTreeMap;

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entanglement::{DensityMatrix, Subsystem};
use crate::error::{Error, Result};
use crate::gravity::{build_joint_state, GeometrySpec, MassPair, PhaseField};
use crate::walk::{apply_2x2, dense_step_operator, evolve, Coin, SpinState, WalkState};

/// Ensembles up to this many steps are enumerated exactly when the mode is automatic.
pub const EXACT_STEP_LIMIT: usize = 12;

/// Hard cap on exact enumeration (`2^20` trajectories).
pub const MAX_EXACT_STEPS: usize = 20;

/// Default number of Monte Carlo trajectories.
pub const DEFAULT_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    BitFlip,
    PhaseFlip,
}

impl NoiseKind {
    pub fn pauli(self) -> [[f64; 2]; 2] {
        match self {
            NoiseKind::BitFlip => [[0.0, 1.0], [1.0, 0.0]],
            NoiseKind::PhaseFlip => [[1.0, 0.0], [0.0, -1.0]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bit_flip",
            NoiseKind::PhaseFlip => "phase_flip",
        }
    }
}

/// Flip channel applied to walker A once per step with probability `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    kind: NoiseKind,
    p: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("noise_p", format!("{p} is outside [0, 1]")));
        }
        Ok(NoiseSpec { kind, p })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// One flip pattern; `flips[k]` is whether a flip follows step `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub flips: Vec<bool>,
    pub weight: f64,
}

impl Trajectory {
    pub fn flip_count(&self) -> usize {
        self.flips.iter().filter(|&&f| f).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    mode: EnsembleMode,
    steps: usize,
    trajectories: Vec<Trajectory>,
    seed: Option<u64>,
}

impl TrajectoryEnsemble {
    /// All `2^steps` flip patterns with weights `p^k (1-p)^(steps-k)`.
    ///
    /// Pattern `m` flips after step `s + 1` iff bit `s` of `m` is set.
    pub fn exact(steps: usize, noise: &NoiseSpec) -> Result<Self> {
        if steps > MAX_EXACT_STEPS {
            return Err(Error::invalid(
                "steps",
                format!("exact enumeration is limited to {MAX_EXACT_STEPS} steps"),
            ));
        }
        let p = noise.p;
        let trajectories = (0..1usize << steps)
            .map(|m| {
                let flips: Vec<bool> = (0..steps).map(|s| m >> s & 1 == 1).collect();
                let k = flips.iter().filter(|&&f| f).count();
                let weight = p.powi(k as i32) * (1.0 - p).powi((steps - k) as i32);
                Trajectory { flips, weight }
            })
            .collect();
        Ok(TrajectoryEnsemble {
            mode: EnsembleMode::Exact,
            steps,
            trajectories,
            seed: None,
        })
    }

    /// `samples` patterns drawn independently per step, each weighted `1/samples`.
    pub fn sampled(steps: usize, noise: &NoiseSpec, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::invalid("samples", "must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weight = 1.0 / samples as f64;
        let trajectories = (0..samples)
            .map(|_| Trajectory {
                flips: (0..steps).map(|_| rng.random::<f64>() < noise.p).collect(),
                weight,
            })
            .collect();
        Ok(TrajectoryEnsemble {
            mode: EnsembleMode::Sampled,
            steps,
            trajectories,
            seed: Some(seed),
        })
    }

    /// Exact up to [`EXACT_STEP_LIMIT`] steps, sampled beyond.
    pub fn auto(steps: usize, noise: &NoiseSpec, samples: usize, seed: u64) -> Result<Self> {
        if steps <= EXACT_STEP_LIMIT {
            Self::exact(steps, noise)
        } else {
            Self::sampled(steps, noise, samples, seed)
        }
    }

    pub fn mode(&self) -> EnsembleMode {
        self.mode
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn total_weight(&self) -> f64 {
        self.trajectories.iter().map(|t| t.weight).sum()
    }

    /// Distinct flip patterns with their summed weights, in lexicographic order.
    /// Zero-weight patterns are dropped.
    pub fn merged(&self) -> Vec<(Vec<bool>, f64)> {
        let mut merged: BTreeMap<&[bool], f64> = BTreeMap::new();
        for traj in &self.trajectories {
            *merged.entry(&traj.flips).or_insert(0.0) += traj.weight;
        }
        merged
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(f, w)| (f.to_vec(), w))
            .collect()
    }
}

/// Walker A evolved from the origin with the given flip pattern.
pub fn noisy_walk(
    initial_spin: SpinState,
    coin: &Coin,
    kind: NoiseKind,
    flips: &[bool],
    steps: usize,
) -> Result<WalkState> {
    if flips.len() != steps {
        return Err(Error::Mismatch(format!(
            "trajectory has {} entries for {steps} steps",
            flips.len()
        )));
    }
    let pauli = kind.pauli();
    let mut state = WalkState::origin(initial_spin);
    for &flip in flips {
        state = state.step(coin);
        if flip {
            for site in state.sites_mut() {
                *site = apply_2x2(&pauli, *site);
            }
        }
    }
    Ok(state)
}

fn joint_structure(t: usize) -> Vec<(Subsystem, usize)> {
    let n = 2 * t + 1;
    vec![
        (Subsystem::PosA, n),
        (Subsystem::SpinA, 2),
        (Subsystem::PosB, n),
        (Subsystem::SpinB, 2),
    ]
}

/// `ρ = Σ_traj w · |Ψ_traj⟩⟨Ψ_traj|` over all four subsystems.
///
/// Every member shares walker B's state and the phase field at step `t`; only
/// walker A's flip pattern differs. Dimension is `4(2t+1)²`.
pub fn ensemble_joint_density(
    spins: (SpinState, SpinState),
    masses: &MassPair,
    geom: &GeometrySpec,
    noise: &NoiseSpec,
    t: usize,
    ensemble: &TrajectoryEnsemble,
) -> Result<DensityMatrix> {
    if ensemble.steps != t {
        return Err(Error::Mismatch(format!(
            "ensemble has {} steps, expected {t}",
            ensemble.steps
        )));
    }
    let coin_a = Coin::rotation(masses.theta_a())?;
    let coin_b = Coin::rotation(masses.theta_b())?;
    let walk_b = evolve(spins.1, &coin_b, t);
    let field = PhaseField::build(t, geom, masses);
    let members = ensemble.merged();

    let columns: Vec<Vec<Complex64>> = members
        .par_iter()
        .map(|(flips, weight)| {
            let walk_a = noisy_walk(spins.0, &coin_a, noise.kind, flips, t)?;
            let joint = build_joint_state(&walk_a, &walk_b, &field)?;
            let scale = weight.sqrt();
            Ok(joint.amplitudes().iter().map(|a| a * scale).collect())
        })
        .collect::<Result<_>>()?;

    let dim = 4 * (2 * t + 1) * (2 * t + 1);
    let v = Mat::from_fn(dim, columns.len(), |r, c| columns[c][r]);
    let mut data = crate::linalg::gram(v.as_ref());
    symmetrize(&mut data);
    DensityMatrix::new(data, joint_structure(t))
}

/// Same mixed state built by evolving walker A's density matrix through the
/// per-step Kraus channel `{√(1-p)·I, √p·σ}`, then tensoring with walker B
/// and applying the diagonal phase on both sides.
pub fn kraus_joint_density(
    spins: (SpinState, SpinState),
    masses: &MassPair,
    geom: &GeometrySpec,
    noise: &NoiseSpec,
    t: usize,
) -> Result<DensityMatrix> {
    let n = 2 * t + 1;
    let d = 2 * n;
    let coin_a = Coin::rotation(masses.theta_a())?;
    let coin_b = Coin::rotation(masses.theta_b())?;

    let mut psi0 = vec![Complex64::new(0.0, 0.0); d];
    psi0[2 * t] = spins.0.amp_up();
    psi0[2 * t + 1] = spins.0.amp_down();
    let mut rho_a = Mat::from_fn(d, d, |r, c| psi0[r] * psi0[c].conj());

    let step = dense_step_operator(&coin_a, t);
    let pauli = noise.kind.pauli();
    let flip = Mat::from_fn(d, d, |r, c| {
        if r / 2 == c / 2 {
            Complex64::new(pauli[r % 2][c % 2], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for _ in 0..t {
        rho_a = &step * &rho_a * step.adjoint();
        let flipped = &flip * &rho_a * flip.adjoint();
        rho_a = Mat::from_fn(d, d, |r, c| {
            rho_a[(r, c)] * (1.0 - noise.p) + flipped[(r, c)] * noise.p
        });
    }

    let psi_b = evolve(spins.1, &coin_b, t).to_vector();
    let field = PhaseField::build(t, geom, masses);
    let phase = |row: usize, col: usize| Complex64::from_polar(1.0, -field.at(row / 2, col / 2));
    let data = Mat::from_fn(d * d, d * d, |r, c| {
        let (ra, rb) = (r / d, r % d);
        let (ca, cb) = (c / d, c % d);
        phase(ra, rb) * phase(ca, cb).conj() * rho_a[(ra, ca)] * psi_b[rb] * psi_b[cb].conj()
    });
    DensityMatrix::new(data, joint_structure(t))
}

fn symmetrize(m: &mut Mat<Complex64>) {
    let n = m.nrows();
    for c in 0..n {
        m[(c, c)].im = 0.0;
        for r in c + 1..n {
            let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
            m[(r, c)] = avg;
            m[(c, r)] = avg.conj();
        }
    }
}
