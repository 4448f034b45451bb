//! Single-walker discrete-time quantum walk on the integer line.
//!
//! A walker starts localized at the origin. One step applies a coin to the
//! spin doublet at every site, then shifts `|↑⟩` components one site left and
//! `|↓⟩` components one site right. After `t` steps the support is contained
//! in `[-t, t]`, which is exactly the range stored.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the norm of a spin state used as an initial condition.
pub const SPIN_NORM_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Internal two-level register basis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// A normalized spin doublet `amp_up |↑⟩ + amp_down |↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    amp_up: Complex64,
    amp_down: Complex64,
}

impl SpinState {
    pub const UP: SpinState = SpinState {
        amp_up: Complex64::new(1.0, 0.0),
        amp_down: ZERO,
    };
    pub const DOWN: SpinState = SpinState {
        amp_up: ZERO,
        amp_down: Complex64::new(1.0, 0.0),
    };

    pub fn new(amp_up: Complex64, amp_down: Complex64) -> Result<Self> {
        let norm = amp_up.norm_sqr() + amp_down.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > SPIN_NORM_TOLERANCE {
            return Err(Error::invalid(
                "spin",
                format!("|up|^2 + |down|^2 = {norm}, expected 1"),
            ));
        }
        Ok(SpinState { amp_up, amp_down })
    }

    /// `(|↑⟩ + phase·|↓⟩)/√2` for a unit-modulus `phase`.
    pub fn balanced(phase: Complex64) -> Result<Self> {
        Self::new(Complex64::new(FRAC_1_SQRT_2, 0.0), phase * FRAC_1_SQRT_2)
    }

    /// `(|↑⟩ + i|↓⟩)/√2`, the initial spin giving a left/right symmetric Hadamard walk.
    pub fn symmetric() -> Self {
        SpinState {
            amp_up: Complex64::new(FRAC_1_SQRT_2, 0.0),
            amp_down: Complex64::new(0.0, FRAC_1_SQRT_2),
        }
    }

    pub fn amp_up(&self) -> Complex64 {
        self.amp_up
    }

    pub fn amp_down(&self) -> Complex64 {
        self.amp_down
    }

    pub fn as_array(&self) -> [Complex64; 2] {
        [self.amp_up, self.amp_down]
    }
}

impl From<Spin> for SpinState {
    fn from(spin: Spin) -> Self {
        match spin {
            Spin::Up => SpinState::UP,
            Spin::Down => SpinState::DOWN,
        }
    }
}

/// Rotation coin `C(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]` with θ in `[0, π/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinSpec {
    theta: f64,
}

impl CoinSpec {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::invalid(
                "theta",
                format!("{theta} is outside [0, pi/2]"),
            ));
        }
        Ok(CoinSpec { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        [[c, s], [-s, c]]
    }
}

/// Coin applied to the spin register at every site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coin {
    Hadamard,
    Rotation(CoinSpec),
}

impl Coin {
    pub fn rotation(theta: f64) -> Result<Self> {
        CoinSpec::new(theta).map(Coin::Rotation)
    }

    /// Real 2×2 matrix acting on `(amp_up, amp_down)` as a column vector.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        match self {
            Coin::Hadamard => [
                [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
                [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            ],
            Coin::Rotation(spec) => spec.matrix(),
        }
    }
}

impl From<CoinSpec> for Coin {
    fn from(spec: CoinSpec) -> Self {
        Coin::Rotation(spec)
    }
}

pub(crate) fn apply_2x2(m: &[[f64; 2]; 2], v: [Complex64; 2]) -> [Complex64; 2] {
    [
        v[0] * m[0][0] + v[1] * m[0][1],
        v[0] * m[1][0] + v[1] * m[1][1],
    ]
}

/// Amplitudes of one walker after `t` steps over `[-t, t] × {↑, ↓}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    t: usize,
    // index k holds position x = k - t
    amps: Vec<[Complex64; 2]>,
}

impl WalkState {
    /// Walker localized at the origin with the given spin.
    pub fn origin(spin: SpinState) -> Self {
        WalkState {
            t: 0,
            amps: vec![spin.as_array()],
        }
    }

    /// Build a state from explicit amplitudes over `[-t, t]`.
    pub fn from_amplitudes(t: usize, amps: Vec<[Complex64; 2]>) -> Result<Self> {
        if amps.len() != 2 * t + 1 {
            return Err(Error::Mismatch(format!(
                "{} sites supplied for step {t}, expected {}",
                amps.len(),
                2 * t + 1
            )));
        }
        Ok(WalkState { t, amps })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        let t = self.t as i64;
        -t..=t
    }

    pub fn sites(&self) -> &[[Complex64; 2]] {
        &self.amps
    }

    pub(crate) fn sites_mut(&mut self) -> &mut [[Complex64; 2]] {
        &mut self.amps
    }

    /// Amplitude at `(x, spin)`; zero outside the stored support.
    pub fn amplitude(&self, x: i64, spin: Spin) -> Complex64 {
        let k = x + self.t as i64;
        if k < 0 || k as usize >= self.amps.len() {
            return ZERO;
        }
        self.amps[k as usize][spin.index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps
            .iter()
            .map(|s| s[0].norm_sqr() + s[1].norm_sqr())
            .sum()
    }

    /// Flattened `(position, spin)` amplitudes, index `2·(x + t) + spin`.
    pub fn to_vector(&self) -> Vec<Complex64> {
        self.amps.iter().flat_map(|s| s.iter().copied()).collect()
    }

    pub fn coin_step(&self, coin: &Coin) -> WalkState {
        let m = coin.matrix();
        WalkState {
            t: self.t,
            amps: self.amps.iter().map(|&s| apply_2x2(&m, s)).collect(),
        }
    }

    pub fn shift_step(&self) -> WalkState {
        let mut amps = vec![[ZERO; 2]; self.amps.len() + 2];
        for (k, s) in self.amps.iter().enumerate() {
            // old x = k - t maps to new index (x ∓ 1) + t + 1
            amps[k][0] = s[0];
            amps[k + 2][1] = s[1];
        }
        WalkState {
            t: self.t + 1,
            amps,
        }
    }

    /// One full walk step: coin, then shift.
    pub fn step(&self, coin: &Coin) -> WalkState {
        self.coin_step(coin).shift_step()
    }

    pub fn position_distribution(&self) -> PositionDistribution {
        PositionDistribution {
            t: self.t,
            probs: self
                .amps
                .iter()
                .map(|s| s[0].norm_sqr() + s[1].norm_sqr())
                .collect(),
        }
    }

    pub fn central_moment(&self, k: u32) -> Result<f64> {
        self.position_distribution().central_moment(k)
    }
}

/// Walker localized at the origin with `initial_spin`, advanced `steps` times.
pub fn evolve(initial_spin: SpinState, coin: &Coin, steps: usize) -> WalkState {
    let mut state = WalkState::origin(initial_spin);
    for _ in 0..steps {
        state = state.step(coin);
    }
    state
}

/// Probability of finding the walker at each site of `[-t, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    t: usize,
    probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(t: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 2 * t + 1 {
            return Err(Error::Mismatch(format!(
                "{} probabilities for step {t}, expected {}",
                probs.len(),
                2 * t + 1
            )));
        }
        Ok(PositionDistribution { t, probs })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, x: i64) -> f64 {
        let k = x + self.t as i64;
        if k < 0 || k as usize >= self.probs.len() {
            return 0.0;
        }
        self.probs[k as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.t as i64;
        self.probs
            .iter()
            .enumerate()
            .map(move |(k, &p)| (k as i64 - t, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| p * x as f64).sum()
    }

    /// `Σ P(x) (x - μ)^k`.
    pub fn central_moment(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(Error::invalid("k", "moment order must be at least 1"));
        }
        let mu = self.mean();
        Ok(self
            .iter()
            .map(|(x, p)| p * (x as f64 - mu).powi(k as i32))
            .sum())
    }

    /// `Σ P(x) x^k`, the moment about the origin.
    pub fn raw_moment(&self, k: u32) -> f64 {
        self.iter()
            .map(|(x, p)| p * (x as f64).powi(k as i32))
            .sum()
    }
}

/// Dense single-step operator `S·(I ⊗ C)` on the fixed lattice `[-half_width, half_width]`.
///
/// Basis index is `2·(x + half_width) + spin`. Amplitude shifted past the edge
/// is dropped, so the matrix is unitary only on states that stay one site away
/// from the boundary.
pub fn dense_step_operator(coin: &Coin, half_width: usize) -> Mat<Complex64> {
    let sites = 2 * half_width + 1;
    let m = coin.matrix();
    Mat::from_fn(2 * sites, 2 * sites, |row, col| {
        let (to_site, to_spin) = (row / 2, row % 2);
        let (from_site, from_spin) = (col / 2, col % 2);
        let target = match to_spin {
            0 => from_site.checked_sub(1),
            _ => Some(from_site + 1),
        };
        if target == Some(to_site) {
            Complex64::new(m[to_spin][from_spin], 0.0)
        } else {
            ZERO
        }
    })
}
