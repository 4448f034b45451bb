//! Experiment configuration, drivers and CSV/JSON output.
//!
//! A configuration is assembled from built-in defaults, an optional TOML file
//! and command-line overrides, in that order of increasing precedence. Every
//! driver returns a [`Table`] whose columns are fixed per experiment kind:
//!
//! | experiment          | columns                                  |
//! |---------------------|------------------------------------------|
//! | `single_walk`       | `x, probability` (or `t, mean, m2` per step) |
//! | `entanglement_curve`| `t, ee_nats, neg_full, neg_traced`       |
//! | `theta_sweep`       | `theta_a, theta_b, ee_nats, neg_full`    |
//! | `noise_curve`       | `t, neg_noiseless, neg_noisy`            |
//! | `moment_analysis`   | `theta, m2, sin2_m2`                     |

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};
use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{
    entanglement_entropy, entanglement_report, negativity, pure_state_negativity, reduce_density,
    Subsystem,
};
use crate::error::{Error, Result};
use crate::gravity::{build_joint_state, GeometrySpec, JointState, MassPair, PhaseField};
use crate::noise::{
    ensemble_joint_density, NoiseKind, NoiseSpec, TrajectoryEnsemble, DEFAULT_SAMPLES,
};
use crate::walk::{evolve, Coin, SpinState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    SingleWalk,
    EntanglementCurve,
    ThetaSweep,
    NoiseCurve,
    MomentAnalysis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Coin used by the single-walk experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinChoice {
    /// `C(θ_A)`.
    #[default]
    Rotation,
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleChoice {
    /// Exact enumeration up to 12 steps, Monte Carlo beyond.
    #[default]
    Auto,
    Exact,
    Sampled,
}

/// Fully resolved, validated experiment parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub theta_a: f64,
    pub theta_b: f64,
    pub spin_a: SpinState,
    pub spin_b: SpinState,
    pub steps: usize,
    pub separation: u32,
    pub step_ratio: f64,
    pub noise: Option<NoiseSpec>,
    pub samples: usize,
    pub ensemble: EnsembleChoice,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub coin: CoinChoice,
    /// Number of intervals splitting `[0, π/2]` for sweeps.
    pub grid_n: usize,
    /// Single walk: emit per-step moments instead of the final distribution.
    pub per_step: bool,
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            theta_a: FRAC_PI_4,
            theta_b: FRAC_PI_6,
            // equal to the spin-independent moment about the origin
            spin_a: if experiment == ExperimentKind::MomentAnalysis {
                SpinState::symmetric()
            } else {
                SpinState::UP
            },
            spin_b: SpinState::DOWN,
            steps: 15,
            separation: crate::gravity::DEFAULT_SEPARATION,
            step_ratio: 1.0,
            noise: None,
            samples: DEFAULT_SAMPLES,
            ensemble: EnsembleChoice::Auto,
            seed: 0,
            output_path: None,
            output_format: OutputFormat::Csv,
            coin: CoinChoice::Rotation,
            grid_n: 6,
            per_step: false,
        }
    }

    /// Defaults overlaid with `raw`.
    pub fn resolve(experiment: ExperimentKind, raw: &RawConfig) -> Result<Self> {
        if let Some(named) = raw.experiment {
            if named != experiment {
                return Err(Error::config(
                    "experiment",
                    format!("configuration is for {named:?}, not {experiment:?}"),
                ));
            }
        }
        let mut cfg = Self::defaults(experiment);
        if let Some(a) = &raw.theta_a {
            cfg.theta_a = a.radians("theta_a")?;
        }
        if let Some(b) = &raw.theta_b {
            cfg.theta_b = b.radians("theta_b")?;
        }
        if let Some(s) = &raw.spin_a {
            cfg.spin_a = parse_spin(s).map_err(|m| Error::config("spin_a", m))?;
        }
        if let Some(s) = &raw.spin_b {
            cfg.spin_b = parse_spin(s).map_err(|m| Error::config("spin_b", m))?;
        }
        if let Some(steps) = raw.steps {
            if steps < 1 {
                return Err(Error::config(
                    "steps",
                    format!("{steps} must be at least 1"),
                ));
            }
            cfg.steps = steps as usize;
        }
        if let Some(l) = raw.separation {
            cfg.separation = u32::try_from(l).ok().filter(|&l| l > 0).ok_or_else(|| {
                Error::config("separation", format!("{l} must be a positive integer"))
            })?;
        }
        if let Some(r) = raw.step_ratio {
            cfg.step_ratio = r;
        }
        match (raw.noise_kind, raw.noise_p) {
            (Some(kind), p) => {
                let p = p.unwrap_or(0.02);
                cfg.noise = Some(
                    NoiseSpec::new(kind, p)
                        .map_err(|_| Error::config("noise_p", format!("{p} is outside [0, 1]")))?,
                );
            }
            (None, Some(_)) => {
                return Err(Error::config(
                    "noise_kind",
                    "noise_p given without a noise kind",
                ));
            }
            (None, None) => {}
        }
        if let Some(n) = raw.samples {
            if n < 1 {
                return Err(Error::config("samples", format!("{n} must be at least 1")));
            }
            cfg.samples = n as usize;
        }
        if let Some(e) = raw.ensemble {
            cfg.ensemble = e;
        }
        if let Some(seed) = raw.seed {
            cfg.seed = seed;
        }
        if let Some(path) = &raw.output_path {
            cfg.output_path = Some(path.clone());
        }
        if let Some(f) = raw.output_format {
            cfg.output_format = f;
        }
        if let Some(c) = raw.coin {
            cfg.coin = c;
        }
        if let Some(n) = raw.grid_n {
            if n < 1 {
                return Err(Error::config("grid_n", format!("{n} must be at least 1")));
            }
            cfg.grid_n = n as usize;
        }
        if let Some(p) = raw.per_step {
            cfg.per_step = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, theta) in [("theta_a", self.theta_a), ("theta_b", self.theta_b)] {
            if !(0.0..=FRAC_PI_2).contains(&theta) {
                return Err(Error::config(
                    field,
                    format!("{theta} is outside [0, pi/2]"),
                ));
            }
        }
        if self.steps < 1 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        if !(self.step_ratio.is_finite() && self.step_ratio > 0.0) {
            return Err(Error::config(
                "step_ratio",
                format!("{} must be positive", self.step_ratio),
            ));
        }
        let two_walkers = self.experiment != ExperimentKind::SingleWalk
            && self.experiment != ExperimentKind::MomentAnalysis;
        if two_walkers && self.separation as usize <= 2 * self.steps {
            return Err(Error::config(
                "separation",
                format!(
                    "{} must exceed twice the step count ({})",
                    self.separation,
                    2 * self.steps
                ),
            ));
        }
        if self.experiment == ExperimentKind::NoiseCurve && self.noise.is_none() {
            return Err(Error::config(
                "noise_kind",
                "the noise experiment needs a flip kind",
            ));
        }
        if self.ensemble == EnsembleChoice::Exact && self.steps > crate::noise::MAX_EXACT_STEPS {
            return Err(Error::config(
                "ensemble",
                format!(
                    "exact enumeration is limited to {} steps",
                    crate::noise::MAX_EXACT_STEPS
                ),
            ));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<GeometrySpec> {
        GeometrySpec::new(self.separation, self.step_ratio)
    }

    pub fn masses(&self) -> Result<MassPair> {
        MassPair::new(self.theta_a, self.theta_b)
    }

    /// Sweep angles `k·(π/2)/grid_n` for `k = 0..=grid_n`.
    pub fn theta_grid(&self) -> Vec<f64> {
        (0..=self.grid_n)
            .map(|k| FRAC_PI_2 * k as f64 / self.grid_n as f64)
            .collect()
    }
}

/// An angle written either as radians or as an expression like `pi/4` or `5pi/12`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Expr(String),
}

impl AngleValue {
    fn radians(&self, field: &str) -> Result<f64> {
        match self {
            AngleValue::Radians(r) => Ok(*r),
            AngleValue::Expr(s) => parse_angle(s).map_err(|m| Error::config(field, m)),
        }
    }
}

/// Partially specified configuration as read from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<ExperimentKind>,
    pub theta_a: Option<AngleValue>,
    pub theta_b: Option<AngleValue>,
    pub spin_a: Option<String>,
    pub spin_b: Option<String>,
    pub steps: Option<i64>,
    pub separation: Option<i64>,
    pub step_ratio: Option<f64>,
    pub noise_kind: Option<NoiseKind>,
    pub noise_p: Option<f64>,
    pub samples: Option<i64>,
    pub ensemble: Option<EnsembleChoice>,
    pub seed: Option<u64>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<OutputFormat>,
    pub coin: Option<CoinChoice>,
    pub grid_n: Option<i64>,
    pub per_step: Option<bool>,
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Values set in `over` replace those in `self`.
    pub fn merged_with(mut self, over: RawConfig) -> RawConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(
            experiment,
            theta_a,
            theta_b,
            spin_a,
            spin_b,
            steps,
            separation,
            step_ratio,
            noise_kind,
            noise_p,
            samples,
            ensemble,
            seed,
            output_path,
            output_format,
            coin,
            grid_n,
            per_step
        );
        self
    }
}

/// Parse radians from `0.785`, `pi`, `pi/4`, `5pi/12`, `5*pi/12` or `π/3`.
pub fn parse_angle(text: &str) -> std::result::Result<f64, String> {
    let s: String = text
        .trim()
        .to_lowercase()
        .replace('π', "pi")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    let bad = || format!("cannot parse angle `{text}`");
    if !s.contains("pi") {
        return s.parse::<f64>().map_err(|_| bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?;
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let k = if coeff.is_empty() {
        1.0
    } else {
        coeff.parse::<f64>().map_err(|_| bad())?
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(k * PI / den)
}

/// Parse `up`, `down`, `plus`, `minus`, `plus-i` or `minus-i`.
///
/// `plus`/`minus` are `(|↑⟩ ± |↓⟩)/√2`, `plus-i`/`minus-i` are `(|↑⟩ ± i|↓⟩)/√2`.
pub fn parse_spin(text: &str) -> std::result::Result<SpinState, String> {
    let phase = match text.trim().to_lowercase().as_str() {
        "up" | "u" | "↑" => return Ok(SpinState::UP),
        "down" | "d" | "↓" => return Ok(SpinState::DOWN),
        "plus" | "+" => Complex64::new(1.0, 0.0),
        "minus" | "-" => Complex64::new(-1.0, 0.0),
        "plus-i" | "+i" => Complex64::new(0.0, 1.0),
        "minus-i" | "-i" => Complex64::new(0.0, -1.0),
        _ => {
            return Err(format!(
                "unknown spin `{text}` (expected up, down, plus, minus, plus-i or minus-i)"
            ))
        }
    };
    SpinState::balanced(phase).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistributionRow {
    pub x: i64,
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepMomentRow {
    pub t: usize,
    pub mean: f64,
    pub m2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub t: usize,
    pub ee_nats: f64,
    pub neg_full: f64,
    pub neg_traced: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta_a: f64,
    pub theta_b: f64,
    pub ee_nats: f64,
    pub neg_full: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseRow {
    pub t: usize,
    pub neg_noiseless: f64,
    pub neg_noisy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentRow {
    pub theta: f64,
    pub m2: f64,
    pub sin2_m2: f64,
}

/// Rows produced by one experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Table {
    Distribution(Vec<DistributionRow>),
    StepMoments(Vec<StepMomentRow>),
    Curve(Vec<CurveRow>),
    Sweep(Vec<SweepRow>),
    Noise(Vec<NoiseRow>),
    Moments(Vec<MomentRow>),
}

impl Table {
    pub fn headers(&self) -> &'static [&'static str] {
        match self {
            Table::Distribution(_) => &["x", "probability"],
            Table::StepMoments(_) => &["t", "mean", "m2"],
            Table::Curve(_) => &["t", "ee_nats", "neg_full", "neg_traced"],
            Table::Sweep(_) => &["theta_a", "theta_b", "ee_nats", "neg_full"],
            Table::Noise(_) => &["t", "neg_noiseless", "neg_noisy"],
            Table::Moments(_) => &["theta", "m2", "sin2_m2"],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Table::Distribution(r) => r.len(),
            Table::StepMoments(r) => r.len(),
            Table::Curve(r) => r.len(),
            Table::Sweep(r) => r.len(),
            Table::Noise(r) => r.len(),
            Table::Moments(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        fn rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
            Ok(())
        }
        if self.is_empty() {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(self.headers())?;
            w.flush()?;
            return Ok(());
        }
        match self {
            Table::Distribution(r) => rows(out, r),
            Table::StepMoments(r) => rows(out, r),
            Table::Curve(r) => rows(out, r),
            Table::Sweep(r) => rows(out, r),
            Table::Noise(r) => rows(out, r),
            Table::Moments(r) => rows(out, r),
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        match self {
            Table::Distribution(r) => serde_json::to_writer_pretty(&mut out, r),
            Table::StepMoments(r) => serde_json::to_writer_pretty(&mut out, r),
            Table::Curve(r) => serde_json::to_writer_pretty(&mut out, r),
            Table::Sweep(r) => serde_json::to_writer_pretty(&mut out, r),
            Table::Noise(r) => serde_json::to_writer_pretty(&mut out, r),
            Table::Moments(r) => serde_json::to_writer_pretty(&mut out, r),
        }?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: OutputFormat, out: W) -> Result<()> {
        match format {
            OutputFormat::Csv => self.write_csv(out),
            OutputFormat::Json => self.write_json(out),
        }
    }
}

fn joint_state_at(cfg: &ExperimentConfig, masses: &MassPair, t: usize) -> Result<JointState> {
    let geom = cfg.geometry()?;
    let a = evolve(cfg.spin_a, &Coin::rotation(masses.theta_a())?, t);
    let b = evolve(cfg.spin_b, &Coin::rotation(masses.theta_b())?, t);
    build_joint_state(&a, &b, &PhaseField::build(t, &geom, masses))
}

/// Final position distribution, or per-step mean and second central moment.
pub fn run_single_walk(cfg: &ExperimentConfig) -> Result<Table> {
    let coin = match cfg.coin {
        CoinChoice::Hadamard => Coin::Hadamard,
        CoinChoice::Rotation => Coin::rotation(cfg.theta_a)?,
    };
    if cfg.per_step {
        let mut state = crate::walk::WalkState::origin(cfg.spin_a);
        let mut rows = Vec::with_capacity(cfg.steps + 1);
        for t in 0..=cfg.steps {
            if t > 0 {
                state = state.step(&coin);
            }
            let dist = state.position_distribution();
            rows.push(StepMomentRow {
                t,
                mean: dist.mean(),
                m2: dist.central_moment(2)?,
            });
        }
        return Ok(Table::StepMoments(rows));
    }
    let dist = evolve(cfg.spin_a, &coin, cfg.steps).position_distribution();
    Ok(Table::Distribution(
        dist.iter()
            .map(|(x, probability)| DistributionRow { x, probability })
            .collect(),
    ))
}

/// Entropy and both negativities for `t = 1..=steps`.
pub fn run_entanglement_curve(cfg: &ExperimentConfig) -> Result<Table> {
    let masses = cfg.masses()?;
    let rows = (1..=cfg.steps)
        .into_par_iter()
        .map(|t| {
            let r = entanglement_report(&joint_state_at(cfg, &masses, t)?)?;
            Ok(CurveRow {
                t,
                ee_nats: r.entropy,
                neg_full: r.negativity_full,
                neg_traced: r.negativity_spin_traced,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::Curve(rows))
}

/// Entropy and full-state negativity at `t = steps` over the `(θ_A, θ_B)` grid,
/// `θ_A` varying slowest.
pub fn run_theta_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let grid = cfg.theta_grid();
    let points: Vec<(f64, f64)> = grid
        .iter()
        .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(theta_a, theta_b)| {
            let masses = MassPair::new(theta_a, theta_b)?;
            let state = joint_state_at(cfg, &masses, cfg.steps)?;
            let rho_b = reduce_density(&state, &Subsystem::WALKER_B)?;
            Ok(SweepRow {
                theta_a,
                theta_b,
                ee_nats: entanglement_entropy(&rho_b)?,
                neg_full: pure_state_negativity(&state)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::Sweep(rows))
}

/// Full-state negativity with and without flip noise on walker A, `t = 1..=steps`.
pub fn run_noise_curve(cfg: &ExperimentConfig) -> Result<Table> {
    let noise = cfg
        .noise
        .ok_or_else(|| Error::config("noise_kind", "the noise experiment needs a flip kind"))?;
    let masses = cfg.masses()?;
    let geom = cfg.geometry()?;
    let mut rows = Vec::with_capacity(cfg.steps);
    for t in 1..=cfg.steps {
        let neg_noiseless = pure_state_negativity(&joint_state_at(cfg, &masses, t)?)?;
        let ensemble = match cfg.ensemble {
            EnsembleChoice::Auto => TrajectoryEnsemble::auto(t, &noise, cfg.samples, cfg.seed)?,
            EnsembleChoice::Exact => TrajectoryEnsemble::exact(t, &noise)?,
            EnsembleChoice::Sampled => {
                TrajectoryEnsemble::sampled(t, &noise, cfg.samples, cfg.seed)?
            }
        };
        let rho = ensemble_joint_density(
            (cfg.spin_a, cfg.spin_b),
            &masses,
            &geom,
            &noise,
            t,
            &ensemble,
        )?;
        let neg_noisy = negativity(&rho, &Subsystem::WALKER_B)?;
        rows.push(NoiseRow {
            t,
            neg_noiseless,
            neg_noisy,
        });
    }
    Ok(Table::Noise(rows))
}

/// Second central moment of a single `C(θ)` walk at `t = steps` over the θ grid.
pub fn run_moment_analysis(cfg: &ExperimentConfig) -> Result<Table> {
    let rows = cfg
        .theta_grid()
        .into_iter()
        .map(|theta| {
            let m2 = evolve(cfg.spin_a, &Coin::rotation(theta)?, cfg.steps).central_moment(2)?;
            Ok(MomentRow {
                theta,
                m2,
                sin2_m2: theta.sin().powi(2) * m2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table::Moments(rows))
}

pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    match cfg.experiment {
        ExperimentKind::SingleWalk => run_single_walk(cfg),
        ExperimentKind::EntanglementCurve => run_entanglement_curve(cfg),
        ExperimentKind::ThetaSweep => run_theta_sweep(cfg),
        ExperimentKind::NoiseCurve => run_noise_curve(cfg),
        ExperimentKind::MomentAnalysis => run_moment_analysis(cfg),
    }
}

/// Write `table` to the configured path, or to stdout when none is set.
pub fn emit(cfg: &ExperimentConfig, table: &Table) -> Result<()> {
    match &cfg.output_path {
        Some(path) => {
            let file = std::io::BufWriter::new(std::fs::File::create(path)?);
            table.write(cfg.output_format, file)
        }
        None => table.write(cfg.output_format, std::io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn angles_parse() {
        assert_abs_diff_eq!(parse_angle("pi/4").unwrap(), FRAC_PI_4);
        assert_abs_diff_eq!(parse_angle("5pi/12").unwrap(), 5.0 * PI / 12.0);
        assert_abs_diff_eq!(parse_angle(" 2 * pi / 6 ").unwrap(), FRAC_PI_3);
        assert_abs_diff_eq!(parse_angle("π/3").unwrap(), FRAC_PI_3);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("pie/4").is_err());
        assert!(parse_angle("pi/0").is_err());
    }

    #[test]
    fn spins_parse() {
        assert_eq!(parse_spin("up").unwrap(), SpinState::UP);
        assert_eq!(parse_spin("Down").unwrap(), SpinState::DOWN);
        assert_eq!(parse_spin("plus-i").unwrap(), SpinState::symmetric());
        assert!(parse_spin("sideways").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let file = RawConfig::from_toml_str("theta_a = \"pi/3\"\nsteps = 10\nseed = 4\n").unwrap();
        let flags = RawConfig {
            steps: Some(12),
            ..Default::default()
        };
        let cfg =
            ExperimentConfig::resolve(ExperimentKind::EntanglementCurve, &file.merged_with(flags))
                .unwrap();
        assert_eq!(cfg.steps, 12);
        assert_eq!(cfg.seed, 4);
        assert_abs_diff_eq!(cfg.theta_a, FRAC_PI_3);
        assert_abs_diff_eq!(cfg.theta_b, FRAC_PI_6);
    }

    #[test]
    fn invalid_values_name_their_field() {
        let check = |text: &str, field: &str| {
            let raw = RawConfig::from_toml_str(text).unwrap();
            match ExperimentConfig::resolve(ExperimentKind::EntanglementCurve, &raw) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        };
        check("steps = 0", "steps");
        check("steps = 60", "separation");
        check("theta_b = 2.0", "theta_b");
        check("spin_a = \"left\"", "spin_a");
        check("step_ratio = -1.0", "step_ratio");
        check("noise_kind = \"bit_flip\"\nnoise_p = 1.5", "noise_p");
        assert!(RawConfig::from_toml_str("colour = 3").is_err());
        let raw = RawConfig::default();
        assert!(matches!(
            ExperimentConfig::resolve(ExperimentKind::NoiseCurve, &raw),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn single_walk_keeps_zero_odd_sites() {
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::SingleWalk);
        cfg.steps = 10;
        cfg.coin = CoinChoice::Hadamard;
        let Table::Distribution(rows) = run_single_walk(&cfg).unwrap() else {
            panic!()
        };
        assert_eq!(rows.len(), 21);
        for r in &rows {
            if r.x % 2 != 0 {
                assert_eq!(r.probability, 0.0);
            }
        }
    }

    #[test]
    fn massless_curve_is_zero() {
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::EntanglementCurve);
        cfg.theta_a = 0.0;
        cfg.steps = 6;
        let Table::Curve(rows) = run_entanglement_curve(&cfg).unwrap() else {
            panic!()
        };
        assert_eq!(rows.len(), 6);
        for r in rows {
            assert!(
                r.ee_nats.abs() < 1e-12 && r.neg_full.abs() < 1e-12 && r.neg_traced.abs() < 1e-12
            );
        }
    }

    #[test]
    fn csv_headers_are_fixed() {
        let mut buf = Vec::new();
        Table::Noise(vec![NoiseRow {
            t: 1,
            neg_noiseless: 0.5,
            neg_noisy: 0.25,
        }])
        .write_csv(&mut buf)
        .unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,neg_noiseless,neg_noisy\n1,0.5,0.25\n"
        );
        let mut empty = Vec::new();
        Table::Sweep(vec![]).write_csv(&mut empty).unwrap();
        assert_eq!(
            String::from_utf8(empty).unwrap(),
            "theta_a,theta_b,ee_nats,neg_full\n"
        );
    }
}
