//! Density matrices over labelled subsystems, partial traces and transposes,
//! entanglement entropy and negativity.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gravity::JointState;
use crate::linalg;

/// Eigenvalues below this contribute nothing to the entropy.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Largest tolerated `|ρ_rc - conj(ρ_cr)|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Largest tolerated `|tr ρ - 1|`.
pub const TRACE_TOLERANCE: f64 = 1e-10;

/// Tensor factors of the two-walker Hilbert space, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    PosA,
    SpinA,
    PosB,
    SpinB,
}

impl Subsystem {
    pub const ALL: [Subsystem; 4] = [
        Subsystem::PosA,
        Subsystem::SpinA,
        Subsystem::PosB,
        Subsystem::SpinB,
    ];

    /// Position and spin of walker A.
    pub const WALKER_A: [Subsystem; 2] = [Subsystem::PosA, Subsystem::SpinA];

    /// Position and spin of walker B.
    pub const WALKER_B: [Subsystem; 2] = [Subsystem::PosB, Subsystem::SpinB];

    pub fn label(self) -> &'static str {
        match self {
            Subsystem::PosA => "posA",
            Subsystem::SpinA => "spinA",
            Subsystem::PosB => "posB",
            Subsystem::SpinB => "spinB",
        }
    }

    fn joint_dim(self, t: usize) -> usize {
        match self {
            Subsystem::PosA | Subsystem::PosB => 2 * t + 1,
            Subsystem::SpinA | Subsystem::SpinB => 2,
        }
    }
}

/// Hermitian, unit-trace operator on an ordered product of subsystems.
///
/// Basis indices are mixed-radix over `structure`, first factor most
/// significant.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: Mat<Complex64>,
    structure: Vec<(Subsystem, usize)>,
}

impl DensityMatrix {
    pub fn new(data: Mat<Complex64>, structure: Vec<(Subsystem, usize)>) -> Result<Self> {
        let dim: usize = structure.iter().map(|&(_, d)| d).product();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::Mismatch(format!(
                "{}x{} matrix for a structure of dimension {dim}",
                data.nrows(),
                data.ncols()
            )));
        }
        let mut labels: Vec<_> = structure.iter().map(|&(s, _)| s).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != structure.len() {
            return Err(Error::invalid("structure", "repeated subsystem label"));
        }
        let deviation = linalg::hermitian_deviation(data.as_ref());
        if deviation > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = linalg::trace(data.as_ref());
        if (tr - 1.0).norm() > TRACE_TOLERANCE {
            return Err(Error::invalid("density matrix", format!("trace is {tr}")));
        }
        Ok(DensityMatrix { data, structure })
    }

    /// `|Ψ⟩⟨Ψ|` on all four subsystems. Dimension `4(2t+1)²`, so keep `t` small.
    pub fn from_pure(state: &JointState) -> Self {
        let v = state.amplitudes();
        let n = v.len();
        let data = Mat::from_fn(n, n, |r, c| v[r] * v[c].conj());
        DensityMatrix {
            data,
            structure: Subsystem::ALL
                .iter()
                .map(|&s| (s, s.joint_dim(state.t())))
                .collect(),
        }
    }

    pub fn data(&self) -> &Mat<Complex64> {
        &self.data
    }

    pub fn structure(&self) -> &[(Subsystem, usize)] {
        &self.structure
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(self.data.as_ref())
    }

    /// Eigenvalues in nondecreasing order.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.data.as_ref())
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.structure.len()];
        for k in (0..self.structure.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.structure[k + 1].1;
        }
        strides
    }
}

fn canonical_set(subsystems: &[Subsystem]) -> Vec<Subsystem> {
    let mut set = subsystems.to_vec();
    set.sort();
    set.dedup();
    set
}

/// Partial trace of `|Ψ⟩⟨Ψ|` onto the subsystems in `keep`.
///
/// `keep` must be a nonempty proper subset of the four subsystems; the result
/// lists them in canonical order.
pub fn reduce_density(state: &JointState, keep: &[Subsystem]) -> Result<DensityMatrix> {
    let keep = canonical_set(keep);
    if keep.is_empty() || keep.len() == Subsystem::ALL.len() {
        return Err(Error::invalid(
            "keep",
            "must be a nonempty proper subset of {posA, spinA, posB, spinB}",
        ));
    }
    let t = state.t();
    let dims: Vec<usize> = Subsystem::ALL.iter().map(|s| s.joint_dim(t)).collect();
    let kept: Vec<usize> = (0..4)
        .filter(|&k| keep.contains(&Subsystem::ALL[k]))
        .collect();
    let traced: Vec<usize> = (0..4).filter(|&k| !kept.contains(&k)).collect();
    let dim_of = |axes: &[usize]| axes.iter().map(|&k| dims[k]).product::<usize>();
    let (dk, dt) = (dim_of(&kept), dim_of(&traced));

    let amps = state.amplitudes();
    let mut coeff = Mat::<Complex64>::zeros(dk, dt);
    let mut digits = [0usize; 4];
    for (flat, &amp) in amps.iter().enumerate() {
        let mut rest = flat;
        for k in (0..4).rev() {
            digits[k] = rest % dims[k];
            rest /= dims[k];
        }
        let index = |axes: &[usize]| axes.iter().fold(0, |acc, &k| acc * dims[k] + digits[k]);
        coeff[(index(&kept), index(&traced))] = amp;
    }
    let data = linalg::gram(coeff.as_ref());
    let structure = kept.iter().map(|&k| (Subsystem::ALL[k], dims[k])).collect();
    Ok(DensityMatrix { data, structure })
}

/// `-Σ λ ln λ` over a spectrum, with eigenvalues clamped to `[0, 1]`.
pub fn entropy_from_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > EIGENVALUE_FLOOR)
        .map(|l| -l * l.ln())
        .sum::<f64>()
        + 0.0
}

/// Von Neumann entropy of `rho` in nats.
pub fn entanglement_entropy(rho: &DensityMatrix) -> Result<f64> {
    let deviation = linalg::hermitian_deviation(rho.data.as_ref());
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(entropy_from_spectrum(&rho.spectrum()?))
}

/// Transpose the indices of the listed subsystems.
pub fn partial_transpose(rho: &DensityMatrix, subsystems: &[Subsystem]) -> Result<Mat<Complex64>> {
    let chosen = canonical_set(subsystems);
    if chosen.is_empty() {
        return Err(Error::invalid("subsystem", "no subsystem given"));
    }
    for s in &chosen {
        if !rho.structure.iter().any(|(label, _)| label == s) {
            return Err(Error::invalid(
                "subsystem",
                format!("{} is not part of this density matrix", s.label()),
            ));
        }
    }
    let n = rho.dim();
    let strides = rho.strides();
    // split every basis index into the part carried by the chosen factors and the rest
    let selected: Vec<usize> = (0..n)
        .map(|idx| {
            rho.structure
                .iter()
                .zip(&strides)
                .filter(|((label, _), _)| chosen.contains(label))
                .map(|((_, d), &s)| (idx / s) % d * s)
                .sum()
        })
        .collect();
    let mut out = Mat::<Complex64>::zeros(n, n);
    for c in 0..n {
        let (c_sel, c_rest) = (selected[c], c - selected[c]);
        for r in 0..n {
            let (r_sel, r_rest) = (selected[r], r - selected[r]);
            out[(r_rest + c_sel, c_rest + r_sel)] = rho.data[(r, c)];
        }
    }
    Ok(out)
}

/// `Σ (|λ| - λ)/2`.
pub fn negativity_from_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues.iter().map(|&l| (l.abs() - l) / 2.0).sum()
}

/// Negativity of `rho` with respect to the listed subsystems.
pub fn negativity(rho: &DensityMatrix, subsystems: &[Subsystem]) -> Result<f64> {
    let pt = partial_transpose(rho, subsystems)?;
    let spectrum = linalg::hermitian_eigenvalues(pt.as_ref())?;
    Ok(negativity_from_spectrum(&spectrum))
}

/// Schmidt coefficients of a pure joint state across walker A | walker B.
pub fn schmidt_coefficients(state: &JointState) -> Result<Vec<f64>> {
    linalg::singular_values(state.coefficient_matrix().as_ref())
}

/// Negativity of `|Ψ⟩⟨Ψ|` across walker A | walker B from its Schmidt coefficients.
///
/// For a pure state the partial-transpose spectrum is `{σ_k², ±σ_k σ_l}`, so
/// the negativity equals `Σ_{k<l} σ_k σ_l = ((Σσ)² - Σσ²)/2`. This avoids an
/// eigensolve of dimension `4(2t+1)²`.
pub fn pure_state_negativity(state: &JointState) -> Result<f64> {
    let sigma = schmidt_coefficients(state)?;
    let sum: f64 = sigma.iter().sum();
    let sum_sq: f64 = sigma.iter().map(|s| s * s).sum();
    Ok(((sum * sum - sum_sq) / 2.0).max(0.0))
}

/// Entanglement entropy and negativities of one phased state.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EntanglementReport {
    pub t: usize,
    pub entropy: f64,
    pub negativity_full: f64,
    pub negativity_spin_traced: f64,
}

/// Entropy of walker B's reduced state, negativity of the full state across
/// A | B, and negativity of the spin-traced state across posA | posB.
pub fn entanglement_report(state: &JointState) -> Result<EntanglementReport> {
    let rho_b = reduce_density(state, &Subsystem::WALKER_B)?;
    let entropy = entanglement_entropy(&rho_b)?;
    let negativity_full = pure_state_negativity(state)?;
    let negativity_spin_traced = spin_traced_negativity(state)?;
    Ok(EntanglementReport {
        t: state.t(),
        entropy,
        negativity_full,
        negativity_spin_traced,
    })
}

/// Negativity between the two walkers' positions after both spins are traced out.
pub fn spin_traced_negativity(state: &JointState) -> Result<f64> {
    let rho = reduce_density(state, &[Subsystem::PosA, Subsystem::PosB])?;
    negativity(&rho, &[Subsystem::PosB])
}
