//! The spectral measure of a first moment operator, and the quantities that
//! set it against the covariant POVM sharing that first moment.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval_sets::{CircleSet, RealSet, MERGE_TOL};
use crate::linalg::{
    default_cluster_tol, eigendecompose, operator_norm, HermitianOperator, SpectralDecomposition,
    StateVector,
};
use crate::moments::{moment_operator, noise_operator};
use crate::phase_povm::{Indexing, PhasePovm};

/// Projection-valued measure `X -> sum_{lambda_j in X} P_j` of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct BinnedSpectralMeasure {
    source: HermitianOperator,
    decomposition: SpectralDecomposition,
}

/// Spectral measure with the default clustering tolerance.
pub fn spectral_measure(a: &HermitianOperator) -> Result<BinnedSpectralMeasure> {
    BinnedSpectralMeasure::with_cluster_tol(a, default_cluster_tol(a)?)
}

impl BinnedSpectralMeasure {
    pub fn with_cluster_tol(a: &HermitianOperator, cluster_tol: f64) -> Result<Self> {
        let decomposition = eigendecompose(a, cluster_tol)?;
        Ok(Self {
            source: a.clone(),
            decomposition,
        })
    }

    pub fn source(&self) -> &HermitianOperator {
        &self.source
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.decomposition.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// `E(X)`.
    pub fn value(&self, set: &RealSet) -> HermitianOperator {
        self.decomposition
            .functional_calculus(|lambda| if set.contains(lambda) { 1.0 } else { 0.0 })
    }

    /// `|| int x dE - A ||`, the first-moment check.
    pub fn moment_defect(&self) -> Result<f64> {
        operator_norm(&self.decomposition.reassemble().sub(&self.source)?)
    }

    /// `|| E(X) E(Y) - E(X n Y) ||`.
    pub fn multiplicativity_defect(&self, x: &RealSet, y: &RealSet) -> Result<f64> {
        let prod = self.value(x).matrix().matmul(self.value(y).matrix())?;
        prod.sub(self.value(&x.intersection(y)).matrix())?
            .spectral_norm()
    }

    /// `|| e^{ixN} E(X) e^{-ixN} - E(X + x) ||` with `X` a circle set and the
    /// eigenvalue bins rotated modulo `2pi`.
    pub fn covariance_defect(&self, indexing: Indexing, set: &CircleSet, x: f64) -> Result<f64> {
        if indexing.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: indexing.dim(),
            });
        }
        let u = indexing.phase_unitary(x);
        let rotated = self.value(&set.to_real_set()).conjugate_by(&u)?;
        let shifted = self.value(&set.shift(x).to_real_set());
        operator_norm(&rotated.sub(&shifted)?)
    }
}

/// Operator measures that can be evaluated on a partition of their value space.
pub trait OperatorMeasure {
    type Set;

    fn dim(&self) -> usize;

    fn evaluate(&self, set: &Self::Set) -> HermitianOperator;

    /// Errors unless `partition` is pairwise disjoint and covers the relevant space.
    fn check_partition(&self, partition: &[Self::Set]) -> Result<()>;
}

impl OperatorMeasure for PhasePovm {
    type Set = CircleSet;

    fn dim(&self) -> usize {
        PhasePovm::dim(self)
    }

    fn evaluate(&self, set: &CircleSet) -> HermitianOperator {
        self.value(set)
    }

    fn check_partition(&self, partition: &[CircleSet]) -> Result<()> {
        for (i, a) in partition.iter().enumerate() {
            for b in &partition[i + 1..] {
                if !a.is_disjoint(b) {
                    return Err(Error::InvalidPartition("cells overlap".into()));
                }
            }
        }
        let total: f64 = partition.iter().map(CircleSet::measure).sum();
        if (total - TAU).abs() > 1e-12 {
            return Err(Error::InvalidPartition(format!(
                "cells cover measure {total}, not 2pi"
            )));
        }
        Ok(())
    }
}

impl OperatorMeasure for BinnedSpectralMeasure {
    type Set = RealSet;

    fn dim(&self) -> usize {
        BinnedSpectralMeasure::dim(self)
    }

    fn evaluate(&self, set: &RealSet) -> HermitianOperator {
        self.value(set)
    }

    /// Cells must be disjoint and every eigenvalue must fall in one of them.
    fn check_partition(&self, partition: &[RealSet]) -> Result<()> {
        for (i, a) in partition.iter().enumerate() {
            for b in &partition[i + 1..] {
                if !a.intersection(b).is_empty() {
                    return Err(Error::InvalidPartition("cells overlap".into()));
                }
            }
        }
        if let Some(lambda) = self
            .eigenvalues()
            .iter()
            .find(|&&l| !partition.iter().any(|s| s.contains(l)))
        {
            return Err(Error::InvalidPartition(format!(
                "eigenvalue {lambda} is not covered"
            )));
        }
        Ok(())
    }
}

/// Outcome probabilities `<phi|M(X_i) phi>` over a partition.
pub fn distribution<M: OperatorMeasure>(
    measure: &M,
    phi: &StateVector,
    partition: &[M::Set],
) -> Result<Vec<f64>> {
    if phi.dim() != measure.dim() {
        return Err(Error::DimensionMismatch {
            expected: measure.dim(),
            found: phi.dim(),
        });
    }
    measure.check_partition(partition)?;
    partition
        .iter()
        .map(|cell| measure.evaluate(cell).expectation(phi))
        .collect()
}

/// Uniform partition of the circle into `bins` cells.
pub fn uniform_circle_partition(bins: usize) -> Result<Vec<CircleSet>> {
    let width = TAU / bins as f64;
    (0..bins)
        .map(|i| {
            let hi = if i + 1 == bins {
                TAU
            } else {
                width * (i + 1) as f64
            };
            CircleSet::interval(width * i as f64, hi)
        })
        .collect()
}

/// First and second moments of the POVM and of the spectral measure of its
/// first moment, in one vector state.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub state: StateVector,
    /// `<phi|F[1] phi>`.
    pub mean: f64,
    /// `sum_j lambda_j <phi|P_j phi>`.
    pub mean_spectral: f64,
    pub var_povm: f64,
    pub var_spectral: f64,
    /// `<phi|(F[2] - F[1]^2) phi>`.
    pub noise: f64,
}

impl VarianceReport {
    /// `var_povm - var_spectral - noise`; zero up to rounding.
    pub fn residual(&self) -> f64 {
        self.var_povm - self.var_spectral - self.noise
    }
}

/// The spectral side is computed from the eigen-decomposition of `F[1]`, the
/// POVM side from `F[1]` and `F[2]` directly.
pub fn variance_report(povm: &PhasePovm, phi: &StateVector) -> Result<VarianceReport> {
    let f1 = moment_operator(povm, 1);
    let spectral = spectral_measure(&f1)?;
    variance_report_with(povm, &spectral, phi)
}

/// As [`variance_report`], reusing a precomputed spectral measure of `F[1]`.
pub fn variance_report_with(
    povm: &PhasePovm,
    spectral: &BinnedSpectralMeasure,
    phi: &StateVector,
) -> Result<VarianceReport> {
    let f1 = moment_operator(povm, 1);
    let f2 = moment_operator(povm, 2);
    let mean = f1.expectation(phi)?;
    let weights: Vec<f64> = spectral
        .decomposition()
        .projections
        .iter()
        .map(|p| p.expectation(phi))
        .collect::<Result<_>>()?;
    let lambdas = spectral.eigenvalues();
    let mean_spectral: f64 = lambdas.iter().zip(&weights).map(|(l, w)| l * w).sum();
    let second_spectral: f64 = lambdas.iter().zip(&weights).map(|(l, w)| l * l * w).sum();
    Ok(VarianceReport {
        state: phi.clone(),
        mean,
        mean_spectral,
        var_povm: f2.expectation(phi)? - mean * mean,
        var_spectral: second_spectral - mean_spectral * mean_spectral,
        noise: noise_operator(povm)?.expectation(phi)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportComparison {
    /// `(min, max)` eigenvalue of `F[1]`.
    pub spectrum_interval: (f64, f64),
    /// Support of the untruncated POVM, always `[0, 2pi]`.
    pub povm_support: (f64, f64),
    pub inclusion_ok: bool,
}

pub fn support_compare(povm: &PhasePovm) -> Result<SupportComparison> {
    let eig = moment_operator(povm, 1).eigh()?;
    let lo = eig.values.first().copied().unwrap_or(f64::NAN);
    let hi = eig.values.last().copied().unwrap_or(f64::NAN);
    Ok(SupportComparison {
        spectrum_interval: (lo, hi),
        povm_support: (0.0, TAU),
        inclusion_ok: lo >= -1e-9 && hi <= TAU + 1e-9,
    })
}

/// Norm of the central `window x window` block of `F(X)^2 - F(X)`.
pub fn idempotence_defect(povm: &PhasePovm, set: &CircleSet, window: usize) -> Result<f64> {
    let dim = povm.dim();
    if window > dim {
        return Err(Error::WindowTooLarge { window, dim });
    }
    if window == 0 {
        return Ok(0.0);
    }
    let f = povm.value(set);
    let defect = f.square()?.sub(&f)?;
    let start = (dim - window) / 2;
    operator_norm(&defect.sub_block(start, window))
}

/// Cells `[edges[i], edges[i+1])` with unbounded first and last cells.
pub fn real_partition(edges: &[f64]) -> Result<Vec<RealSet>> {
    let mut bounds = vec![f64::NEG_INFINITY];
    bounds.extend_from_slice(edges);
    bounds.push(f64::INFINITY);
    if bounds.windows(2).any(|w| w[1] - w[0] <= MERGE_TOL) {
        return Err(Error::InvalidPartition(
            "edges must be strictly increasing".into(),
        ));
    }
    bounds
        .windows(2)
        .map(|w| RealSet::interval(w[0], w[1]))
        .collect()
}
