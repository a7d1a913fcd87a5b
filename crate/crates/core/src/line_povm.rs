//! Translation-covariant smeared position measures on a uniform grid.
//!
//! Positions `q_j` live on a centered grid. A probability density `f`
//! (given in closed form) turns the sharp position measure into
//!
//! ```text
//! E^{Q,f}(X)_{jj} = int_X f(q_j - y) dy
//! ```
//!
//! so a particle at `q` produces outcomes `y = q - Z` with `Z ~ f`, of mean
//! `q - mean(f)`. Set values are exact (CDF differences); first moments and
//! variances are taken over outcome cells of width `spacing` centered on the
//! grid points, which is where the discretization error lives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::RealSet;
use crate::linalg::{DiagonalOperator, StateVector};

/// Probability mass allowed to leave the grid window before a result carries a warning.
pub const BOUNDARY_WARNING_MASS: f64 = 1e-6;
/// Boundary mass above which the variance check refuses to run.
pub const BOUNDARY_PRECONDITION_MASS: f64 = 1e-8;
/// Lost outcome mass below which a grid point counts as interior.
pub const INTERIOR_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineGrid {
    pub n_points: usize,
    pub spacing: f64,
}

impl LineGrid {
    pub fn new(n_points: usize, spacing: f64) -> Result<Self> {
        let grid = Self { n_points, spacing };
        grid.validate()?;
        Ok(grid)
    }

    /// Centered grid of spacing `spacing` covering `[-half_extent, half_extent]`.
    pub fn symmetric(half_extent: f64, spacing: f64) -> Result<Self> {
        let half = (half_extent / spacing).round() as usize;
        Self::new(2 * half + 1, spacing)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {}",
                self.n_points
            )));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacing {} must be positive",
                self.spacing
            )));
        }
        Ok(())
    }

    /// `x_j = (j - (n - 1)/2) * spacing`.
    pub fn point(&self, j: usize) -> f64 {
        (j as f64 - (self.n_points as f64 - 1.0) / 2.0) * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.point(j)).collect()
    }

    /// Union of all outcome cells, `[x_0 - h/2, x_{n-1} + h/2)`.
    pub fn window(&self) -> (f64, f64) {
        let h = 0.5 * self.spacing;
        (self.point(0) - h, self.point(self.n_points - 1) + h)
    }

    /// `Q` as a diagonal operator.
    pub fn position_operator(&self) -> DiagonalOperator {
        DiagonalOperator::new(self.points())
    }

    /// Discretized Gaussian wave packet with `|phi|^2` of the given center and width.
    pub fn gaussian_state(&self, center: f64, width: f64) -> Result<StateVector> {
        let amps = self
            .points()
            .iter()
            .map(|&x| {
                let u = (x - center) / width;
                num_complex::Complex64::new((-0.25 * u * u).exp(), 0.0)
            })
            .collect();
        StateVector::normalized(amps)
    }
}

/// Closed-form generator of a probability density on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensityKind {
    /// Uniform on `[center - half_width, center + half_width]`.
    Uniform {
        half_width: f64,
        #[serde(default)]
        center: f64,
    },
    Gaussian {
        sigma: f64,
        #[serde(default)]
        center: f64,
    },
    /// All mass at `center`.
    Delta {
        #[serde(default)]
        center: f64,
    },
    /// Histogram with cells of width `spacing` centered on the grid points.
    Table { values: Vec<f64> },
}

/// A probability density together with its cell-averaged samples on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    grid: LineGrid,
    kind: DensityKind,
    samples: Vec<f64>,
}

impl DensityProfile {
    pub fn new(grid: LineGrid, kind: DensityKind) -> Result<Self> {
        grid.validate()?;
        let kind = match kind {
            DensityKind::Uniform { half_width, .. }
                if !(half_width > 0.0 && half_width.is_finite()) =>
            {
                return Err(Error::InvalidDensity(format!(
                    "half width {half_width} must be positive"
                )))
            }
            DensityKind::Gaussian { sigma, .. } if !(sigma > 0.0 && sigma.is_finite()) => {
                return Err(Error::InvalidDensity(format!(
                    "sigma {sigma} must be positive"
                )))
            }
            DensityKind::Table { values } => {
                if values.len() != grid.n_points {
                    return Err(Error::InvalidDensity(format!(
                        "table has {} values for {} grid points",
                        values.len(),
                        grid.n_points
                    )));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::InvalidDensity(
                        "table values must be finite and nonnegative".into(),
                    ));
                }
                let mass: f64 = values.iter().sum::<f64>() * grid.spacing;
                if mass <= 0.0 {
                    return Err(Error::InvalidDensity("table has zero mass".into()));
                }
                DensityKind::Table {
                    values: values.iter().map(|v| v / mass).collect(),
                }
            }
            other => other,
        };
        let mut profile = Self {
            grid,
            kind,
            samples: Vec::new(),
        };
        let h = 0.5 * grid.spacing;
        profile.samples = grid
            .points()
            .iter()
            .map(|&x| (profile.cdf(x + h) - profile.cdf(x - h)) / grid.spacing)
            .collect();
        let mass: f64 = profile.samples.iter().sum::<f64>() * grid.spacing;
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidDensity(format!(
                "grid captures mass {mass}, not 1"
            )));
        }
        Ok(profile)
    }

    pub fn grid(&self) -> LineGrid {
        self.grid
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    /// Cell averages `f_j`, with `sum f_j * spacing = 1`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Right-continuous distribution function `P(Z <= t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t == f64::INFINITY {
            return 1.0;
        }
        if t == f64::NEG_INFINITY {
            return 0.0;
        }
        match &self.kind {
            DensityKind::Uniform { half_width, center } => {
                ((t - center + half_width) / (2.0 * half_width)).clamp(0.0, 1.0)
            }
            DensityKind::Gaussian { sigma, center } => {
                0.5 * libm::erfc(-(t - center) / (sigma * std::f64::consts::SQRT_2))
            }
            DensityKind::Delta { center } => {
                if t >= *center {
                    1.0
                } else {
                    0.0
                }
            }
            DensityKind::Table { values } => {
                let h = self.grid.spacing;
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * h * ((t - self.grid.point(k) + 0.5 * h) / h).clamp(0.0, 1.0))
                    .sum()
            }
        }
    }

    /// Density value; the delta profile has none and reports zero.
    pub fn pdf(&self, y: f64) -> f64 {
        match &self.kind {
            DensityKind::Uniform { half_width, center } => {
                if (y - center).abs() <= *half_width {
                    0.5 / half_width
                } else {
                    0.0
                }
            }
            DensityKind::Gaussian { sigma, center } => {
                let u = (y - center) / sigma;
                (-0.5 * u * u).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            DensityKind::Delta { .. } => 0.0,
            DensityKind::Table { values } => {
                let h = self.grid.spacing;
                let k = ((y - self.grid.point(0)) / h + 0.5).floor();
                if k < 0.0 || k as usize >= values.len() {
                    0.0
                } else {
                    values[k as usize]
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.kind {
            DensityKind::Uniform { center, .. }
            | DensityKind::Gaussian { center, .. }
            | DensityKind::Delta { center } => *center,
            DensityKind::Table { values } => {
                let h = self.grid.spacing;
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * h * self.grid.point(k))
                    .sum()
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match &self.kind {
            DensityKind::Uniform { half_width, .. } => half_width * half_width / 3.0,
            DensityKind::Gaussian { sigma, .. } => sigma * sigma,
            DensityKind::Delta { .. } => 0.0,
            DensityKind::Table { values } => {
                let h = self.grid.spacing;
                let mean = self.mean();
                let second: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * h * (self.grid.point(k) - mean).powi(2))
                    .sum();
                // each cell contributes its own uniform spread
                second + h * h / 12.0
            }
        }
    }
}

/// Sharp position measure: `diag(1[x_j in X])`.
pub fn position_spectral(grid: &LineGrid, set: &RealSet) -> DiagonalOperator {
    DiagonalOperator::new(
        grid.points()
            .iter()
            .map(|&x| if set.contains(x) { 1.0 } else { 0.0 })
            .collect(),
    )
}

/// `E^{Q,f}(X)` together with a note on mass outside the grid window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmearedValue {
    pub operator: DiagonalOperator,
    /// Largest probability any grid point assigns to the part of `X` outside
    /// the grid window, when above [`BOUNDARY_WARNING_MASS`].
    pub boundary_warning: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmearedPositionPovm {
    density: DensityProfile,
}

impl SmearedPositionPovm {
    pub fn new(density: DensityProfile) -> Self {
        Self { density }
    }

    pub fn grid(&self) -> LineGrid {
        self.density.grid
    }

    pub fn density(&self) -> &DensityProfile {
        &self.density
    }

    /// `int_X f(q_j - y) dy` at every grid point.
    fn set_probabilities(&self, set: &RealSet) -> Vec<f64> {
        self.grid()
            .points()
            .iter()
            .map(|&q| {
                set.intervals()
                    .iter()
                    .map(|&(a, b)| self.density.cdf(q - a) - self.density.cdf(q - b))
                    .sum::<f64>()
                    .clamp(0.0, 1.0)
            })
            .collect()
    }

    pub fn value(&self, set: &RealSet) -> SmearedValue {
        let (lo, hi) = self.grid().window();
        let inside = RealSet::interval(lo, hi).expect("window is a proper interval");
        let outside = set.intersection(&inside.complement());
        let lost = self
            .set_probabilities(&outside)
            .into_iter()
            .fold(0.0, f64::max);
        SmearedValue {
            operator: DiagonalOperator::new(self.set_probabilities(set)),
            boundary_warning: (lost > BOUNDARY_WARNING_MASS).then_some(lost),
        }
    }

    /// Outcome-cell weights `w_m = P(Z in (m h - h/2, m h + h/2])` for
    /// `m = -(n-1)..=(n-1)`; a point `q_j` lands in cell `k` with weight `w_{j-k}`.
    fn cell_weights(&self) -> Vec<f64> {
        let n = self.grid().n_points as i64;
        let h = self.grid().spacing;
        (-(n - 1)..=(n - 1))
            .map(|m| {
                let c = m as f64 * h;
                self.density.cdf(c + 0.5 * h) - self.density.cdf(c - 0.5 * h)
            })
            .collect()
    }

    /// Mass that stays inside the grid window, per grid point.
    pub fn retained_mass(&self) -> Vec<f64> {
        let n = self.grid().n_points;
        let w = self.cell_weights();
        (0..n)
            .map(|j| (0..n).map(|k| w[j + n - 1 - k]).sum())
            .collect()
    }

    /// Grid points whose outcomes stay inside the window up to [`INTERIOR_MASS_TOL`].
    pub fn interior_points(&self) -> Vec<usize> {
        self.retained_mass()
            .iter()
            .enumerate()
            .filter(|(_, &m)| 1.0 - m <= INTERIOR_MASS_TOL)
            .map(|(j, _)| j)
            .collect()
    }

    /// `sum_k x_k E(cell_k)`, the first moment over outcome cells.
    ///
    /// Equals `Q - mean(f)` wherever no mass leaves the window and the
    /// rounding of `Z` to the lattice is unbiased.
    pub fn first_moment(&self) -> DiagonalOperator {
        let n = self.grid().n_points;
        let w = self.cell_weights();
        let x = self.grid().points();
        DiagonalOperator::new(
            (0..n)
                .map(|j| (0..n).map(|k| x[k] * w[j + n - 1 - k]).sum())
                .collect(),
        )
    }

    /// Outcome-cell distribution `p_k = sum_j |phi_j|^2 w_{j-k}` of a state.
    pub fn outcome_distribution(&self, phi: &StateVector) -> Result<Vec<f64>> {
        let n = self.grid().n_points;
        if phi.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: phi.dim(),
            });
        }
        let w = self.cell_weights();
        let rho = phi.weights();
        Ok((0..n)
            .map(|k| (0..n).map(|j| rho[j] * w[j + n - 1 - k]).sum())
            .collect())
    }
}

pub fn first_moment_line(povm: &SmearedPositionPovm) -> DiagonalOperator {
    povm.first_moment()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceAdditivity {
    pub var_smeared: f64,
    pub var_sharp: f64,
    pub var_f: f64,
    /// `|var_smeared - var_sharp - var_f|`.
    pub residual: f64,
    /// Allowance for binning outcomes into cells, `spacing^2 / 4`.
    pub discretization_bound: f64,
    /// Outcome mass lost past the grid edge.
    pub boundary_mass: f64,
}

impl VarianceAdditivity {
    pub fn tolerance(&self) -> f64 {
        1e-6 + self.discretization_bound
    }

    pub fn holds(&self) -> bool {
        self.residual <= self.tolerance()
    }
}

fn moments_of(weights: &[f64], points: &[f64]) -> (f64, f64) {
    let mean: f64 = weights.iter().zip(points).map(|(w, x)| w * x).sum();
    let var = weights
        .iter()
        .zip(points)
        .map(|(w, x)| w * (x - mean).powi(2))
        .sum();
    (mean, var)
}

/// Checks `Var(E^{Q,f}) = Var(E^Q) + Var(f)` in the state `phi`.
pub fn variance_additivity_check(
    povm: &SmearedPositionPovm,
    phi: &StateVector,
) -> Result<VarianceAdditivity> {
    let probs = povm.outcome_distribution(phi)?;
    let boundary_mass = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    if boundary_mass > BOUNDARY_PRECONDITION_MASS {
        return Err(Error::BoundaryMass {
            mass: boundary_mass,
        });
    }
    let points = povm.grid().points();
    let (_, var_smeared) = moments_of(&probs, &points);
    let (_, var_sharp) = moments_of(&phi.weights(), &points);
    let var_f = povm.density().variance();
    let h = povm.grid().spacing;
    Ok(VarianceAdditivity {
        var_smeared,
        var_sharp,
        var_f,
        residual: (var_smeared - var_sharp - var_f).abs(),
        discretization_bound: 0.25 * h * h,
        boundary_mass,
    })
}

/// Two measures with the same first moment but different values.
#[derive(Debug, Clone, Serialize)]
pub struct NonuniquenessWitness {
    pub f1: DensityProfile,
    pub f2: DensityProfile,
    /// `max |first moment difference|` over points interior for both.
    pub moment_gap: f64,
    /// `max_X ||E^{Q,f1}(X) - E^{Q,f2}(X)||` over [`witness_test_sets`].
    pub measure_gap: f64,
    pub witness_set: RealSet,
}

/// Test sets over which measure gaps are maximized.
pub fn witness_test_sets() -> Vec<RealSet> {
    [
        (0.0, 0.5),
        (-0.5, 0.5),
        (0.0, f64::INFINITY),
        (-1.0, 1.0),
        (1.0, 1.5),
    ]
    .iter()
    .map(|&(a, b)| RealSet::interval(a, b).expect("proper interval"))
    .collect()
}

/// Uniform densities of half widths 1 and 2, both centered.
pub fn nonuniqueness_witness(grid: &LineGrid) -> Result<NonuniquenessWitness> {
    let f1 = DensityProfile::new(
        *grid,
        DensityKind::Uniform {
            half_width: 1.0,
            center: 0.0,
        },
    )?;
    let f2 = DensityProfile::new(
        *grid,
        DensityKind::Uniform {
            half_width: 2.0,
            center: 0.0,
        },
    )?;
    nonuniqueness_witness_for(f1, f2)
}

pub fn nonuniqueness_witness_for(
    f1: DensityProfile,
    f2: DensityProfile,
) -> Result<NonuniquenessWitness> {
    if f1.grid() != f2.grid() {
        return Err(Error::InvalidGrid(
            "witness densities live on different grids".into(),
        ));
    }
    let e1 = SmearedPositionPovm::new(f1.clone());
    let e2 = SmearedPositionPovm::new(f2.clone());
    let interior: Vec<usize> = {
        let other = e2.interior_points();
        e1.interior_points()
            .into_iter()
            .filter(|j| other.contains(j))
            .collect()
    };
    if interior.is_empty() {
        return Err(Error::InvalidGrid(
            "no grid point is interior for both densities".into(),
        ));
    }
    let m1 = e1.first_moment();
    let m2 = e2.first_moment();
    let moment_gap = interior
        .iter()
        .map(|&j| (m1.entries()[j] - m2.entries()[j]).abs())
        .fold(0.0, f64::max);
    let mut measure_gap = 0.0;
    let mut witness_set = RealSet::empty();
    for set in witness_test_sets() {
        let gap = e1.value(&set).operator.distance(&e2.value(&set).operator);
        if gap > measure_gap {
            measure_gap = gap;
            witness_set = set;
        }
    }
    Ok(NonuniquenessWitness {
        f1,
        f2,
        moment_gap,
        measure_gap,
        witness_set,
    })
}
