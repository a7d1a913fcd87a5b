//! Phase-shift covariant POVMs on the circle, built from the Gram matrix of
//! their generating unit vectors.
//!
//! For indices `n, m` of the truncated basis the value on a test set `X` is
//!
//! ```text
//! F(X)_{nm} = G_{nm} * c_X(n - m),   c_X(d) = (1/2pi) int_X e^{idx} dx
//! ```
//!
//! which is a Schur product of the Gram matrix with a Toeplitz matrix of
//! Fourier coefficients. Covariance, positivity, normalization and additivity
//! hold index by index and therefore survive truncation exactly.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_sets::CircleSet;
use crate::linalg::{psd_certify, CMatrix, HermitianOperator};

/// Unit-diagonal tolerance for Gram matrices.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-12;
/// Smallest admissible Gram eigenvalue.
pub const GRAM_PSD_TOL: f64 = 1e-10;

/// Regularization added to `M M*` in the seeded recipe.
const RANDOM_RIDGE: f64 = 1e-6;

/// Index set of the truncated number basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Indexing {
    /// `0..dim`, spectrum of `N`.
    Nat { dim: usize },
    /// `-half_width..=half_width`, spectrum of `Z`.
    Int { half_width: usize },
}

impl Indexing {
    pub fn dim(&self) -> usize {
        match *self {
            Indexing::Nat { dim } => dim,
            Indexing::Int { half_width } => 2 * half_width + 1,
        }
    }

    /// Basis labels in ascending order.
    pub fn indices(&self) -> Vec<i64> {
        match *self {
            Indexing::Nat { dim } => (0..dim as i64).collect(),
            Indexing::Int { half_width } => {
                let l = half_width as i64;
                (-l..=l).collect()
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Indexing::Nat { dim: 0 } => Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `N` or `Z` as a diagonal operator.
    pub fn number_operator(&self) -> HermitianOperator {
        let diag: Vec<f64> = self.indices().iter().map(|&n| n as f64).collect();
        HermitianOperator::from_real_diagonal(&diag)
    }

    /// `diag(e^{i n x})`.
    pub fn phase_unitary(&self, x: f64) -> CMatrix {
        let diag: Vec<Complex64> = self
            .indices()
            .iter()
            .map(|&n| Complex64::from_polar(1.0, n as f64 * x))
            .collect();
        CMatrix::from_diagonal(&diag)
    }
}

/// Inner products `<h_n, h_m>` of the generating unit vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramMatrix {
    indexing: Indexing,
    matrix: HermitianOperator,
}

impl GramMatrix {
    /// Validates unit diagonal, Cauchy-Schwarz and positivity.
    pub fn new(indexing: Indexing, matrix: HermitianOperator) -> Result<Self> {
        indexing.validate()?;
        let dim = indexing.dim();
        if matrix.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.dim(),
            });
        }
        let cert = psd_certify(&matrix, GRAM_PSD_TOL)?;
        let diag_defect = (0..dim)
            .map(|i| (matrix[(i, i)].re - 1.0).abs())
            .fold(0.0, f64::max);
        if diag_defect > UNIT_DIAGONAL_TOL {
            return Err(Error::InvalidGram {
                reason: format!("diagonal deviates from 1 by {diag_defect:e}"),
                min_eig: cert.min_eig,
            });
        }
        let max_modulus = matrix.matrix().max_abs_entry();
        if max_modulus > 1.0 + UNIT_DIAGONAL_TOL {
            return Err(Error::InvalidGram {
                reason: format!("entry of modulus {max_modulus} exceeds 1"),
                min_eig: cert.min_eig,
            });
        }
        if !cert.is_psd {
            return Err(Error::InvalidGram {
                reason: "not positive semidefinite".into(),
                min_eig: cert.min_eig,
            });
        }
        Ok(Self { indexing, matrix })
    }

    pub fn indexing(&self) -> Indexing {
        self.indexing
    }

    pub fn dim(&self) -> usize {
        self.indexing.dim()
    }

    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    /// Largest off-diagonal modulus; zero exactly for pairwise orthogonal generators.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    worst = worst.max(self.matrix[(r, c)].norm());
                }
            }
        }
        worst
    }
}

/// How the generating vectors are specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SpecRepr", into = "SpecRepr")]
pub enum GeneratorSpec {
    /// `h_n = h` for all n: the canonical phase observable.
    Constant,
    /// Pairwise orthogonal generators: the scalar measure.
    Orthogonal,
    Gram {
        matrix: CMatrix,
    },
    Vectors {
        vectors: Vec<Vec<Complex64>>,
    },
    Random {
        seed: u64,
        t: f64,
    },
}

// Unit variants of an internally tagged enum accept stray fields, so the
// wire form uses empty struct variants instead.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum SpecRepr {
    Constant {},
    Orthogonal {},
    Gram {
        matrix: CMatrix,
    },
    Vectors {
        #[serde(with = "complex_vectors")]
        vectors: Vec<Vec<Complex64>>,
    },
    Random {
        seed: u64,
        t: f64,
    },
}

impl From<SpecRepr> for GeneratorSpec {
    fn from(r: SpecRepr) -> Self {
        match r {
            SpecRepr::Constant {} => GeneratorSpec::Constant,
            SpecRepr::Orthogonal {} => GeneratorSpec::Orthogonal,
            SpecRepr::Gram { matrix } => GeneratorSpec::Gram { matrix },
            SpecRepr::Vectors { vectors } => GeneratorSpec::Vectors { vectors },
            SpecRepr::Random { seed, t } => GeneratorSpec::Random { seed, t },
        }
    }
}

impl From<GeneratorSpec> for SpecRepr {
    fn from(g: GeneratorSpec) -> Self {
        match g {
            GeneratorSpec::Constant => SpecRepr::Constant {},
            GeneratorSpec::Orthogonal => SpecRepr::Orthogonal {},
            GeneratorSpec::Gram { matrix } => SpecRepr::Gram { matrix },
            GeneratorSpec::Vectors { vectors } => SpecRepr::Vectors { vectors },
            GeneratorSpec::Random { seed, t } => SpecRepr::Random { seed, t },
        }
    }
}

mod complex_vectors {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|h| h.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|h| {
                h.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect())
    }
}

pub fn build_gram(spec: &GeneratorSpec, indexing: Indexing) -> Result<GramMatrix> {
    indexing.validate()?;
    let dim = indexing.dim();
    let one = Complex64::new(1.0, 0.0);
    let matrix = match spec {
        GeneratorSpec::Constant => HermitianOperator::new(CMatrix::from_fn(dim, |_, _| one))?,
        GeneratorSpec::Orthogonal => HermitianOperator::identity(dim),
        GeneratorSpec::Gram { matrix } => HermitianOperator::new(matrix.clone())?,
        GeneratorSpec::Vectors { vectors } => gram_of_vectors(vectors, dim)?,
        GeneratorSpec::Random { seed, t } => random_gram(*seed, *t, dim)?,
    };
    GramMatrix::new(indexing, matrix)
}

fn gram_of_vectors(vectors: &[Vec<Complex64>], dim: usize) -> Result<HermitianOperator> {
    if vectors.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: vectors.len(),
        });
    }
    let width = vectors.first().map_or(0, Vec::len);
    for (index, h) in vectors.iter().enumerate() {
        if h.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                found: h.len(),
            });
        }
        let norm = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitGenerator { index, norm });
        }
    }
    // conjugate-linear in the first slot
    let g = CMatrix::from_fn(dim, |n, m| {
        vectors[n]
            .iter()
            .zip(&vectors[m])
            .map(|(a, b)| a.conj() * b)
            .sum()
    });
    let mut h = HermitianOperator::new(g)?.into_matrix();
    for i in 0..dim {
        h[(i, i)] = Complex64::new(1.0, 0.0);
    }
    Ok(HermitianOperator::symmetrized(h))
}

/// Seeded PSD unit-diagonal matrix blended toward the identity:
/// `G(t) = (1 - t) I + t * D^{-1/2} (M M* + eps I) D^{-1/2}`.
fn random_gram(seed: u64, t: f64, dim: usize) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "mixing parameter t = {t} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = CMatrix::from_fn(dim, |_, _| {
        Complex64::new(
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        )
    });
    let mut h = m.matmul(&m.adjoint())?;
    for i in 0..dim {
        h[(i, i)] += RANDOM_RIDGE;
    }
    let scale: Vec<f64> = (0..dim).map(|i| 1.0 / h[(i, i)].re.sqrt()).collect();
    let g = CMatrix::from_fn(dim, |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            h[(r, c)] * (scale[r] * scale[c] * t)
        }
    });
    Ok(HermitianOperator::symmetrized(g))
}

/// Kac-Murdock-Szego matrix `G_{nm} = r^{|n-m|}`, positive definite for `|r| < 1`.
pub fn geometric_gram(indexing: Indexing, ratio: f64) -> Result<GramMatrix> {
    let idx = indexing.indices();
    let m = CMatrix::from_fn(indexing.dim(), |r, c| {
        Complex64::new(ratio.powi((idx[r] - idx[c]).unsigned_abs() as i32), 0.0)
    });
    GramMatrix::new(indexing, HermitianOperator::new(m)?)
}

/// The three named presets: constant, orthogonal and geometric (ratio 1/2).
pub fn preset_grams(indexing: Indexing) -> Result<Vec<(&'static str, GramMatrix)>> {
    Ok(vec![
        ("constant", build_gram(&GeneratorSpec::Constant, indexing)?),
        (
            "orthogonal",
            build_gram(&GeneratorSpec::Orthogonal, indexing)?,
        ),
        ("geometric", geometric_gram(indexing, 0.5)?),
    ])
}

/// `count` seeded grams with mixing parameters cycling through 0.1..=1.0.
pub fn seeded_grams(indexing: Indexing, count: usize, base_seed: u64) -> Result<Vec<GramMatrix>> {
    (0..count)
        .map(|i| {
            let t = ((i % 10) + 1) as f64 / 10.0;
            build_gram(
                &GeneratorSpec::Random {
                    seed: base_seed + i as u64,
                    t,
                },
                indexing,
            )
        })
        .collect()
}

/// Covariant semispectral measure on `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePovm {
    gram: GramMatrix,
}

impl PhasePovm {
    pub fn new(gram: GramMatrix) -> Self {
        Self { gram }
    }

    pub fn from_spec(spec: &GeneratorSpec, indexing: Indexing) -> Result<Self> {
        Ok(Self::new(build_gram(spec, indexing)?))
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    pub fn indexing(&self) -> Indexing {
        self.gram.indexing
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    /// Hadamard product of the Gram matrix with the Toeplitz matrix `[t(n - m)]`.
    pub(crate) fn schur_with_toeplitz(&self, t: impl Fn(i64) -> Complex64) -> HermitianOperator {
        let dim = self.dim();
        let max_d = dim as i64 - 1;
        let table: Vec<Complex64> = (-max_d..=max_d).map(&t).collect();
        let idx = self.indexing().indices();
        let g = self.gram.matrix();
        let m = CMatrix::from_fn(dim, |r, c| {
            g[(r, c)] * table[(idx[r] - idx[c] + max_d) as usize]
        });
        HermitianOperator::symmetrized(m)
    }

    /// `F(X)`.
    pub fn value(&self, set: &CircleSet) -> HermitianOperator {
        self.schur_with_toeplitz(|d| set.fourier_coefficient(d))
    }

    /// `|| e^{ixN} F(X) e^{-ixN} - F(X + x) ||`.
    pub fn covariance_defect(&self, set: &CircleSet, x: f64) -> Result<f64> {
        let u = self.indexing().phase_unitary(x);
        let rotated = self.value(set).conjugate_by(&u)?;
        let shifted = self.value(&set.shift(x));
        crate::linalg::operator_norm(&rotated.sub(&shifted)?)
    }

    /// `|| F(X) F(Y) - F(Y) F(X) ||`.
    pub fn commutator_norm(&self, x: &CircleSet, y: &CircleSet) -> Result<f64> {
        let fx = self.value(x);
        let fy = self.value(y);
        fx.matrix().commutator(fy.matrix())?.spectral_norm()
    }

    /// `F[1] Z - Z F[1]` for two-sided indexing.
    ///
    /// For the constant Gram matrix every off-diagonal entry equals `i`.
    pub fn schrodinger_commutator(&self) -> Result<CMatrix> {
        if !matches!(self.indexing(), Indexing::Int { .. }) {
            return Err(Error::UnsupportedIndexing("two-sided (integer) indexing"));
        }
        let f1 = crate::moments::moment_operator(self, 1);
        let z = self.indexing().number_operator();
        f1.matrix().commutator(z.matrix())
    }
}
