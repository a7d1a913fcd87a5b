//! Dense complex matrices, Hermitian operators and a deterministic cyclic
//! Jacobi eigensolver.
//!
//! Everything here is sized for the truncated operators of the toolkit
//! (dimensions up to a few hundred). Matrices are stored row-major.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hermiticity tolerance applied at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from nested rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                let orow = &mut out.data[r * n..(r + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Entrywise (Schur) product.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.zip_with(other, |a, b| a * b))
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermiticity, `max |A_nm - conj(A_mn)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Operator (spectral) norm, via the largest eigenvalue of `A* A`.
    pub fn spectral_norm(&self) -> Result<f64> {
        let gram = HermitianOperator::new(self.adjoint().matmul(self)?)?;
        let top = gram.eigh()?.values.last().copied().unwrap_or(0.0);
        Ok(top.max(0.0).sqrt())
    }

    /// Square block with rows and columns `start..start + len`.
    pub fn sub_block(&self, start: usize, len: usize) -> Self {
        Self::from_fn(len, |r, c| self[(start + r, start + c)])
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Formats a real with 17 significant digits, the exact round-trip width for f64.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw_real(x: f64) -> Box<serde_json::value::RawValue> {
    // format_real always yields a valid JSON number for finite input.
    let text = if x.is_finite() {
        format_real(x)
    } else {
        "null".to_string()
    };
    serde_json::value::RawValue::from_string(text).expect("formatted real is valid JSON")
}

/// Row-major nested arrays of `[re, im]` pairs.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[Box<serde_json::value::RawValue>; 2]>> = (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|z| [raw_real(z.re), raw_real(z.im)])
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let rows = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|[re, im]| Complex64::new(re, im))
                    .collect()
            })
            .collect();
        CMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl CMatrix {
    /// CSV rendering: one line per matrix row, `re,im` pairs side by side.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            let line: Vec<String> = self
                .row(r)
                .iter()
                .flat_map(|z| [format_real(z.re), format_real(z.im)])
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Dense Hermitian operator on a truncated Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HermitianOperator(CMatrix);

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = CMatrix::deserialize(deserializer)?;
        HermitianOperator::new(m).map_err(serde::de::Error::custom)
    }
}

impl HermitianOperator {
    /// Checks Hermiticity to [`HERMITIAN_TOL`], then symmetrizes exactly.
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL || !defect.is_finite() {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self::symmetrized(m))
    }

    /// Wraps a matrix that is Hermitian by construction, forcing exact symmetry.
    pub(crate) fn symmetrized(mut m: CMatrix) -> Self {
        let n = m.dim();
        for r in 0..n {
            m[(r, r)] = Complex64::new(m[(r, r)].re, 0.0);
            for c in (r + 1)..n {
                let avg = (m[(r, c)] + m[(c, r)].conj()) * 0.5;
                m[(r, c)] = avg;
                m[(c, r)] = avg.conj();
            }
        }
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self(CMatrix::from_diagonal(
            &diag
                .iter()
                .map(|&d| Complex64::new(d, 0.0))
                .collect::<Vec<_>>(),
        ))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrized(self.0.add(&other.0)?))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::symmetrized(self.0.sub(&other.0)?))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(Complex64::new(s, 0.0)))
    }

    /// `A^2`, Hermitian.
    pub fn square(&self) -> Result<Self> {
        Ok(Self::symmetrized(self.0.matmul(&self.0)?))
    }

    /// Unitary conjugation `U A U*`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        Ok(Self::symmetrized(u.matmul(&self.0)?.matmul(&u.adjoint())?))
    }

    pub fn sub_block(&self, start: usize, len: usize) -> Self {
        Self(self.0.sub_block(start, len))
    }

    /// `<phi|A|phi>`, real for Hermitian A.
    pub fn expectation(&self, phi: &StateVector) -> Result<f64> {
        if phi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: phi.dim(),
            });
        }
        let a_phi = self.0.apply(phi.amplitudes());
        Ok(phi
            .amplitudes()
            .iter()
            .zip(&a_phi)
            .map(|(p, q)| (p.conj() * q).re)
            .sum())
    }

    /// Eigenvalues (ascending) and eigenvectors (columns) by cyclic Jacobi.
    pub fn eigh(&self) -> Result<Eigh> {
        jacobi_eigh(&self.0)
    }
}

impl Index<(usize, usize)> for HermitianOperator {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

/// Raw eigen-decomposition `A = V diag(values) V*`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        let n = self.vectors.dim();
        (0..n).map(|r| self.vectors[(r, j)]).collect()
    }
}

/// Cyclic complex Jacobi with a fixed row-by-row pivot order.
///
/// Each pivot `a_pq = r e^{i phi}` is reduced to the real symmetric case by
/// the phase `diag(e^{i phi}, 1)` and annihilated by a plane rotation.
fn jacobi_eigh(input: &CMatrix) -> Result<Eigh> {
    let n = input.dim();
    let mut a = input.clone();
    let mut v = CMatrix::identity(n);
    let frob = a.frobenius_norm();

    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                s += a[(p, q)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let target = f64::EPSILON * frob;
    let mut converged = n <= 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        let off = off_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // Negligible against both diagonal entries: drop it.
                if sweeps > 4
                    && app.abs() + 100.0 * r == app.abs()
                    && aqq.abs() + 100.0 * r == aqq.abs()
                {
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = if theta.is_infinite() {
                    0.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // W = diag(phase, 1) * [[c, s], [-s, c]] on the (p, q) plane.
                let w00 = phase * c;
                let w01 = phase * s;
                let w10 = Complex64::new(-s, 0.0);
                let w11 = Complex64::new(c, 0.0);

                // A <- A W (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * w00 + akq * w10;
                    a[(k, q)] = akp * w01 + akq * w11;
                }
                // A <- W* A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = w00.conj() * apk + w10.conj() * aqk;
                    a[(q, k)] = w01.conj() * apk + w11.conj() * aqk;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * w00 + vkq * w10;
                    v[(k, q)] = vkp * w01 + vkq * w11;
                }
            }
        }
    }
    if !converged {
        let residual = off_norm(&a);
        if residual > 1e-12 * frob.max(f64::MIN_POSITIVE) {
            return Err(Error::NoConvergence { sweeps, residual });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(Eigh { values, vectors })
}

/// Eigenvalues after clustering, with one orthogonal projection per cluster.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending cluster eigenvalues (mean of each cluster).
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<HermitianOperator>,
    pub multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.projections.first().map_or(0, |p| p.dim())
    }

    /// `sum_j f(lambda_j) P_j`.
    pub fn functional_calculus(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.dim();
        let mut acc = CMatrix::zeros(n);
        for (&lambda, p) in self.eigenvalues.iter().zip(&self.projections) {
            let w = Complex64::new(f(lambda), 0.0);
            for (o, x) in acc.data.iter_mut().zip(p.matrix().as_slice()) {
                *o += w * x;
            }
        }
        HermitianOperator::symmetrized(acc)
    }

    /// `sum_j lambda_j P_j`.
    pub fn reassemble(&self) -> HermitianOperator {
        self.functional_calculus(|x| x)
    }
}

/// Spectral decomposition with eigenvalues closer than `cluster_tol` merged.
pub fn eigendecompose(a: &HermitianOperator, cluster_tol: f64) -> Result<SpectralDecomposition> {
    let eig = a.eigh()?;
    let n = a.dim();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (j, &lambda) in eig.values.iter().enumerate() {
        match clusters.last_mut() {
            Some(last) if lambda - eig.values[*last.last().unwrap()] <= cluster_tol => last.push(j),
            _ => clusters.push(vec![j]),
        }
    }
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    let mut projections = Vec::with_capacity(clusters.len());
    let mut multiplicities = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let mean = cluster.iter().map(|&j| eig.values[j]).sum::<f64>() / cluster.len() as f64;
        let proj = CMatrix::from_fn(n, |r, c| {
            cluster
                .iter()
                .map(|&j| eig.vectors[(r, j)] * eig.vectors[(c, j)].conj())
                .sum()
        });
        eigenvalues.push(mean);
        projections.push(HermitianOperator::symmetrized(proj));
        multiplicities.push(cluster.len());
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        projections,
        multiplicities,
    })
}

/// Default clustering tolerance, `1e-8 * ||A||`.
pub fn default_cluster_tol(a: &HermitianOperator) -> Result<f64> {
    Ok(1e-8 * operator_norm(a)?)
}

/// Entrywise product of two Hermitian operators.
pub fn hadamard(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrized(a.0.hadamard(&b.0)?))
}

/// Largest `|lambda|`.
pub fn operator_norm(a: &HermitianOperator) -> Result<f64> {
    let eig = a.eigh()?;
    Ok(eig.values.iter().fold(0.0_f64, |m, x| m.max(x.abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsdCertificate {
    pub is_psd: bool,
    pub min_eig: f64,
}

pub fn psd_certify(a: &HermitianOperator, tol: f64) -> Result<PsdCertificate> {
    let eig = a.eigh()?;
    let min_eig = eig.values.first().copied().unwrap_or(0.0);
    Ok(PsdCertificate {
        is_psd: min_eig >= -tol,
        min_eig,
    })
}

/// Unit vector in a truncated Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Accepts amplitudes already normalized to 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitState { norm });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonUnitState { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Haar-like random state from complex Gaussian amplitudes.
    pub fn random(dim: usize, rng: &mut impl rand::Rng) -> Result<Self> {
        use rand_distr::{Distribution, StandardNormal};
        let amplitudes = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Probability weights `|phi_j|^2`.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|z| z.norm_sqr()).collect()
    }
}

/// Serialized as a list of `[re, im]` amplitude pairs.
impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.amplitudes.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(serializer)
    }
}

/// Real diagonal operator, the natural form of multiplication operators on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DiagonalOperator(Vec<f64>);

impl DiagonalOperator {
    pub fn new(entries: Vec<f64>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn to_hermitian(&self) -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&self.0)
    }

    /// `max_j |a_j - b_j|`, the operator norm of the difference.
    pub fn distance(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn product(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}

fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> HermitianOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(n, |_, _| {
            c(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        });
        HermitianOperator::symmetrized(m.add(&m.adjoint()).unwrap().scale(c(0.5, 0.0)))
    }

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        a.sub(b).unwrap().max_abs_entry()
    }

    #[test]
    fn hadamard_identities() {
        let a = random_hermitian(5, 1);
        let ones = HermitianOperator::symmetrized(CMatrix::from_fn(5, |_, _| c(1.0, 0.0)));
        assert_eq!(hadamard(&a, &ones).unwrap(), a);
        let d = hadamard(&HermitianOperator::identity(5), &a).unwrap();
        for r in 0..5 {
            for col in 0..5 {
                let expect = if r == col { a[(r, r)] } else { c(0.0, 0.0) };
                assert_eq!(d[(r, col)], expect);
            }
        }
        let err = hadamard(&a, &HermitianOperator::identity(4)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn diagonal_matrix_decomposes_into_basis_projectors() {
        let a = HermitianOperator::from_real_diagonal(&[1.0, 2.0, 3.0]);
        let dec = eigendecompose(&a, 1e-8).unwrap();
        assert_eq!(dec.eigenvalues, vec![1.0, 2.0, 3.0]);
        for (j, p) in dec.projections.iter().enumerate() {
            let expect = HermitianOperator::from_real_diagonal(
                &(0..3)
                    .map(|i| if i == j { 1.0 } else { 0.0 })
                    .collect::<Vec<_>>(),
            );
            assert!(max_diff(p.matrix(), expect.matrix()) < 1e-15);
        }
    }

    #[test]
    fn identity_clusters_into_one_projection() {
        let dec = eigendecompose(&HermitianOperator::identity(4), 1e-8).unwrap();
        assert_eq!(dec.eigenvalues, vec![1.0]);
        assert_eq!(dec.multiplicities, vec![4]);
        assert!(max_diff(dec.projections[0].matrix(), &CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn two_by_two_half_plane_operator() {
        // [[1/2, i/pi], [-i/pi, 1/2]]: characteristic polynomial (1/2 - l)^2 = 1/pi^2.
        let pi = std::f64::consts::PI;
        let m = CMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.0, 1.0 / pi)],
            vec![c(0.0, -1.0 / pi), c(0.5, 0.0)],
        ])
        .unwrap();
        let a = HermitianOperator::new(m).unwrap();
        let dec = eigendecompose(&a, 1e-8).unwrap();
        assert!((dec.eigenvalues[0] - (0.5 - 1.0 / pi)).abs() < 1e-15);
        assert!((dec.eigenvalues[1] - (0.5 + 1.0 / pi)).abs() < 1e-15);
    }

    #[test]
    fn psd_and_norm_examples() {
        let id = HermitianOperator::identity(3);
        let cert = psd_certify(&id, 1e-12).unwrap();
        assert!(cert.is_psd);
        assert_eq!(cert.min_eig, 1.0);
        let cert =
            psd_certify(&HermitianOperator::from_real_diagonal(&[1.0, -1.0]), 1e-12).unwrap();
        assert!(!cert.is_psd);
        assert_eq!(cert.min_eig, -1.0);

        assert_eq!(operator_norm(&id).unwrap(), 1.0);
        assert_eq!(operator_norm(&HermitianOperator::zeros(3)).unwrap(), 0.0);
        assert_eq!(
            operator_norm(&HermitianOperator::from_real_diagonal(&[3.0, -5.0])).unwrap(),
            5.0
        );
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let m = CMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let ragged = CMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]);
        assert!(matches!(ragged, Err(Error::NotSquare { .. })));
    }

    #[test]
    fn round_trip_at_dimension_128() {
        let a = random_hermitian(128, 7);
        let dec = eigendecompose(&a, 1e-8 * operator_norm(&a).unwrap()).unwrap();
        assert!(max_diff(dec.reassemble().matrix(), a.matrix()) <= 1e-10 * 128.0);
        let sum = dec
            .projections
            .iter()
            .fold(CMatrix::zeros(128), |acc, p| acc.add(p.matrix()).unwrap());
        assert!(max_diff(&sum, &CMatrix::identity(128)) < 1e-10);
    }

    #[test]
    fn eigensolver_is_deterministic() {
        let a = random_hermitian(20, 3);
        let e1 = a.eigh().unwrap();
        let e2 = a.eigh().unwrap();
        assert_eq!(e1.values, e2.values);
        assert_eq!(e1.vectors, e2.vectors);
    }

    #[test]
    fn spectral_norm_of_anti_hermitian_commutator() {
        let a = HermitianOperator::from_real_diagonal(&[1.0, -1.0]);
        let x = HermitianOperator::new(
            CMatrix::from_rows(vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        // [Z, X] = 2iY, norm 2.
        let comm = a.matrix().commutator(x.matrix()).unwrap();
        assert!((comm.spectral_norm().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn matrix_json_uses_seventeen_digits() {
        let m = CMatrix::from_rows(vec![vec![c(0.1, -1.0 / 3.0)]]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[[[1.0000000000000001e-1,-3.3333333333333331e-1]]]");
        let back: CMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn reassembly_reproduces_input(n in 1usize..24, seed in any::<u64>()) {
                let a = random_hermitian(n, seed);
                let dec = eigendecompose(&a, 1e-8 * operator_norm(&a).unwrap()).unwrap();
                prop_assert!(max_diff(dec.reassemble().matrix(), a.matrix()) <= 1e-10 * n as f64);
                for (j, pj) in dec.projections.iter().enumerate() {
                    for (k, pk) in dec.projections.iter().enumerate() {
                        let prod = pj.matrix().matmul(pk.matrix()).unwrap();
                        let expect = if j == k { pj.matrix().clone() } else { CMatrix::zeros(n) };
                        prop_assert!(max_diff(&prod, &expect) <= 1e-10);
                    }
                }
            }

            #[test]
            fn shift_moves_every_eigenvalue(n in 1usize..16, seed in any::<u64>(), shift in -10.0f64..10.0) {
                let a = random_hermitian(n, seed);
                let shifted = a.add(&HermitianOperator::identity(n).scale(shift)).unwrap();
                let e1 = a.eigh().unwrap().values;
                let e2 = shifted.eigh().unwrap().values;
                for (x, y) in e1.iter().zip(&e2) {
                    prop_assert!((x + shift - y).abs() <= 1e-10);
                }
            }

            #[test]
            fn psd_verdict_is_unitarily_invariant(n in 1usize..12, seed in any::<u64>(), offset in -3.0f64..3.0) {
                let a = random_hermitian(n, seed)
                    .add(&HermitianOperator::identity(n).scale(offset))
                    .unwrap();
                let u = random_hermitian(n, seed ^ 0x5555).eigh().unwrap().vectors;
                let b = a.conjugate_by(&u).unwrap();
                let ca = psd_certify(&a, 1e-9).unwrap();
                let cb = psd_certify(&b, 1e-9).unwrap();
                prop_assert!((ca.min_eig - cb.min_eig).abs() < 1e-9);
                if (ca.min_eig + 1e-9).abs() > 1e-8 {
                    prop_assert_eq!(ca.is_psd, cb.is_psd);
                }
            }

            #[test]
            fn schur_product_of_psd_is_psd(n in 1usize..10, s1 in any::<u64>(), s2 in any::<u64>()) {
                let a = random_hermitian(n, s1);
                let b = random_hermitian(n, s2);
                let pa = a.square().unwrap();
                let pb = b.square().unwrap();
                let h = hadamard(&pa, &pb).unwrap();
                let scale = operator_norm(&pa).unwrap() * operator_norm(&pb).unwrap();
                prop_assert!(psd_certify(&h, 1e-12 * scale.max(1.0)).unwrap().is_psd);
            }
        }
    }
}
