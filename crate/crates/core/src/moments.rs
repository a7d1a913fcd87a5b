//! Moment operators of phase POVMs and reconstruction of a POVM from its
//! first moment.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, FirstMomentCertificate, Result};
use crate::linalg::{psd_certify, CMatrix, HermitianOperator};
use crate::phase_povm::{GramMatrix, Indexing, PhasePovm};

/// Threshold used when deciding whether an operator is a first moment.
pub const RECOVERY_TOL: f64 = 1e-8;

/// `c_k(d) = (1/2pi) int_0^{2pi} x^k e^{idx} dx`.
///
/// `c_k(0) = (2pi)^k / (k + 1)`; for `d != 0` the recursion
/// `c_k(d) = (2pi)^{k-1}/(id) - k/(id) c_{k-1}(d)` starts from `c_0(d) = 0`.
pub fn moment_coefficient(k: u32, d: i64) -> Complex64 {
    if d == 0 {
        return Complex64::new(TAU.powi(k as i32) / (k as f64 + 1.0), 0.0);
    }
    let inv_id = Complex64::new(0.0, -1.0 / d as f64);
    let mut c = Complex64::new(0.0, 0.0);
    for j in 1..=k {
        c = inv_id * (TAU.powi(j as i32 - 1) - j as f64 * c);
    }
    c
}

/// Precomputed `c_k(d)` for `k <= max_k`, `|d| <= max_d`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentCoefficientTable {
    max_k: u32,
    max_d: i64,
    #[serde(skip)]
    values: Vec<Complex64>,
}

impl MomentCoefficientTable {
    pub fn new(max_k: u32, max_d: i64) -> Self {
        let mut values = Vec::with_capacity((max_k as usize + 1) * (2 * max_d as usize + 1));
        for k in 0..=max_k {
            for d in -max_d..=max_d {
                values.push(moment_coefficient(k, d));
            }
        }
        Self {
            max_k,
            max_d,
            values,
        }
    }

    pub fn max_k(&self) -> u32 {
        self.max_k
    }

    pub fn max_d(&self) -> i64 {
        self.max_d
    }

    pub fn get(&self, k: u32, d: i64) -> Option<Complex64> {
        if k > self.max_k || d.abs() > self.max_d {
            return None;
        }
        let width = 2 * self.max_d as usize + 1;
        Some(self.values[k as usize * width + (d + self.max_d) as usize])
    }

    /// Rows `(k, d, re, im)`, for cross-checking against other implementations.
    pub fn rows(&self) -> Vec<(u32, i64, f64, f64)> {
        (0..=self.max_k)
            .flat_map(|k| (-self.max_d..=self.max_d).map(move |d| (k, d)))
            .map(|(k, d)| {
                let c = self.get(k, d).expect("in range");
                (k, d, c.re, c.im)
            })
            .collect()
    }
}

/// `F[k]`, entry `(n, m) = G_{nm} c_k(n - m)`.
pub fn moment_operator(povm: &PhasePovm, k: u32) -> HermitianOperator {
    povm.schur_with_toeplitz(|d| moment_coefficient(k, d))
}

/// `F[2] - F[1]^2`.
pub fn noise_operator(povm: &PhasePovm) -> Result<HermitianOperator> {
    let f1 = moment_operator(povm, 1);
    moment_operator(povm, 2).sub(&f1.square()?)
}

/// Reads the Gram matrix back off a first moment operator:
/// `G_{nm} = F1_{nm} * i(n - m)` off the diagonal, `G_{nn} = 1`.
///
/// Fails with a certificate when `F1` is not the first moment of any
/// covariant POVM on this index set.
pub fn recover_gram(f1: &HermitianOperator, indexing: Indexing) -> Result<GramMatrix> {
    indexing.validate()?;
    let dim = indexing.dim();
    if f1.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: f1.dim(),
        });
    }
    let idx = indexing.indices();
    let g = CMatrix::from_fn(dim, |n, m| {
        if n == m {
            Complex64::new(1.0, 0.0)
        } else {
            f1[(n, m)] * Complex64::new(0.0, (idx[n] - idx[m]) as f64)
        }
    });
    let g = HermitianOperator::symmetrized(g);

    let diagonal_defect = (0..dim)
        .map(|i| (f1[(i, i)].re - PI).abs())
        .fold(0.0, f64::max);
    let max_modulus = g.matrix().max_abs_entry();
    let min_eig = psd_certify(&g, RECOVERY_TOL)?.min_eig;
    let cert = FirstMomentCertificate {
        diagonal_defect,
        max_modulus,
        min_eig,
    };
    if diagonal_defect > RECOVERY_TOL || max_modulus > 1.0 + RECOVERY_TOL || min_eig < -RECOVERY_TOL
    {
        return Err(Error::NotFirstMoment(cert));
    }
    GramMatrix::new(indexing, g).map_err(|_| Error::NotFirstMoment(cert))
}

/// Unit vectors `v_n` with `<v_n, v_m> = G_{nm}`, living in a space of
/// dimension `rank(G)`. Built from `G = U L U*` as the columns of `L^{1/2} U*`.
pub fn extract_generators(gram: &GramMatrix) -> Result<Vec<Vec<Complex64>>> {
    let eig = gram.matrix().eigh()?;
    let top = eig.values.last().copied().unwrap_or(0.0);
    let kept: Vec<usize> = (0..eig.values.len())
        .filter(|&j| eig.values[j] > 1e-12 * top.max(1.0))
        .collect();
    let dim = gram.dim();
    Ok((0..dim)
        .map(|n| {
            kept.iter()
                .map(|&j| eig.vectors[(n, j)].conj() * eig.values[j].sqrt())
                .collect()
        })
        .collect())
}
