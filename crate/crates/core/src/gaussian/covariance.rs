//! Linear-MMSE algebra and mutual information for jointly Gaussian vectors.
//!
//! Variables that are exact linear combinations of earlier ones (such as a
//! layer that duplicates a shared codeword) are dropped by a rank-revealing
//! Cholesky pass instead of being rejected.

use nalgebra::DMatrix;

use crate::error::{domain, Error, Result};

/// Residual variance, relative to the raw variance, below which a variable counts
/// as linearly determined by the ones already kept.
const RANK_TOLERANCE: f64 = 1e-12;

/// Incremental Cholesky factor over a growing list of kept variables.
struct Pivots<'a> {
    cov: &'a DMatrix<f64>,
    kept: Vec<usize>,
    rows: Vec<Vec<f64>>,
    log_det: f64,
}

impl<'a> Pivots<'a> {
    fn new(cov: &'a DMatrix<f64>) -> Self {
        Self {
            cov,
            kept: Vec::new(),
            rows: Vec::new(),
            log_det: 0.0,
        }
    }

    /// `L^{-1} c` where `c` holds the covariances of `j` with the kept variables.
    fn project(&self, j: usize) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.kept.len());
        for (r, &k) in self.kept.iter().enumerate() {
            let row = &self.rows[r];
            let dot: f64 = row[..r].iter().zip(&y).map(|(a, b)| a * b).sum();
            y.push((self.cov[(j, k)] - dot) / row[r]);
        }
        y
    }

    fn residual(&self, j: usize) -> Result<(Vec<f64>, f64)> {
        let y = self.project(j);
        let var = self.cov[(j, j)];
        let res = var - y.iter().map(|v| v * v).sum::<f64>();
        if !res.is_finite() || res < -1e-9 * var.abs().max(1.0) {
            return Err(Error::Numeric(format!("covariance is not positive semidefinite at index {j}")));
        }
        Ok((y, res.max(0.0)))
    }

    fn push(&mut self, j: usize) -> Result<bool> {
        let (mut y, res) = self.residual(j)?;
        let var = self.cov[(j, j)];
        if res <= RANK_TOLERANCE * var.abs() || res == 0.0 {
            return Ok(false);
        }
        y.push(res.sqrt());
        self.rows.push(y);
        self.kept.push(j);
        self.log_det += res.ln();
        Ok(true)
    }
}

fn check_square(cov: &DMatrix<f64>, idx: &[usize]) -> Result<()> {
    if !cov.is_square() {
        return domain("covariance must be square");
    }
    if let Some(&i) = idx.iter().find(|&&i| i >= cov.nrows()) {
        return domain(format!("index {i} outside a {}x{} covariance", cov.nrows(), cov.ncols()));
    }
    let asym = (0..cov.nrows())
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .any(|(i, j)| (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * (1.0 + cov[(i, j)].abs()));
    if asym {
        return Err(Error::Numeric("covariance is not symmetric".into()));
    }
    Ok(())
}

/// `Var(target | observed)`: the MMSE of the best linear estimate.
pub fn conditional_variance(cov: &DMatrix<f64>, target: usize, observed: &[usize]) -> Result<f64> {
    let mut all = observed.to_vec();
    all.push(target);
    check_square(cov, &all)?;
    let mut p = Pivots::new(cov);
    for &o in observed {
        p.push(o)?;
    }
    Ok(p.residual(target)?.1)
}

/// Coefficients `a` of the linear MMSE estimate `a · observed` of `target`.
///
/// Observations that are linear combinations of earlier ones get coefficient zero.
pub fn estimator_coefficients(cov: &DMatrix<f64>, target: usize, observed: &[usize]) -> Result<Vec<f64>> {
    let mut all = observed.to_vec();
    all.push(target);
    check_square(cov, &all)?;
    let mut p = Pivots::new(cov);
    let mut slots = Vec::new();
    for (slot, &o) in observed.iter().enumerate() {
        if p.push(o)? {
            slots.push(slot);
        }
    }
    let mut out = vec![0.0; observed.len()];
    if slots.is_empty() {
        return Ok(out);
    }
    let kept = &p.kept;
    let k = DMatrix::from_fn(kept.len(), kept.len(), |i, j| cov[(kept[i], kept[j])]);
    let c = nalgebra::DVector::from_fn(kept.len(), |i, _| cov[(kept[i], target)]);
    let chol = k
        .cholesky()
        .ok_or_else(|| Error::Numeric("observation covariance is singular".into()))?;
    for (slot, a) in slots.into_iter().zip(chol.solve(&c).iter()) {
        out[slot] = *a;
    }
    Ok(out)
}

/// Rank and natural-log pseudo-determinant of the sub-covariance on `idx`,
/// taken in the given order.
fn reduced_log_det(cov: &DMatrix<f64>, idx: &[usize]) -> Result<(usize, f64)> {
    let mut p = Pivots::new(cov);
    for &i in idx {
        p.push(i)?;
    }
    Ok((p.kept.len(), p.log_det))
}

/// `I(A; B | C)` in bits for jointly Gaussian variables indexed into `cov`.
///
/// The three index sets must be disjoint. Exact linear dependencies are allowed
/// as long as the information stays finite.
pub fn gaussian_mi(cov: &DMatrix<f64>, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    let all: Vec<usize> = c.iter().chain(a).chain(b).copied().collect();
    check_square(cov, &all)?;
    for (i, x) in all.iter().enumerate() {
        if all[..i].contains(x) {
            return domain(format!("index {x} appears twice in I(A;B|C)"));
        }
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let ca: Vec<usize> = c.iter().chain(a).copied().collect();
    let cb: Vec<usize> = c.iter().chain(b).copied().collect();
    let (r_ca, l_ca) = reduced_log_det(cov, &ca)?;
    let (r_cb, l_cb) = reduced_log_det(cov, &cb)?;
    let (r_c, l_c) = reduced_log_det(cov, c)?;
    let (r_all, l_all) = reduced_log_det(cov, &all)?;
    if r_ca + r_cb != r_c + r_all {
        return Err(Error::Numeric("mutual information is infinite (deterministic relation)".into()));
    }
    let nats = 0.5 * (l_ca + l_cb - l_c - l_all);
    Ok((nats / std::f64::consts::LN_2).max(0.0))
}

/// Differential entropy `h(idx)` in bits; requires a nonsingular sub-covariance.
pub fn gaussian_entropy(cov: &DMatrix<f64>, idx: &[usize]) -> Result<f64> {
    check_square(cov, idx)?;
    let (rank, log_det) = reduced_log_det(cov, idx)?;
    if rank != idx.len() {
        return Err(Error::Numeric("differential entropy of a singular covariance is -inf".into()));
    }
    let k = idx.len() as f64;
    let nats = 0.5 * (k * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + log_det);
    Ok(nats / std::f64::consts::LN_2)
}

/// Covariance `A Σ Aᵀ` of linear combinations `A` of a base vector with covariance `Σ`.
pub fn linear_image(loadings: &DMatrix<f64>, base: &DMatrix<f64>) -> DMatrix<f64> {
    let out = loadings * base * loadings.transpose();
    // symmetrize away rounding
    (&out + out.transpose()) * 0.5
}

/// Noise variance `D / (1 - D)` whose unit-variance test channel has MMSE `D`.
pub fn noise_variance(d: f64) -> f64 {
    d / (1.0 - d)
}
