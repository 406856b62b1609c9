//! Exact classical reference: dense spectral solves, zeromode extraction,
//! time propagation and comparison metrics.
//!
//! Birth-death generators are diagonally similar to a symmetric tridiagonal
//! matrix whose off-diagonals are `sqrt(kappa_n * mu_{n+1})`, so their full
//! spectrum comes from a symmetric eigensolve; the similarity scaling is
//! applied in log space to survive the enormous dynamic range of stationary
//! distributions at large volume. Matrices without that structure fall back
//! to the general dense eigensolver.

use ndarray::Array2;
use ndarray_linalg::{Eig, Eigh, Inverse, SVD, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitize::{spd_form, HermitianOperator};
use crate::system::GeneratorMatrix;

/// Threshold under which an eigenvalue counts toward the null space.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-8;

/// Full spectral data of a dense matrix.
///
/// Eigenvalues are sorted by magnitude ascending with ties broken by real
/// part; eigenvector columns follow that order. Left vectors satisfy
/// `w^T M = lambda w^T` (transpose, not conjugate, convention). Singular
/// values are sorted ascending.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: Array2<Complex64>,
    pub left_vectors: Array2<Complex64>,
    pub singular_values: Vec<f64>,
}

impl SpectralResult {
    /// Real part of the eigenvalue at sorted index `i`.
    pub fn eigenvalue_re(&self, i: usize) -> f64 {
        self.eigenvalues[i].re
    }

    /// Number of eigenvalues within [`ZERO_EIGENVALUE_TOL`] of zero.
    pub fn null_space_multiplicity(&self) -> usize {
        self.eigenvalues
            .iter()
            .filter(|l| l.norm() <= ZERO_EIGENVALUE_TOL)
            .count()
    }
}

/// Error metrics between a reference and an estimate series.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ComparisonMetrics {
    pub rmsd: f64,
    pub r_squared: f64,
    pub abs_errors: Vec<f64>,
    pub pct_errors: Vec<f64>,
}

/// Root-mean-square deviation and coefficient of determination between a
/// reference series and an estimate, with per-point absolute and percent
/// errors. The reference mean sits in the R^2 denominator.
pub fn compare(reference: &[f64], estimate: &[f64]) -> Result<ComparisonMetrics> {
    if reference.is_empty() || reference.len() != estimate.len() {
        return Err(Error::DimensionMismatch(format!(
            "series lengths {} and {}",
            reference.len(),
            estimate.len()
        )));
    }
    let m = reference.len() as f64;
    let rmsd = (reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum::<f64>()
        / m)
        .sqrt();
    let mean = reference.iter().sum::<f64>() / m;
    let denom: f64 = reference.iter().map(|r| (r - mean) * (r - mean)).sum();
    if denom == 0.0 {
        return Err(Error::InvalidParameter(
            "R^2 undefined: reference series has zero variance".into(),
        ));
    }
    let num: f64 = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e) * (r - e))
        .sum();
    let abs_errors: Vec<f64> = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| (r - e).abs())
        .collect();
    let pct_errors: Vec<f64> = reference
        .iter()
        .zip(estimate)
        .map(|(r, e)| {
            if *r == 0.0 {
                f64::INFINITY
            } else {
                100.0 * (r - e).abs() / r.abs()
            }
        })
        .collect();
    Ok(ComparisonMetrics {
        rmsd,
        r_squared: 1.0 - num / denom,
        abs_errors,
        pct_errors,
    })
}

/// Aggregate relaxation timescale `1 / |lambda1|`.
pub fn transition_timescale(lambda1: f64) -> Result<f64> {
    if lambda1 == 0.0 {
        return Err(Error::OutOfRange(
            "transition timescale undefined for zero eigenvalue".into(),
        ));
    }
    Ok(1.0 / lambda1.abs())
}

/// Full spectrum of a generator matrix, including left eigenvectors and
/// singular values.
pub fn diagonalize(q: &GeneratorMatrix) -> Result<SpectralResult> {
    let singular_values = singular_values(q)?;
    let (eigenvalues, right, left) = match q.birth_death_rates() {
        Some((births, deaths)) => birth_death_eig(q, &births, &deaths)?,
        None => general_eig(q.matrix())?,
    };
    let order = sort_order(&eigenvalues);
    let (eigenvalues, right_vectors, left_vectors) =
        apply_order(&order, eigenvalues, right, left);
    Ok(SpectralResult {
        eigenvalues,
        right_vectors,
        left_vectors,
        singular_values,
    })
}

/// Full spectrum of a Hermitian operator. Eigenvalues are real; left
/// vectors are the conjugated right vectors.
pub fn diagonalize_hermitian(h: &HermitianOperator) -> Result<SpectralResult> {
    let (vals, vecs) = h.matrix().eigh(UPLO::Lower).map_err(Error::solver)?;
    let eigenvalues: Vec<Complex64> = vals.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    let mut right = vecs;
    fix_signs(&mut right);
    let left = right.mapv(|z| z.conj());
    let order = sort_order(&eigenvalues);
    let (eigenvalues, right_vectors, left_vectors) = apply_order(&order, eigenvalues, right, left);
    let mut singular_values: Vec<f64> = eigenvalues.iter().map(|l| l.norm()).collect();
    singular_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(SpectralResult {
        eigenvalues,
        right_vectors,
        left_vectors,
        singular_values,
    })
}

/// Singular values of the generator, ascending.
pub fn singular_values(q: &GeneratorMatrix) -> Result<Vec<f64>> {
    let (_, sv, _) = q.matrix().svd(false, false).map_err(Error::solver)?;
    let mut out = sv.to_vec();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Magnitude of the smallest nonzero eigenvalue of the generator.
pub fn lambda1_magnitude(q: &GeneratorMatrix) -> Result<f64> {
    let spec = diagonalize(q)?;
    if spec.eigenvalues.len() < 2 {
        return Err(Error::DimensionMismatch(
            "need at least two states for lambda1".into(),
        ));
    }
    Ok(spec.eigenvalues[1].norm())
}

/// Hermitian-surrogate counterpart of `lambda1`: the square root of the
/// second-smallest eigenvalue of `Q Q^dag`.
pub fn hermitian_lambda1(q: &GeneratorMatrix) -> Result<f64> {
    let spd = spd_form(q);
    let (vals, _) = spd.matrix().eigh(UPLO::Lower).map_err(Error::solver)?;
    let mut v = vals.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if v.len() < 2 {
        return Err(Error::DimensionMismatch(
            "need at least two states for lambda1".into(),
        ));
    }
    Ok(v[1].max(0.0).sqrt())
}

/// Stationary distribution: the right eigenvector for the zero eigenvalue,
/// sign-fixed to nonnegative entries and normalized to unit sum.
pub fn zeromode(q: &GeneratorMatrix) -> Result<Vec<f64>> {
    let spec = diagonalize(q)?;
    let nulls = spec.null_space_multiplicity();
    if nulls != 1 {
        return Err(Error::DegenerateZeromode(format!(
            "found {nulls} eigenvalues within {ZERO_EIGENVALUE_TOL} of zero"
        )));
    }
    if let Some((births, deaths)) = q.birth_death_rates() {
        // detailed balance: pi_{n+1} / pi_n = kappa_n / mu_{n+1}, in log space
        let d = q.dim();
        let mut logp = Vec::with_capacity(d);
        logp.push(0.0);
        for n in 0..d - 1 {
            let step = (births[n] / deaths[n]).ln();
            logp.push(logp[n] + step);
        }
        let shift = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut p: Vec<f64> = logp.iter().map(|l| (l - shift).exp()).collect();
        let total: f64 = p.iter().sum();
        for x in &mut p {
            *x /= total;
        }
        return Ok(p);
    }
    // generic route: take the eigenvector of the near-zero eigenvalue
    let d = q.dim();
    let mut p: Vec<f64> = (0..d).map(|i| spec.right_vectors[[i, 0]].re).collect();
    let imag_max = (0..d)
        .map(|i| spec.right_vectors[[i, 0]].im.abs())
        .fold(0.0f64, f64::max);
    if imag_max > 1e-9 {
        return Err(Error::Solver(format!(
            "zeromode has imaginary component {imag_max:.3e}"
        )));
    }
    // orient so the largest-magnitude entry is positive
    let (mut max_abs, mut max_val) = (0.0, 0.0);
    for &x in &p {
        if x.abs() > max_abs {
            max_abs = x.abs();
            max_val = x;
        }
    }
    if max_val < 0.0 {
        for x in &mut p {
            *x = -*x;
        }
    }
    for x in &mut p {
        if *x < -1e-9 {
            return Err(Error::Solver(format!(
                "zeromode entry {x} is negative beyond tolerance"
            )));
        }
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    Ok(p)
}

/// Evolve a probability vector by the master equation through the
/// eigen-expansion of the generator; the result is renormalized to unit sum
/// to absorb roundoff.
pub fn propagate(q: &GeneratorMatrix, p0: &[f64], t: f64) -> Result<Vec<f64>> {
    let d = q.dim();
    if p0.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "initial distribution has {} entries, generator has {d} states",
            p0.len()
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time {t} must be >= 0")));
    }
    let total: f64 = p0.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "initial distribution sums to {total}, not 1"
        )));
    }
    let spec = diagonalize(q)?;
    let v = &spec.right_vectors;
    let w = &spec.left_vectors;
    // biorthogonal expansion: c_k = (w_k . p0) / (w_k . v_k); the
    // denominator is the reciprocal eigenvalue condition number, so a
    // vanishing one flags a defective (or hopelessly ill-conditioned) pair
    let p0c: Vec<Complex64> = p0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut coeffs = Vec::with_capacity(d);
    for k in 0..d {
        let mut num = Complex64::ZERO;
        let mut den = Complex64::ZERO;
        for i in 0..d {
            num += w[[i, k]] * p0c[i];
            den += w[[i, k]] * v[[i, k]];
        }
        if den.norm() < 1e-9 {
            return Err(Error::Solver(format!(
                "eigenpair {k} has reciprocal condition {:.3e}; generator is defective within tolerance",
                den.norm()
            )));
        }
        coeffs.push(num / den);
    }
    let mut out = vec![0.0f64; d];
    for (k, lambda) in spec.eigenvalues.iter().enumerate() {
        let decay = (lambda * t).exp() * coeffs[k];
        for i in 0..d {
            out[i] += (decay * v[[i, k]]).re;
        }
    }
    let total: f64 = out.iter().sum();
    if total <= 0.0 {
        return Err(Error::Solver(format!(
            "propagated distribution sums to {total}"
        )));
    }
    for x in &mut out {
        *x /= total;
    }
    Ok(out)
}

fn sort_order(eigenvalues: &[Complex64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[a]
            .norm()
            .partial_cmp(&eigenvalues[b].norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                eigenvalues[a]
                    .re
                    .partial_cmp(&eigenvalues[b].re)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    order
}

fn apply_order(
    order: &[usize],
    eigenvalues: Vec<Complex64>,
    right: Array2<Complex64>,
    left: Array2<Complex64>,
) -> (Vec<Complex64>, Array2<Complex64>, Array2<Complex64>) {
    let d = eigenvalues.len();
    let mut vals = Vec::with_capacity(d);
    let mut r = Array2::<Complex64>::zeros((right.nrows(), d));
    let mut l = Array2::<Complex64>::zeros((left.nrows(), d));
    for (dst, &src) in order.iter().enumerate() {
        vals.push(eigenvalues[src]);
        r.column_mut(dst).assign(&right.column(src));
        l.column_mut(dst).assign(&left.column(src));
    }
    (vals, r, l)
}

/// Rotate each column's phase so its largest-magnitude entry is positive real.
fn fix_signs(vecs: &mut Array2<Complex64>) {
    let (rows, cols) = vecs.dim();
    for k in 0..cols {
        let mut best = Complex64::ZERO;
        for i in 0..rows {
            if vecs[[i, k]].norm() > best.norm() {
                best = vecs[[i, k]];
            }
        }
        if best.norm() > 0.0 {
            let phase = best.conj() / best.norm();
            for i in 0..rows {
                vecs[[i, k]] *= phase;
            }
        }
    }
}

/// Spectrum of a birth-death generator through its symmetric similarity
/// transform. Eigenvalues are exact up to symmetric-solver accuracy; right
/// and left eigenvectors are recovered with per-column log-space scaling.
fn birth_death_eig(
    q: &GeneratorMatrix,
    births: &[f64],
    deaths: &[f64],
) -> Result<(Vec<Complex64>, Array2<Complex64>, Array2<Complex64>)> {
    let d = q.dim();
    let mut s = Array2::<f64>::zeros((d, d));
    for n in 0..d {
        s[[n, n]] = q.entry(n, n);
        if n + 1 < d {
            let off = (births[n] * deaths[n]).sqrt();
            s[[n, n + 1]] = off;
            s[[n + 1, n]] = off;
        }
    }
    let (vals, mut vecs) = s.eigh(UPLO::Lower).map_err(Error::solver)?;
    fix_signs_real(&mut vecs);
    // log of the diagonal similarity: D = diag(exp(logd)), Q = D S D^{-1}
    let mut logd = Vec::with_capacity(d);
    logd.push(0.0);
    for n in 0..d - 1 {
        logd.push(logd[n] + 0.5 * (births[n] / deaths[n]).ln());
    }
    let mut right = Array2::<Complex64>::zeros((d, d));
    let mut left = Array2::<Complex64>::zeros((d, d));
    for k in 0..d {
        scale_column(&vecs, &logd, k, 1.0, &mut right);
        scale_column(&vecs, &logd, k, -1.0, &mut left);
    }
    let eigenvalues = vals.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    Ok((eigenvalues, right, left))
}

/// Fill `out[:, k]` with `sign * exp(orientation * logd) .* vecs[:, k]`,
/// rescaled through log space and L2-normalized.
fn scale_column(
    vecs: &Array2<f64>,
    logd: &[f64],
    k: usize,
    orientation: f64,
    out: &mut Array2<Complex64>,
) {
    let d = logd.len();
    let mut logmag = vec![f64::NEG_INFINITY; d];
    let mut shift = f64::NEG_INFINITY;
    for i in 0..d {
        let v = vecs[[i, k]];
        if v != 0.0 {
            logmag[i] = orientation * logd[i] + v.abs().ln();
            shift = shift.max(logmag[i]);
        }
    }
    let mut col = vec![0.0f64; d];
    let mut norm_sq = 0.0;
    for i in 0..d {
        if logmag[i] > f64::NEG_INFINITY {
            let mag = (logmag[i] - shift).exp();
            col[i] = mag.copysign(vecs[[i, k]]);
            norm_sq += mag * mag;
        }
    }
    let norm = norm_sq.sqrt();
    // orient the largest-magnitude entry positive
    let mut max_val = 0.0f64;
    for &x in &col {
        if x.abs() > max_val.abs() {
            max_val = x;
        }
    }
    let flip = if max_val < 0.0 { -1.0 } else { 1.0 };
    for i in 0..d {
        out[[i, k]] = Complex64::new(flip * col[i] / norm, 0.0);
    }
}

fn fix_signs_real(vecs: &mut Array2<f64>) {
    let (rows, cols) = vecs.dim();
    for k in 0..cols {
        let mut max_val = 0.0f64;
        for i in 0..rows {
            if vecs[[i, k]].abs() > max_val.abs() {
                max_val = vecs[[i, k]];
            }
        }
        if max_val < 0.0 {
            for i in 0..rows {
                vecs[[i, k]] = -vecs[[i, k]];
            }
        }
    }
}

/// General dense eigensolve with left vectors from the inverse of the
/// right-eigenvector matrix.
fn general_eig(
    m: &Array2<f64>,
) -> Result<(Vec<Complex64>, Array2<Complex64>, Array2<Complex64>)> {
    let (vals, mut right) = m.eig().map_err(Error::solver)?;
    fix_signs(&mut right);
    let inv = right.inv().map_err(|_| {
        Error::Solver("eigenvector matrix is singular; matrix may be defective".into())
    })?;
    let d = m.nrows();
    let mut left = Array2::<Complex64>::zeros((d, d));
    for k in 0..d {
        // row k of the inverse is the (unnormalized) left eigenvector
        let norm: f64 = (0..d)
            .map(|j| inv[[k, j]].norm_sqr())
            .sum::<f64>()
            .sqrt();
        for j in 0..d {
            left[[j, k]] = inv[[k, j]] / norm;
        }
    }
    fix_signs(&mut left);
    Ok((vals.to_vec(), right, left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitize::block_embed;
    use crate::system::SchloglSystem;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn two_state() -> GeneratorMatrix {
        SchloglSystem::bistable(1.0, 1).unwrap().generator()
    }

    #[test]
    fn two_state_spectrum_matches_hand_solve() {
        let spec = diagonalize(&two_state()).unwrap();
        assert_relative_eq!(spec.eigenvalue_re(0), 0.0, epsilon = 1e-12);
        assert_relative_eq!(spec.eigenvalue_re(1), -3.2, epsilon = 1e-12);
    }

    #[test]
    fn two_state_zeromode_matches_hand_solve() {
        let p = zeromode(&two_state()).unwrap();
        assert_relative_eq!(p[0], 0.921875, epsilon = 1e-12);
        assert_relative_eq!(p[1], 0.078125, epsilon = 1e-12);
    }

    #[test]
    fn identity_spectrum() {
        let h = HermitianOperator::from_real(Array2::eye(4)).unwrap();
        let spec = diagonalize_hermitian(&h).unwrap();
        for l in &spec.eigenvalues {
            assert_relative_eq!(l.re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spd_smallest_eigenvalue_is_zero() {
        let q = SchloglSystem::bistable(2.3, 7).unwrap().generator();
        let spec = diagonalize_hermitian(&spd_form(&q)).unwrap();
        assert!(spec.eigenvalue_re(0).abs() <= 1e-10);
    }

    #[test]
    fn eigen_residuals_are_small() {
        let q = SchloglSystem::bistable(3.0, 15).unwrap().generator();
        let spec = diagonalize(&q).unwrap();
        let m = q.matrix();
        for k in 0..q.dim() {
            let lambda = spec.eigenvalues[k];
            let mut resid = 0.0f64;
            for i in 0..q.dim() {
                let mut acc = Complex64::ZERO;
                for j in 0..q.dim() {
                    acc += m[[i, j]] * spec.right_vectors[[j, k]];
                }
                resid += (acc - lambda * spec.right_vectors[[i, k]]).norm_sqr();
            }
            assert!(resid.sqrt() <= 1e-9, "residual {} at {k}", resid.sqrt());
            // left vectors: w^T Q = lambda w^T
            let mut lresid = 0.0f64;
            for j in 0..q.dim() {
                let mut acc = Complex64::ZERO;
                for i in 0..q.dim() {
                    acc += spec.left_vectors[[i, k]] * m[[i, j]];
                }
                lresid += (acc - lambda * spec.left_vectors[[j, k]]).norm_sqr();
            }
            assert!(lresid.sqrt() <= 1e-9, "left residual {} at {k}", lresid.sqrt());
        }
    }

    #[test]
    fn block_embedding_eigenvalues_are_singular_values() {
        let q = SchloglSystem::bistable(1.9, 5).unwrap().generator();
        let h = block_embed(&q);
        let spec = diagonalize_hermitian(&h).unwrap();
        let mut nonneg: Vec<f64> = spec
            .eigenvalues
            .iter()
            .map(|l| l.re)
            .filter(|&x| x >= -1e-9)
            .collect();
        nonneg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let sv = singular_values(&q).unwrap();
        // 12-dim embedding padded to 16: the generator null direction shows
        // up twice (null of Q and of Q^T) and padding adds four more zeros,
        // so 6 zeros precede the 5 positive singular values
        assert_eq!(nonneg.len(), sv.len() + 5);
        for &z in &nonneg[..6] {
            assert!(z.abs() <= 1e-9, "expected zero, got {z}");
        }
        for (a, b) in nonneg[6..].iter().zip(&sv[1..]) {
            assert_relative_eq!(a, b, epsilon = 1e-9, max_relative = 1e-9);
        }
    }

    #[test]
    fn zeromode_rejects_degenerate_null_space() {
        let q = SchloglSystem::bistable(1.0, 2).unwrap().generator();
        let padded = q.padded_to(5).unwrap();
        assert!(matches!(
            zeromode(&padded),
            Err(Error::DegenerateZeromode(_))
        ));
    }

    #[test]
    fn propagate_identity_at_time_zero() {
        let q = SchloglSystem::bistable(1.4, 6).unwrap().generator();
        let p0 = {
            let mut p = vec![0.0; 7];
            p[0] = 0.6;
            p[3] = 0.4;
            p
        };
        let p = propagate(&q, &p0, 0.0).unwrap();
        for (a, b) in p.iter().zip(&p0) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn propagate_converges_to_zeromode() {
        let q = SchloglSystem::bistable(1.4, 6).unwrap().generator();
        let mut p0 = vec![0.0; 7];
        p0[0] = 1.0;
        let spec = diagonalize(&q).unwrap();
        let t = 50.0 / spec.eigenvalues[1].norm();
        let p = propagate(&q, &p0, t).unwrap();
        let stationary = zeromode(&q).unwrap();
        let tv: f64 = p
            .iter()
            .zip(&stationary)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 1e-6, "total variation {tv}");
    }

    #[test]
    fn propagate_conserves_probability() {
        // raw expansion (before renormalization) should conserve the sum;
        // renormalized output trivially sums to one
        let q = SchloglSystem::monostable(2.0, 9).unwrap().generator();
        let p0 = vec![0.1; 10];
        let p = propagate(&q, &p0, 0.37).unwrap();
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn propagate_rejects_defective_generator() {
        // upper-triangular block with a repeated eigenvalue and a Jordan chain
        let m = array![[0.0, 1.0, 0.0], [0.0, -1.0, 1.0], [0.0, 0.0, -1.0]];
        let q = GeneratorMatrix::from_entries(m).unwrap();
        let p0 = vec![1.0, 0.0, 0.0];
        assert!(matches!(propagate(&q, &p0, 1.0), Err(Error::Solver(_))));
    }

    #[test]
    fn compare_on_identical_series() {
        let x = vec![1.0, 2.0, 3.0];
        let m = compare(&x, &x).unwrap();
        assert_eq!(m.rmsd, 0.0);
        assert_eq!(m.r_squared, 1.0);
    }

    #[test]
    fn compare_hand_arithmetic() {
        let m = compare(&[1.0, 2.0], &[1.0, 4.0]).unwrap();
        assert_relative_eq!(m.rmsd, std::f64::consts::SQRT_2, epsilon = 1e-15);
        assert_eq!(m.abs_errors, vec![0.0, 2.0]);
    }

    #[test]
    fn compare_rejects_zero_variance() {
        assert!(compare(&[2.0, 2.0], &[1.0, 3.0]).is_err());
    }

    #[test]
    fn timescale_values() {
        assert_relative_eq!(transition_timescale(-3.2).unwrap(), 0.3125);
        assert_relative_eq!(
            transition_timescale(-1.5).unwrap(),
            0.6666666666666666,
            epsilon = 1e-12
        );
        assert!(transition_timescale(0.0).is_err());
        // monotone: larger magnitude, smaller timescale
        assert!(
            transition_timescale(-4.0).unwrap() < transition_timescale(-2.0).unwrap()
        );
    }

    #[test]
    fn lambda1_decreases_with_volume() {
        let mut last = f64::INFINITY;
        for i in 0..7 {
            let v = 1.0 + 4.5 * i as f64; // 1..28
            let q = SchloglSystem::bistable(v, 127).unwrap().generator();
            let l1 = lambda1_magnitude(&q).unwrap();
            assert!(l1 < last, "lambda1 {l1} did not decrease at V={v}");
            last = l1;
        }
    }

    #[test]
    fn lambda1_anchor_at_unit_volume() {
        let q = SchloglSystem::bistable(1.0, 127).unwrap().generator();
        let l1 = lambda1_magnitude(&q).unwrap();
        assert!((l1 - 1.5).abs() / 1.5 <= 0.10, "lambda1 = {l1}");
    }

    #[test]
    fn hermitian_lambda1_matches_singular_value() {
        let q = SchloglSystem::bistable(4.2, 31).unwrap().generator();
        let h = hermitian_lambda1(&q).unwrap();
        let sv = singular_values(&q).unwrap();
        assert_relative_eq!(h, sv[1], epsilon = 1e-8, max_relative = 1e-8);
    }
}
