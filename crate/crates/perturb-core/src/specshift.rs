//! Second-order and first-order (Koplienko-type) spectral shift densities
//! for finite Hermitian pairs, the trace formula they represent, and the
//! circle analog through Fourier coefficients.
//!
//! For matrices everything is a finite sum of ramps: with `X₊` the positive
//! part,
//!
//! ```text
//! ς(t) = tr (A+K−t)₊ − 2 tr (A−t)₊ + tr (A−K−t)₊
//! η(t) = tr (A+K−t)₊ − tr (A−t)₊ − tr P_{(t,∞)}(A) K
//! ```
//!
//! `ς` is piecewise linear, nonnegative, compactly supported, with kinks
//! exactly at eigenvalues of `A±K` and `A`; the quadrature for
//! `∫ f''(t) ς(t) dt` therefore splits the support at those kinks and runs
//! composite Simpson on each smooth piece, keeping the nominal `O(h⁴)` rate
//! that a kink-straddling uniform rule would lose.

use num_complex::Complex64;

use crate::eigen::{eig_hermitian, eig_unitary, expi};
use crate::error::{Error, Result};
use crate::funcalc::{apply_fn, SmoothFn};
use crate::matrix::{HermitianMatrix, UnitaryMatrix};

/// Grid points closer than this to an eigenvalue get jittered.
pub const EIGEN_AVOID_TOL: f64 = 1e-9;

/// Jitter step, as a fraction of the hull width.
pub const JITTER_SCALE: f64 = 1e-7;

/// Default number of sample points for [`default_grid`].
pub const DEFAULT_GRID_POINTS: usize = 2048;

/// A sampled shift density.
#[derive(Debug, Clone)]
pub struct ShiftSample {
    /// Abscissae actually used (after any jitter).
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Indices of grid points that were jittered off an eigenvalue.
    pub jittered: Vec<usize>,
    /// Human-readable description of the operator pair.
    pub label: String,
}

fn ramp_sum(eigs: &[f64], t: f64) -> f64 {
    eigs.iter().map(|&l| (l - t).max(0.0)).sum()
}

fn spectrum(h: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(h)?.values)
}

fn shifted(a: &HermitianMatrix, k: &HermitianMatrix, sign: f64) -> HermitianMatrix {
    HermitianMatrix::symmetrize(&a.matrix().add(&k.matrix().scale_re(sign)))
}

/// Largest magnitude eigenvalue of a Hermitian matrix.
pub fn hermitian_op_norm(h: &HermitianMatrix) -> Result<f64> {
    Ok(spectrum(h)?
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

fn jitter_grid(grid: &[f64], avoid: &[f64], width: f64) -> (Vec<f64>, Vec<usize>) {
    let step = JITTER_SCALE * width.max(1e-12);
    let mut out = Vec::with_capacity(grid.len());
    let mut moved = Vec::new();
    for (i, &t) in grid.iter().enumerate() {
        let mut tt = t;
        let mut tries = 0;
        while avoid.iter().any(|&l| (tt - l).abs() < EIGEN_AVOID_TOL) && tries < 64 {
            tt += step;
            tries += 1;
        }
        if tt != t {
            moved.push(i);
        }
        out.push(tt);
    }
    (out, moved)
}

fn pair_label(a: &HermitianMatrix, k: &HermitianMatrix) -> String {
    format!(
        "dim {}, |A|_F = {:.6e}, |K|_F = {:.6e}",
        a.dim(),
        a.matrix().frobenius_norm(),
        k.matrix().frobenius_norm()
    )
}

/// Uniform grid over the spectral hull of `A` padded by the operator norm of
/// `K` (plus a whisker), which contains the support of both densities.
pub fn default_grid(
    a: &HermitianMatrix,
    k: &HermitianMatrix,
    points: usize,
) -> Result<Vec<f64>> {
    let sa = spectrum(a)?;
    let kn = hermitian_op_norm(k)?;
    let lo = sa.iter().cloned().fold(f64::INFINITY, f64::min) - kn;
    let hi = sa.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + kn;
    let pad = 1e-3 * (hi - lo).max(1e-9);
    let (lo, hi) = (lo - pad, hi + pad);
    let n = points.max(2);
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

/// Samples the second-order shift density
/// `ς(t) = tr (A+K−t)₊ − 2 tr (A−t)₊ + tr (A−K−t)₊`.
pub fn ssf2_sample(
    a: &HermitianMatrix,
    k: &HermitianMatrix,
    grid: &[f64],
) -> Result<ShiftSample> {
    if k.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: k.dim(),
        });
    }
    let plus = spectrum(&shifted(a, k, 1.0))?;
    let zero = spectrum(a)?;
    let minus = spectrum(&shifted(a, k, -1.0))?;
    let mut avoid = Vec::with_capacity(3 * a.dim());
    avoid.extend_from_slice(&plus);
    avoid.extend_from_slice(&zero);
    avoid.extend_from_slice(&minus);
    let width = avoid.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - avoid.iter().cloned().fold(f64::INFINITY, f64::min);
    let (grid, jittered) = jitter_grid(grid, &avoid, width);
    let values = grid
        .iter()
        .map(|&t| ramp_sum(&plus, t) - 2.0 * ramp_sum(&zero, t) + ramp_sum(&minus, t))
        .collect();
    Ok(ShiftSample {
        grid,
        values,
        jittered,
        label: pair_label(a, k),
    })
}

/// Samples the first-order remainder density
/// `η(t) = tr (A+K−t)₊ − tr (A−t)₊ − Σ_{λ_i(A) > t} (V*KV)_{ii}`.
pub fn koplienko_eta_sample(
    a: &HermitianMatrix,
    k: &HermitianMatrix,
    grid: &[f64],
) -> Result<ShiftSample> {
    if k.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: k.dim(),
        });
    }
    let plus = spectrum(&shifted(a, k, 1.0))?;
    let ea = eig_hermitian(a)?;
    let zero = ea.values.clone();
    // Diagonal of K in the eigenbasis of A: weights of the projection term.
    let v = ea.vectors.matrix();
    let kv = v.adjoint().matmul(k.matrix()).matmul(v);
    let weights: Vec<f64> = (0..a.dim()).map(|i| kv.get(i, i).re).collect();

    let mut avoid = Vec::with_capacity(2 * a.dim());
    avoid.extend_from_slice(&plus);
    avoid.extend_from_slice(&zero);
    let width = avoid.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - avoid.iter().cloned().fold(f64::INFINITY, f64::min);
    let (grid, jittered) = jitter_grid(grid, &avoid, width);
    let values = grid
        .iter()
        .map(|&t| {
            let proj: f64 = zero
                .iter()
                .zip(weights.iter())
                .filter(|(&l, _)| l > t)
                .map(|(_, &w)| w)
                .sum();
            ramp_sum(&plus, t) - ramp_sum(&zero, t) - proj
        })
        .collect();
    Ok(ShiftSample {
        grid,
        values,
        jittered,
        label: pair_label(a, k),
    })
}

// ---------------------------------------------------------------------------
// Trace formula
// ---------------------------------------------------------------------------

/// Outcome of one trace-formula verification.
#[derive(Debug, Clone)]
pub struct TraceFormulaReport {
    /// `tr(f(A+K) − 2 f(A) + f(A−K))`, by direct functional calculus.
    pub lhs: f64,
    /// `∫ f''(t) ς(t) dt` by kink-aligned composite Simpson.
    pub rhs: f64,
    pub residual: f64,
    /// Residual relative to `max(|lhs|, |rhs|, 1e−300)`.
    pub relative: f64,
    /// Panel budget that was requested.
    pub panels: usize,
}

/// Composite Simpson over `[kinks[0], kinks[last]]`, with panels distributed
/// over the smooth pieces between consecutive kinks proportionally to piece
/// length (at least two, rounded up to even, per piece).
fn kink_aligned_simpson(
    kinks: &[f64],
    panels: usize,
    integrand: impl Fn(f64) -> f64,
) -> f64 {
    let total: f64 = kinks.last().unwrap() - kinks[0];
    if total <= 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for w in kinks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        if len <= 0.0 {
            continue;
        }
        let mut n = ((panels as f64) * len / total).ceil() as usize;
        if n < 2 {
            n = 2;
        }
        if n % 2 == 1 {
            n += 1;
        }
        let h = len / n as f64;
        let mut piece = integrand(lo) + integrand(hi);
        for i in 1..n {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            piece += weight * integrand(lo + h * i as f64);
        }
        acc += piece * h / 3.0;
    }
    acc
}

/// Verifies `tr(f(A+K) − 2f(A) + f(A−K)) = ∫ f'' ς dm` for a line symbol
/// with an available second derivative.
pub fn verify_trace_formula_sa(
    a: &HermitianMatrix,
    k: &HermitianMatrix,
    f: &SmoothFn,
    panels: usize,
) -> Result<TraceFormulaReport> {
    if k.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: k.dim(),
        });
    }
    let apk = shifted(a, k, 1.0);
    let amk = shifted(a, k, -1.0);
    let e_plus = eig_hermitian(&apk)?;
    let e_zero = eig_hermitian(a)?;
    let e_minus = eig_hermitian(&amk)?;

    // Fail early (with the derivative-order error) if f'' is unavailable.
    f.deriv(Complex64::new(0.0, 0.0), 2)?;

    let lhs = apply_fn(&e_plus, f)?
        .sub(&apply_fn(&e_zero, f)?.scale_re(2.0))
        .add(&apply_fn(&e_minus, f)?)
        .trace()
        .re;

    // Kinks of ς: all eigenvalues of the three operators.
    let mut kinks: Vec<f64> = e_plus
        .values
        .iter()
        .chain(e_zero.values.iter())
        .chain(e_minus.values.iter())
        .copied()
        .collect();
    kinks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let width = kinks.last().unwrap() - kinks[0];
    kinks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * width.max(1e-12));

    let rhs = if kinks.len() < 2 {
        0.0
    } else {
        let plus = &e_plus.values;
        let zero = &e_zero.values;
        let minus = &e_minus.values;
        let integrand = |t: f64| -> f64 {
            let density =
                ramp_sum(plus, t) - 2.0 * ramp_sum(zero, t) + ramp_sum(minus, t);
            // The derivative was probed above; a line symbol cannot fail here.
            f.deriv(Complex64::new(t, 0.0), 2)
                .map(|v| v.re)
                .unwrap_or(f64::NAN)
                * density
        };
        kink_aligned_simpson(&kinks, panels, integrand)
    };
    if rhs.is_nan() {
        return Err(Error::Capability(
            "second derivative unavailable inside the support".into(),
        ));
    }

    let residual = (lhs - rhs).abs();
    let relative = residual / lhs.abs().max(rhs.abs()).max(1e-300);
    Ok(TraceFormulaReport {
        lhs,
        rhs,
        residual,
        relative,
        panels,
    })
}

// ---------------------------------------------------------------------------
// Circle analog
// ---------------------------------------------------------------------------

/// Fourier data of the circle trace formula along the path
/// `e^{iA}U, U, e^{−iA}U`.
#[derive(Debug, Clone)]
pub struct CircleShiftCoeffs {
    /// `τ(n) = tr((𝒱U)ⁿ − 2Uⁿ + (𝒱*U)ⁿ)` for `n = 1..=n_max`.
    pub tau: Vec<Complex64>,
    /// `−τ(n)/n²`: the shift-density Fourier coefficients under the
    /// arc-parameter second-derivative convention.  The `n = 0` coefficient
    /// is undetermined (the density is fixed only up to a constant) and is
    /// not reported.
    pub shift_coeffs: Vec<Complex64>,
}

impl CircleShiftCoeffs {
    /// `τ(n)` for any nonzero `n`; negative orders by conjugation.
    pub fn tau_at(&self, n: i64) -> Option<Complex64> {
        let idx = n.unsigned_abs() as usize;
        if idx == 0 || idx > self.tau.len() {
            return None;
        }
        let v = self.tau[idx - 1];
        Some(if n < 0 { v.conj() } else { v })
    }
}

/// Computes `τ(n)` for `1 ≤ n ≤ n_max` from the eigenphases of the three
/// unitaries.  Requires the generator spectrum inside `(−π, π)`.
pub fn circle_ssf_coeffs(
    u: &UnitaryMatrix,
    a: &HermitianMatrix,
    n_max: usize,
) -> Result<CircleShiftCoeffs> {
    if a.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: a.dim(),
        });
    }
    let norm = hermitian_op_norm(a)?;
    if norm >= std::f64::consts::PI {
        return Err(Error::InvalidArgument(format!(
            "generator norm {norm} is not inside (−π, π)"
        )));
    }
    let v = expi(a)?;
    let vu = UnitaryMatrix::new(v.matrix().matmul(u.matrix()))?;
    let vsu = UnitaryMatrix::new(v.matrix().adjoint().matmul(u.matrix()))?;
    let ph_plus = eig_unitary(&vu)?.values;
    let ph_zero = eig_unitary(u)?.values;
    let ph_minus = eig_unitary(&vsu)?.values;

    let power_trace = |phases: &[f64], n: f64| -> Complex64 {
        phases.iter().map(|&t| Complex64::cis(n * t)).sum()
    };
    let mut tau = Vec::with_capacity(n_max);
    let mut shift_coeffs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = n as f64;
        let t = power_trace(&ph_plus, nf) - power_trace(&ph_zero, nf) * 2.0
            + power_trace(&ph_minus, nf);
        tau.push(t);
        shift_coeffs.push(-t / (nf * nf));
    }
    Ok(CircleShiftCoeffs { tau, shift_coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use crate::random::{rand_hermitian, rand_unitary};
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar(v: f64) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::diagonal(&[c(v, 0.0)])).unwrap()
    }

    fn smooth_symbol(degree: usize, seed: u64) -> SmoothFn {
        let mut p = crate::besov::TrigPoly::zero(degree);
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in 2..=degree as i64 {
            let a = c(next(), next());
            p.set_coeff(n, a);
            p.set_coeff(-n, a.conj());
        }
        SmoothFn::Line(p)
    }

    #[test]
    fn scalar_pair_gives_tent_density() {
        let a = scalar(0.0);
        let k = scalar(0.8);
        let grid: Vec<f64> = (0..200).map(|i| -1.2 + 2.4 * i as f64 / 199.0).collect();
        let sample = ssf2_sample(&a, &k, &grid).unwrap();
        for (&t, &v) in sample.grid.iter().zip(sample.values.iter()) {
            let expect = (0.8 - t.abs()).max(0.0);
            assert!((v - expect).abs() < 1e-12, "t={t}: {v} vs {expect}");
        }
    }

    #[test]
    fn scalar_eta_is_one_sided_ramp() {
        let a = scalar(0.0);
        let k = scalar(0.8);
        let grid: Vec<f64> = (0..200).map(|i| -1.2 + 2.4 * i as f64 / 199.0).collect();
        let sample = koplienko_eta_sample(&a, &k, &grid).unwrap();
        for (&t, &v) in sample.grid.iter().zip(sample.values.iter()) {
            let expect = if t >= 0.0 { (0.8 - t).max(0.0) } else { 0.0 };
            assert!((v - expect).abs() < 1e-12, "t={t}: {v} vs {expect}");
        }
    }

    #[test]
    fn zero_perturbation_gives_zero_densities() {
        let a = rand_hermitian(6, 7, 1.0).unwrap();
        let k = HermitianMatrix::new(ComplexMatrix::zeros(6)).unwrap();
        let grid: Vec<f64> = (0..64).map(|i| -3.0 + 6.0 * i as f64 / 63.0).collect();
        let s = ssf2_sample(&a, &k, &grid).unwrap();
        assert!(s.values.iter().all(|&v| v.abs() < 1e-12));
        let e = koplienko_eta_sample(&a, &k, &grid).unwrap();
        assert!(e.values.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn densities_are_nonnegative_and_decompose() {
        for seed in 0..12u64 {
            let a = rand_hermitian(10, 300 + seed, 1.0).unwrap();
            let k = rand_hermitian(10, 400 + seed, 0.4).unwrap();
            let grid = default_grid(&a, &k, 257).unwrap();
            let s = ssf2_sample(&a, &k, &grid).unwrap();
            assert!(s.values.iter().all(|&v| v >= -1e-9), "seed {seed}");
            let ep = koplienko_eta_sample(&a, &k, &grid).unwrap();
            let neg = HermitianMatrix::symmetrize(&k.matrix().scale_re(-1.0));
            let em = koplienko_eta_sample(&a, &neg, &grid).unwrap();
            assert!(ep.values.iter().all(|&v| v >= -1e-9));
            assert!(em.values.iter().all(|&v| v >= -1e-9));
            for i in 0..grid.len() {
                let diff = (s.values[i] - ep.values[i] - em.values[i]).abs();
                assert!(diff < 1e-9, "seed {seed}, i {i}: {diff}");
            }
        }
    }

    #[test]
    fn density_vanishes_outside_padded_hull() {
        let a = rand_hermitian(8, 21, 1.0).unwrap();
        let k = rand_hermitian(8, 22, 0.5).unwrap();
        let sa = eig_hermitian(&a).unwrap().values;
        let kn = hermitian_op_norm(&k).unwrap();
        let lo = sa.first().unwrap() - kn - 0.05;
        let hi = sa.last().unwrap() + kn + 0.05;
        let grid = vec![lo - 1.0, lo - 0.1, hi + 0.1, hi + 1.0];
        let s = ssf2_sample(&a, &k, &grid).unwrap();
        assert!(s.values.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn jitter_moves_grid_points_off_eigenvalues() {
        let a = HermitianMatrix::new(ComplexMatrix::diagonal(&[c(0.0, 0.0), c(1.0, 0.0)]))
            .unwrap();
        let k = HermitianMatrix::new(ComplexMatrix::zeros(2)).unwrap();
        let s = ssf2_sample(&a, &k, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(s.jittered, vec![0, 2]);
        assert!(s.grid[0] != 0.0 && s.grid[2] != 1.0);
        assert_eq!(s.grid[1], 0.5);
    }

    #[test]
    fn trace_formula_holds_for_smooth_symbol() {
        let a = rand_hermitian(12, 501, 1.0).unwrap();
        let k = rand_hermitian(12, 502, 0.5).unwrap();
        let f = smooth_symbol(10, 503);
        let report = verify_trace_formula_sa(&a, &k, &f, 4096).unwrap();
        assert!(
            report.relative <= 1e-6,
            "relative residual {}",
            report.relative
        );
    }

    #[test]
    fn trace_formula_residual_decays_at_fourth_order() {
        let a = rand_hermitian(8, 511, 1.0).unwrap();
        let k = rand_hermitian(8, 512, 0.6).unwrap();
        let f = smooth_symbol(8, 513);
        let coarse = verify_trace_formula_sa(&a, &k, &f, 128).unwrap();
        let fine = verify_trace_formula_sa(&a, &k, &f, 256).unwrap();
        assert!(coarse.residual > 0.0 && fine.residual > 0.0);
        let ratio = coarse.residual / fine.residual;
        assert!(ratio > 6.0, "refinement ratio {ratio}");
    }

    #[test]
    fn affine_symbol_gives_zero_both_sides() {
        let a = rand_hermitian(6, 520, 1.0).unwrap();
        let k = rand_hermitian(6, 521, 0.5).unwrap();
        let f = SmoothFn::callable_with_derivs(
            |x| 3.0 * x + 1.0,
            vec![Arc::new(|_| 3.0), Arc::new(|_| 0.0)],
        );
        let report = verify_trace_formula_sa(&a, &k, &f, 64).unwrap();
        assert!(report.lhs.abs() < 1e-11, "lhs {}", report.lhs);
        assert!(report.rhs.abs() < 1e-11, "rhs {}", report.rhs);
    }

    #[test]
    fn quadratic_symbol_recovers_perturbation_mass() {
        // f = x²/2 has f'' ≡ 1, so the formula reads ∫ς = tr K²; the
        // integrand is piecewise linear and the kink-aligned rule is exact.
        let a = rand_hermitian(10, 530, 1.0).unwrap();
        let k = rand_hermitian(10, 531, 0.7).unwrap();
        let f = SmoothFn::callable_with_derivs(
            |x| 0.5 * x * x,
            vec![Arc::new(|x: f64| x), Arc::new(|_| 1.0)],
        );
        let report = verify_trace_formula_sa(&a, &k, &f, 64).unwrap();
        let mass = k.matrix().matmul(k.matrix()).trace().re;
        assert!((report.lhs - mass).abs() < 1e-10 * mass.abs());
        assert!(report.relative < 1e-12, "relative {}", report.relative);
    }

    #[test]
    fn trace_formula_requires_second_derivative() {
        let a = rand_hermitian(4, 540, 1.0).unwrap();
        let k = rand_hermitian(4, 541, 0.5).unwrap();
        let f = SmoothFn::callable(|x| x * x);
        assert!(verify_trace_formula_sa(&a, &k, &f, 64).is_err());
    }

    #[test]
    fn circle_coeffs_vanish_for_zero_generator() {
        let u = rand_unitary(6, 600).unwrap();
        let a = HermitianMatrix::new(ComplexMatrix::zeros(6)).unwrap();
        let out = circle_ssf_coeffs(&u, &a, 8).unwrap();
        assert!(out.tau.iter().all(|t| t.norm() < 1e-10));
    }

    #[test]
    fn circle_first_coefficient_matches_cosine_trace() {
        let u = rand_unitary(7, 610).unwrap();
        let a = rand_hermitian(7, 611, 0.4).unwrap();
        let out = circle_ssf_coeffs(&u, &a, 4).unwrap();
        // τ(1) = tr((2cos A − 2I) U).
        let cosfn = SmoothFn::callable(|x| 2.0 * x.cos() - 2.0);
        let ea = eig_hermitian(&a).unwrap();
        let m = apply_fn(&ea, &cosfn).unwrap().matmul(u.matrix());
        let expect = m.trace();
        assert!(
            (out.tau[0] - expect).norm() < 1e-9,
            "{} vs {expect}",
            out.tau[0]
        );
        assert!((out.shift_coeffs[0] + out.tau[0]).norm() < 1e-15);
    }

    #[test]
    fn circle_coeffs_have_hermitian_symmetry() {
        for seed in 0..8u64 {
            let u = rand_unitary(6, 700 + seed).unwrap();
            let a = rand_hermitian(6, 800 + seed, 0.5).unwrap();
            let out = circle_ssf_coeffs(&u, &a, 5).unwrap();
            // Direct negative-power traces through adjoints.
            let v = expi(&a).unwrap();
            let vu = v.matrix().matmul(u.matrix());
            let vsu = v.matrix().adjoint().matmul(u.matrix());
            let mut mp = vu.adjoint();
            let mut mz = u.matrix().adjoint();
            let mut mm = vsu.adjoint();
            for n in 1..=5usize {
                let direct = mp.trace() - mz.trace() * 2.0 + mm.trace();
                let sym = out.tau_at(-(n as i64)).unwrap();
                assert!(
                    (direct - sym).norm() < 1e-9,
                    "seed {seed}, n {n}: {direct} vs {sym}"
                );
                if n < 5 {
                    mp = mp.matmul(&vu.adjoint());
                    mz = mz.matmul(&u.matrix().adjoint());
                    mm = mm.matmul(&vsu.adjoint());
                }
            }
        }
    }

    #[test]
    fn circle_rejects_large_generator() {
        let u = rand_unitary(4, 900).unwrap();
        let a = HermitianMatrix::new(
            ComplexMatrix::diagonal(&[c(3.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        )
        .unwrap();
        assert!(circle_ssf_coeffs(&u, &a, 3).is_err());
    }
}
