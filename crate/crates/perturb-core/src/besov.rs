//! Dyadic smoothness analysis for trigonometric polynomials.
//!
//! The central object is a Laurent polynomial on the unit circle with
//! coefficients `ĥ(n)`, `|n| ≤ degree`.  A fixed smooth bump `w` — built from
//! the classical `e^{−1/t}` step — slices a polynomial into dyadic frequency
//! pieces.  The piece decomposition drives the Hölder-type seminorm, the
//! Besov seminorms, the low/high band split used for rank estimates, and the
//! finite-difference smoothness modulus.
//!
//! Functions on the real line are exercised elsewhere through the same
//! objects, read as periodic band-limited functions `x ↦ Σ ĥ(n) e^{inx}`:
//! for symbols with no frequencies in `{−1, 0, 1}` the dyadic pieces and all
//! seminorms agree between the two readings.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::util::binomial;

// ---------------------------------------------------------------------------
// Smooth step and dyadic bump
// ---------------------------------------------------------------------------

/// `e^{−1/t}` continued by zero: smooth, flat to all orders at `t = 0`.
pub fn smooth_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth monotone step: 0 for `t ≤ 0`, 1 for `t ≥ 1`, value `1/2` at `1/2`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = smooth_exp(t);
    let b = smooth_exp(1.0 - t);
    a / (a + b)
}

/// The dyadic bump: supported on `[1/2, 2]`, rises as `smooth_step(2x − 1)`
/// on `[1/2, 1]`, and satisfies `w(x) = 1 − w(x/2)` on `[1, 2]`, so that
/// `Σ_{n∈ℤ} w(x/2ⁿ) = 1` for every `x > 0`.
pub fn bump_w(x: f64) -> f64 {
    if x <= 0.5 || x >= 2.0 {
        0.0
    } else if x <= 1.0 {
        smooth_step(2.0 * x - 1.0)
    } else {
        1.0 - smooth_step(x - 1.0)
    }
}

/// Weight of frequency `k ≥ 1` in the `n`-th dyadic piece (`n ≥ 1`).
pub fn bump_weight(k: usize, n: u32) -> f64 {
    bump_w(k as f64 / (1u64 << n) as f64)
}

// ---------------------------------------------------------------------------
// Trigonometric (Laurent) polynomials
// ---------------------------------------------------------------------------

/// A polynomial `Σ_{|n| ≤ d} ĥ(n) ζⁿ` on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    degree: usize,
    /// Coefficient of `ζⁿ` stored at index `n + degree`.
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(degree: usize) -> Self {
        TrigPoly {
            degree,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
        }
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "coefficient vector must have length 2·{degree}+1, got {}",
                coeffs.len()
            )));
        }
        Ok(TrigPoly { degree, coeffs })
    }

    /// Single term `c·ζⁿ`.
    pub fn monomial(n: i64, c: Complex64) -> Self {
        let d = n.unsigned_abs() as usize;
        let mut p = Self::zero(d);
        p.set_coeff(n, c);
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.degree {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.degree as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, n: i64, c: Complex64) {
        assert!(
            n.unsigned_abs() as usize <= self.degree,
            "coefficient index out of range"
        );
        self.coeffs[(n + self.degree as i64) as usize] = c;
    }

    /// Drops zero outer coefficients (keeps at least degree 0).
    pub fn trimmed(&self) -> Self {
        let mut d = self.degree;
        while d > 0 && self.coeff(d as i64).norm() == 0.0 && self.coeff(-(d as i64)).norm() == 0.0 {
            d -= 1;
        }
        let mut out = Self::zero(d);
        for n in -(d as i64)..=(d as i64) {
            out.set_coeff(n, self.coeff(n));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        let mut out = Self::zero(d);
        for n in -(d as i64)..=(d as i64) {
            out.set_coeff(n, self.coeff(n) + other.coeff(n));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        let mut out = Self::zero(d);
        for n in -(d as i64)..=(d as i64) {
            out.set_coeff(n, self.coeff(n) - other.coeff(n));
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TrigPoly {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Pointwise product (coefficient convolution).
    pub fn mul(&self, other: &Self) -> Self {
        let d = self.degree + other.degree;
        let mut out = Self::zero(d);
        for a in -(self.degree as i64)..=(self.degree as i64) {
            let ca = self.coeff(a);
            if ca.norm_sqr() == 0.0 {
                continue;
            }
            for b in -(other.degree as i64)..=(other.degree as i64) {
                let prev = out.coeff(a + b);
                out.set_coeff(a + b, prev + ca * other.coeff(b));
            }
        }
        out
    }

    /// `f̄`: coefficients `conj(ĥ(−n))`.
    pub fn conj(&self) -> Self {
        let d = self.degree;
        let mut out = Self::zero(d);
        for n in -(d as i64)..=(d as i64) {
            out.set_coeff(n, self.coeff(-n).conj());
        }
        out
    }

    /// Angular derivative `d/dθ f(e^{iθ})`: coefficients `in·ĥ(n)`.
    pub fn derivative_theta(&self) -> Self {
        let d = self.degree;
        let mut out = Self::zero(d);
        for n in -(d as i64)..=(d as i64) {
            out.set_coeff(n, self.coeff(n) * Complex64::new(0.0, n as f64));
        }
        out
    }

    /// True when the symbol is real-valued on the circle (`ĥ(−n) = conj ĥ(n)`).
    pub fn is_real_symbol(&self, tol: f64) -> bool {
        (0..=self.degree as i64).all(|n| (self.coeff(-n) - self.coeff(n).conj()).norm() <= tol)
    }

    /// True when all negative-frequency coefficients vanish.
    pub fn is_analytic(&self, tol: f64) -> bool {
        (1..=self.degree as i64).all(|n| self.coeff(-n).norm() <= tol)
    }

    /// Evaluation by a Horner pass over positive powers and one over
    /// negative powers.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d = self.degree as i64;
        // Analytic part a_0 + a_1 z + … (includes the constant).
        let mut plus = Complex64::new(0.0, 0.0);
        for n in (0..=d).rev() {
            plus = plus * z + self.coeff(n);
        }
        // Anti-analytic part in powers of 1/z (for |z| = 1 this is conj(z)).
        let zi = if (z.norm() - 1.0).abs() < 1e-9 {
            z.conj()
        } else {
            Complex64::new(1.0, 0.0) / z
        };
        let mut minus = Complex64::new(0.0, 0.0);
        for n in (1..=d).rev() {
            minus = minus * zi + self.coeff(-n);
        }
        plus + minus * zi
    }

    /// `r`-th complex derivative `Σ n(n−1)…(n−r+1) ĥ(n) z^{n−r}`, evaluated
    /// pointwise (no Laurent expansion materialized).
    pub fn eval_deriv_z(&self, z: Complex64, r: u32) -> Complex64 {
        if r == 0 {
            return self.eval(z);
        }
        let d = self.degree as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for n in -d..=d {
            let c = self.coeff(n);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let mut fall = 1.0f64;
            for i in 0..r as i64 {
                fall *= (n - i) as f64;
            }
            if fall == 0.0 {
                continue;
            }
            acc += c * fall * z.powi((n - r as i64) as i32);
        }
        acc
    }

    /// Values at the `m`-th roots of unity `e^{2πik/m}`, `k = 0..m`, via one
    /// inverse FFT.  Requires `m ≥ 2·degree + 1` so no frequencies alias.
    pub fn eval_grid(&self, m: usize) -> Vec<Complex64> {
        assert!(m >= 2 * self.degree + 1, "grid too coarse for the degree");
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for n in -(self.degree as i64)..=(self.degree as i64) {
            let idx = n.rem_euclid(m as i64) as usize;
            buf[idx] += self.coeff(n);
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(m);
        fft.process(&mut buf);
        buf
    }

    /// Interpolates grid samples `f(e^{2πik/m})` back to coefficients
    /// `|n| ≤ degree` (the caller asserts the tail beyond `degree` is noise).
    pub fn from_grid_samples(samples: &[Complex64], degree: usize) -> Result<Self> {
        let m = samples.len();
        if m < 2 * degree + 1 {
            return Err(Error::InvalidArgument(format!(
                "{m} samples cannot resolve degree {degree}"
            )));
        }
        let mut buf = samples.to_vec();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut buf);
        let scale = 1.0 / m as f64;
        let mut p = Self::zero(degree);
        for n in -(degree as i64)..=(degree as i64) {
            let idx = n.rem_euclid(m as i64) as usize;
            p.set_coeff(n, buf[idx] * scale);
        }
        Ok(p)
    }

    fn sample_count(&self) -> usize {
        (8 * (2 * self.degree + 1)).max(64)
    }

    /// Sup norm over the circle: dense sampling plus a golden-section polish
    /// around the best sample.
    pub fn sup_norm(&self) -> f64 {
        let m = self.sample_count();
        let vals = self.eval_grid(m);
        let mut best_k = 0;
        let mut best = 0.0;
        for (k, v) in vals.iter().enumerate() {
            let a = v.norm();
            if a > best {
                best = a;
                best_k = k;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let (mut lo, mut hi) = (
            (best_k as f64 - 1.0) * step,
            (best_k as f64 + 1.0) * step,
        );
        let g = |t: f64| self.eval(Complex64::cis(t)).norm();
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        let (mut f1, mut f2) = (g(x1), g(x2));
        for _ in 0..60 {
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = g(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = g(x1);
            }
        }
        best.max(f1).max(f2)
    }

    /// `L^p` norm against normalized arclength, by the trapezoid rule on the
    /// dense grid (spectrally accurate for smooth periodic integrands).
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "L^p exponent must be positive, got {p}"
            )));
        }
        let m = self.sample_count();
        let vals = self.eval_grid(m);
        let mean = vals.iter().map(|v| v.norm().powf(p)).sum::<f64>() / m as f64;
        Ok(mean.powf(1.0 / p))
    }
}

// ---------------------------------------------------------------------------
// Dyadic pieces
// ---------------------------------------------------------------------------

/// One dyadic frequency band of a polynomial.
#[derive(Debug, Clone)]
pub struct LpPiece {
    /// Band index; band 0 is the special `{−1, 0, 1}` piece.
    pub n: u32,
    /// Positive-frequency content `f ∗ W_n` (for `n = 0`, the whole piece).
    pub plus: TrigPoly,
    /// Mirrored negative-frequency content `f ∗ W_n^♯` (zero for `n = 0`).
    pub sharp: TrigPoly,
}

/// Splits `f` into its dyadic pieces.  Band 0 carries frequencies
/// `{−1, 0, 1}` unweighted; band `n ≥ 1` carries `ĥ(±k)·w(k/2ⁿ)`.
/// The pieces sum back to `f` exactly.
pub fn lp_pieces(f: &TrigPoly) -> Vec<LpPiece> {
    let d = f.degree();
    let mut pieces = Vec::new();

    let mut w0 = TrigPoly::zero(1.min(d).max(1));
    w0.set_coeff(0, f.coeff(0));
    if d >= 1 {
        w0.set_coeff(1, f.coeff(1));
        w0.set_coeff(-1, f.coeff(-1));
    }
    pieces.push(LpPiece {
        n: 0,
        plus: w0,
        sharp: TrigPoly::zero(0),
    });

    let mut n = 1u32;
    while (1u64 << (n - 1)) <= d as u64 {
        let hi = ((1u64 << (n + 1)) as i64).min(d as i64);
        let lo = (1u64 << (n - 1)) as i64;
        let deg = hi.max(1) as usize;
        let mut plus = TrigPoly::zero(deg);
        let mut sharp = TrigPoly::zero(deg);
        let mut nonzero = false;
        for k in lo..=hi {
            let w = bump_weight(k as usize, n);
            if w == 0.0 {
                continue;
            }
            let cp = f.coeff(k) * w;
            let cm = f.coeff(-k) * w;
            if cp.norm_sqr() != 0.0 || cm.norm_sqr() != 0.0 {
                nonzero = true;
            }
            plus.set_coeff(k, cp);
            sharp.set_coeff(-k, cm);
        }
        if nonzero {
            pieces.push(LpPiece {
                n,
                plus: plus.trimmed(),
                sharp: sharp.trimmed(),
            });
        }
        n += 1;
    }
    pieces
}

/// Hölder-type seminorm `sup_{n≥1} 2^{nα} (‖f∗W_n‖_∞ + ‖f∗W_n^♯‖_∞)`.
/// Band 0 does not contribute; symbols supported on `{−1,0,1}` return 0.
pub fn lambda_seminorm(f: &TrigPoly, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "smoothness order must be positive, got {alpha}"
        )));
    }
    let mut best: f64 = 0.0;
    for piece in lp_pieces(f) {
        if piece.n == 0 {
            continue;
        }
        let weight = 2.0_f64.powf(piece.n as f64 * alpha);
        best = best.max(weight * (piece.plus.sup_norm() + piece.sharp.sup_norm()));
    }
    Ok(best)
}

/// Besov seminorm: the `ℓ^q` norm over bands `n ≥ 1` of
/// `2^{ns} (‖f∗W_n‖_{L^p} + ‖f∗W_n^♯‖_{L^p})`.  Pass `q = f64::INFINITY`
/// for the sup variant.
pub fn besov_seminorm(f: &TrigPoly, s: f64, p: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ℓ^q exponent must be positive, got {q}"
        )));
    }
    let mut terms = Vec::new();
    for piece in lp_pieces(f) {
        if piece.n == 0 {
            continue;
        }
        let weight = 2.0_f64.powf(piece.n as f64 * s);
        terms.push(weight * (piece.plus.lp_norm(p)? + piece.sharp.lp_norm(p)?));
    }
    if q.is_infinite() {
        Ok(terms.into_iter().fold(0.0, f64::max))
    } else {
        Ok(terms.into_iter().map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q))
    }
}

/// Low/high band split at cutoff `m`.
#[derive(Debug, Clone)]
pub struct BernsteinSplit {
    /// Pieces with `2ⁿ ≤ m` (plus band 0); degree at most `2m`.
    pub low: TrigPoly,
    /// The remaining high-frequency part, `f − low`.
    pub high: TrigPoly,
    /// Sampled sup norm of the high part.
    pub high_sup: f64,
    /// Certified bound: the absolute coefficient sum of the high part.
    pub coeff_tail_bound: f64,
}

/// Splits `f` into the bands at or below cutoff `m ≥ 1` and the rest.
pub fn bernstein_split(f: &TrigPoly, m: usize) -> Result<BernsteinSplit> {
    if m == 0 {
        return Err(Error::InvalidArgument("cutoff must be at least 1".into()));
    }
    let mut low = TrigPoly::zero(0);
    for piece in lp_pieces(f) {
        if (1u64 << piece.n) <= m as u64 {
            low = low.add(&piece.plus).add(&piece.sharp);
        }
    }
    let low = low.trimmed();
    let high = f.sub(&low).trimmed();
    let tail: f64 = (-(high.degree() as i64)..=(high.degree() as i64))
        .map(|n| high.coeff(n).norm())
        .sum();
    Ok(BernsteinSplit {
        high_sup: high.sup_norm(),
        coeff_tail_bound: tail,
        low,
        high,
    })
}

/// Sampled `n`-th order smoothness modulus
/// `sup { |Δ_τⁿ f(ζ)| : ζ ∈ 𝕋, |1 − τ| ≤ δ }` where `Δ_τ f(ζ) = f(τζ) − f(ζ)`.
pub fn modulus_of_continuity(f: &TrigPoly, delta: f64, n: u32) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "modulus step must be positive, got {delta}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("difference order must be ≥ 1".into()));
    }
    let weights: Vec<f64> = (0..=n as usize)
        .map(|k| {
            let sign = if (n as usize - k) % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(n as usize, k)
        })
        .collect();
    let phi_max = 2.0 * (delta / 2.0).min(1.0).asin();
    let zeta_grid = f.sample_count().max(256);
    let tau_steps = 64;

    let diff_at = |phi: f64| -> f64 {
        let mut best: f64 = 0.0;
        for kz in 0..zeta_grid {
            let theta = 2.0 * std::f64::consts::PI * kz as f64 / zeta_grid as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &wk) in weights.iter().enumerate() {
                acc += f.eval(Complex64::cis(theta + k as f64 * phi)) * wk;
            }
            best = best.max(acc.norm());
        }
        best
    };

    let mut best: f64 = 0.0;
    let mut best_phi = 0.0;
    for s in 0..=tau_steps {
        for sign in [-1.0, 1.0] {
            let phi = sign * phi_max * s as f64 / tau_steps as f64;
            let v = diff_at(phi);
            if v > best {
                best = v;
                best_phi = phi;
            }
        }
    }
    // Golden-section polish of the step angle around the best sample.
    let span = phi_max / tau_steps as f64;
    let (mut lo, mut hi) = (
        (best_phi - span).max(-phi_max),
        (best_phi + span).min(phi_max),
    );
    let phi_ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - phi_ratio * (hi - lo), lo + phi_ratio * (hi - lo));
    let (mut f1, mut f2) = (diff_at(x1), diff_at(x2));
    for _ in 0..25 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi_ratio * (hi - lo);
            f2 = diff_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi_ratio * (hi - lo);
            f1 = diff_at(x1);
        }
    }
    Ok(best.max(f1).max(f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lacunary(alpha: f64, kmax: u32) -> TrigPoly {
        // Σ_{k=1..kmax} 2^{−αk} z^{2^k}
        let mut p = TrigPoly::zero(1usize << kmax);
        for k in 1..=kmax {
            p.set_coeff(1i64 << k, c(2.0_f64.powf(-alpha * k as f64), 0.0));
        }
        p
    }

    #[test]
    fn smooth_step_endpoints_and_midpoint() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(0.0), 0.0);
        assert_eq!(smooth_step(1.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        for i in 0..100 {
            let t = i as f64 / 99.0;
            let v = smooth_step(t);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn bump_partition_of_unity() {
        // Σ_{n∈ℤ} w(x/2ⁿ) = 1 for x ≥ 1, checked on a dense grid.
        for i in 0..10_000 {
            let x = 1.0 + i as f64 * 0.37;
            let mut total = 0.0;
            for n in -2..40 {
                total += bump_w(x / 2.0_f64.powi(n));
            }
            assert!((total - 1.0).abs() < 1e-10, "x={x}: {total}");
        }
        assert_eq!(bump_w(0.5), 0.0);
        assert_eq!(bump_w(1.0), 1.0);
        assert_eq!(bump_w(2.0), 0.0);
    }

    #[test]
    fn eval_matches_naive_power_sum() {
        let mut p = TrigPoly::zero(9);
        for n in -9i64..=9 {
            p.set_coeff(n, c((n as f64 * 0.3).sin(), (n as f64 * 0.7).cos()));
        }
        for j in 0..50 {
            let z = Complex64::cis(0.13 * j as f64);
            let naive: Complex64 = (-9i64..=9)
                .map(|n| p.coeff(n) * z.powi(n as i32))
                .sum();
            assert!((p.eval(z) - naive).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_eval_matches_pointwise_eval() {
        let p = lacunary(0.5, 4);
        let m = 8 * (2 * p.degree() + 1);
        let grid = p.eval_grid(m);
        for k in (0..m).step_by(17) {
            let z = Complex64::cis(2.0 * std::f64::consts::PI * k as f64 / m as f64);
            assert!((grid[k] - p.eval(z)).norm() < 1e-9);
        }
    }

    #[test]
    fn grid_sampling_roundtrip() {
        let p = lacunary(0.7, 3);
        let m = 4 * (2 * p.degree() + 1);
        let q = TrigPoly::from_grid_samples(&p.eval_grid(m), p.degree()).unwrap();
        for n in -(p.degree() as i64)..=(p.degree() as i64) {
            assert!((p.coeff(n) - q.coeff(n)).norm() < 1e-10);
        }
    }

    #[test]
    fn pieces_reconstruct_exactly() {
        let mut f = TrigPoly::zero(64);
        for n in -64i64..=64 {
            f.set_coeff(n, c((n as f64).cos(), (1.3 * n as f64).sin()));
        }
        let mut total = TrigPoly::zero(0);
        for piece in lp_pieces(&f) {
            total = total.add(&piece.plus).add(&piece.sharp);
        }
        for n in -64i64..=64 {
            assert!(
                (total.coeff(n) - f.coeff(n)).norm() < 1e-12,
                "coefficient {n} mismatched"
            );
        }
    }

    #[test]
    fn power_of_two_monomial_occupies_one_band() {
        for m in 1..=6u32 {
            let f = TrigPoly::monomial(1i64 << m, c(1.0, 0.0));
            let pieces = lp_pieces(&f);
            let active: Vec<u32> = pieces
                .iter()
                .filter(|p| p.plus.sup_norm() + p.sharp.sup_norm() > 1e-14)
                .map(|p| p.n)
                .collect();
            assert_eq!(active, vec![m]);
        }
    }

    #[test]
    fn holder_seminorm_of_normalized_lacunary_is_one() {
        for &alpha in &[0.3, 0.5, 0.9] {
            let f = lacunary(alpha, 5);
            let v = lambda_seminorm(&f, alpha).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "alpha={alpha}: {v}");
        }
    }

    #[test]
    fn holder_seminorm_trivial_cases() {
        let constant = TrigPoly::monomial(0, c(3.0, 0.0));
        assert_eq!(lambda_seminorm(&constant, 0.5).unwrap(), 0.0);
        let single = TrigPoly::monomial(16, c(1.0, 0.0));
        let v = lambda_seminorm(&single, 0.5).unwrap();
        assert!((v - 4.0).abs() < 1e-9); // 2^{4·0.5}
    }

    #[test]
    fn holder_seminorm_is_homogeneous() {
        let f = lacunary(0.5, 4);
        let a = lambda_seminorm(&f, 0.5).unwrap();
        let b = lambda_seminorm(&f.scale_re(7.25), 0.5).unwrap();
        assert!((b - 7.25 * a).abs() < 1e-9 * (1.0 + b));
    }

    #[test]
    fn besov_seminorm_counts_lacunary_bands_in_little_ellq() {
        // With a_k = 2^{−αk} each band contributes exactly 1, so the
        // (s=α, q) seminorm equals K^{1/q}.
        let alpha = 0.5;
        for kmax in [2u32, 4, 6] {
            let f = lacunary(alpha, kmax);
            let q = 1.0 / alpha;
            let v = besov_seminorm(&f, alpha, 64.0, q).unwrap();
            let expect = (kmax as f64).powf(alpha);
            assert!((v - expect).abs() < 1e-6, "kmax={kmax}: {v} vs {expect}");
        }
    }

    #[test]
    fn besov_seminorm_monotone_in_q() {
        let f = lacunary(0.5, 5);
        let v1 = besov_seminorm(&f, 0.5, 2.0, 1.0).unwrap();
        let v2 = besov_seminorm(&f, 0.5, 2.0, 2.0).unwrap();
        let vs = besov_seminorm(&f, 0.5, 2.0, f64::INFINITY).unwrap();
        assert!(v1 >= v2 - 1e-12);
        assert!(v2 >= vs - 1e-12);
    }

    #[test]
    fn bernstein_split_respects_cutoff_and_tail_bound() {
        let alpha = 0.5;
        let f = {
            // Σ 4^{−αn} (z^{4ⁿ} + z̄^{4ⁿ}), n = 1..5
            let mut p = TrigPoly::zero(1024);
            for n in 1..=5u32 {
                let a = c(4.0_f64.powf(-alpha * n as f64), 0.0);
                p.set_coeff(1i64 << (2 * n), a);
                p.set_coeff(-(1i64 << (2 * n)), a);
            }
            p
        };
        let split = bernstein_split(&f, 16).unwrap();
        assert!(split.low.degree() <= 32);
        // Expected tail: terms with 4ⁿ > 16, i.e. n = 3, 4, 5.
        let expect_tail: f64 = (3..=5)
            .map(|n| 2.0 * 4.0_f64.powf(-alpha * n as f64))
            .sum();
        assert!((split.coeff_tail_bound - expect_tail).abs() < 1e-12);
        assert!(split.high_sup <= split.coeff_tail_bound + 1e-12);
        // Low and high must sum back to f.
        let sum = split.low.add(&split.high);
        for n in -1024i64..=1024 {
            assert!((sum.coeff(n) - f.coeff(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn modulus_of_identity_function_is_delta() {
        let f = TrigPoly::monomial(1, c(1.0, 0.0));
        for &delta in &[0.1, 0.5, 1.0] {
            let v = modulus_of_continuity(&f, delta, 1).unwrap();
            assert!((v - delta).abs() < 1e-3, "delta={delta}: {v}");
        }
    }

    #[test]
    fn modulus_of_constant_vanishes() {
        let f = TrigPoly::monomial(0, c(5.0, 0.0));
        let v = modulus_of_continuity(&f, 0.3, 2).unwrap();
        assert!(v < 1e-12);
    }

    #[test]
    fn second_modulus_of_linear_term_is_quadratic() {
        // Δ²_τ z = ζ(τ−1)², so the second modulus at step δ is δ².
        let f = TrigPoly::monomial(1, c(1.0, 0.0));
        let v = modulus_of_continuity(&f, 0.4, 2).unwrap();
        assert!((v - 0.16).abs() < 2e-3, "{v}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn polys() -> impl Strategy<Value = TrigPoly> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 17).prop_map(|coeffs| {
                let mut f = TrigPoly::zero(8);
                for (i, (re, im)) in coeffs.into_iter().enumerate() {
                    f.set_coeff(i as i64 - 8, c(re, im));
                }
                f
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn band_pieces_reassemble_the_symbol(f in polys()) {
                let mut sum = TrigPoly::zero(0);
                for piece in lp_pieces(&f) {
                    sum = sum.add(&piece.plus).add(&piece.sharp);
                }
                for n in -8..=8i64 {
                    let err = (sum.coeff(n) - f.coeff(n)).norm();
                    prop_assert!(err <= 1e-12, "coefficient {n}: {err}");
                }
            }

            #[test]
            fn seminorm_is_absolutely_homogeneous(f in polys(), scale in -4.0f64..4.0, alpha in 0.2f64..1.8) {
                let base = lambda_seminorm(&f, alpha).unwrap();
                let scaled = lambda_seminorm(&f.scale_re(scale), alpha).unwrap();
                let expected = scale.abs() * base;
                prop_assert!((scaled - expected).abs() <= 1e-12 * expected.max(1e-12));
            }

            #[test]
            fn seminorm_ignores_rotations_of_the_argument(f in polys(), alpha in 0.2f64..1.8, shift in 0.0f64..6.2) {
                let base = lambda_seminorm(&f, alpha).unwrap();
                let mut rotated = TrigPoly::zero(f.degree());
                for n in -(f.degree() as i64)..=f.degree() as i64 {
                    rotated.set_coeff(n, f.coeff(n) * Complex64::from_polar(1.0, shift * n as f64));
                }
                let moved = lambda_seminorm(&rotated, alpha).unwrap();
                prop_assert!((moved - base).abs() <= 1e-9 * base.max(1e-9), "{moved} vs {base}");
            }

            #[test]
            fn split_parts_reassemble_exactly(f in polys(), m in 1usize..12) {
                let split = bernstein_split(&f, m).unwrap();
                let sum = split.low.add(&split.high);
                for n in -8..=8i64 {
                    let err = (sum.coeff(n) - f.coeff(n)).norm();
                    prop_assert!(err <= 1e-15, "coefficient {n}: {err}");
                }
            }
        }
    }
}
