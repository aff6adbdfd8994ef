//! Random symbol families used by the sweep suites.
//!
//! Every draw is returned with unit smoothness seminorm, so a report row's
//! right-hand side never needs a separate `‖f‖` factor.  Low frequencies
//! `|k| ≤ 1` are always left empty: the inequalities under test are blind to
//! that band, and excluding it keeps the seminorm an honest measure of the
//! whole symbol.

use num_complex::Complex64;
use perturb_core::besov::{lambda_seminorm, TrigPoly};
use perturb_core::error::{Error, Result};
use perturb_core::random::GaussianStream;
use perturb_core::util::mix_seed;

use crate::config::Family;

/// Draws a symbol of the given family, normalized to unit `Λ_α` seminorm.
///
/// With `analytic` set, only nonnegative frequencies are populated (the form
/// needed on contractions); otherwise coefficients are mirrored conjugate so
/// the symbol is real on its domain.
pub fn draw_symbol(
    family: Family,
    alpha: f64,
    degree: usize,
    seed: u64,
    analytic: bool,
) -> Result<TrigPoly> {
    let raw = match family {
        Family::Lacunary => lacunary_symbol(alpha, degree, seed, analytic),
        Family::Banded => banded_symbol(alpha, degree, seed, analytic),
        Family::Classic => classic_symbol(alpha, degree, analytic)?,
    };
    let seminorm = lambda_seminorm(&raw, alpha)?;
    if !(seminorm.is_finite() && seminorm > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "drawn {} symbol has unusable seminorm {seminorm}",
            family_label(family)
        )));
    }
    Ok(raw.scale_re(1.0 / seminorm))
}

fn family_label(family: Family) -> &'static str {
    match family {
        Family::Lacunary => "lacunary",
        Family::Banded => "banded",
        Family::Classic => "classic",
    }
}

fn random_phase(stream: &mut GaussianStream) -> Complex64 {
    loop {
        let z = stream.complex_normal();
        let n = z.norm();
        if n > 1e-12 {
            return z / n;
        }
    }
}

fn place(poly: &mut TrigPoly, k: i64, c: Complex64, analytic: bool) {
    poly.set_coeff(k, c);
    if !analytic {
        poly.set_coeff(-k, c.conj());
    }
}

/// `Σ_k 2^{−αk} e^{iφ_k} ζ^{2^k}`: one frequency per dyadic band, so the
/// seminorm is read off directly and the decay exponent is exactly `α`.
fn lacunary_symbol(alpha: f64, degree: usize, seed: u64, analytic: bool) -> TrigPoly {
    let mut stream = GaussianStream::new(mix_seed(seed, 0x1ac));
    let mut poly = TrigPoly::zero(degree);
    let mut k = 1u32;
    while (1usize << k) <= degree {
        let amp = (2.0f64).powf(-alpha * k as f64);
        place(
            &mut poly,
            1i64 << k,
            random_phase(&mut stream) * amp,
            analytic,
        );
        k += 1;
    }
    poly
}

/// Gaussian coefficients shaped so each dyadic band contributes comparably
/// after `2^{nα}` magnification: the critical-regularity profile.
fn banded_symbol(alpha: f64, degree: usize, seed: u64, analytic: bool) -> TrigPoly {
    let mut stream = GaussianStream::new(mix_seed(seed, 0xba0d));
    let mut poly = TrigPoly::zero(degree);
    let mut band = 1u32;
    while (1usize << (band - 1)).max(2) <= degree {
        let lo = (1usize << (band - 1)).max(2);
        let hi = ((1usize << (band + 1)) - 1).min(degree);
        if lo > hi {
            break;
        }
        let width = (hi - lo + 1) as f64;
        let level = (2.0f64).powf(-alpha * band as f64) / width.sqrt();
        for k in lo..=hi {
            place(
                &mut poly,
                k as i64,
                stream.complex_normal() * level,
                analytic,
            );
        }
        band += 1;
    }
    poly
}

/// Fourier truncation of `|sin θ|^α` with the `|k| ≤ 1` content dropped; a
/// fixed, seed-independent symbol with algebraically decaying coefficients.
fn classic_symbol(alpha: f64, degree: usize, analytic: bool) -> Result<TrigPoly> {
    let samples = 4096usize;
    let grid: Vec<Complex64> = (0..samples)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
            Complex64::new(theta.sin().abs().powf(alpha), 0.0)
        })
        .collect();
    let full = TrigPoly::from_grid_samples(&grid, degree)?;
    let mut poly = TrigPoly::zero(degree);
    for k in 2..=degree as i64 {
        let c = full.coeff(k);
        poly.set_coeff(k, c);
        if !analytic {
            poly.set_coeff(-k, c.conj());
        }
    }
    Ok(poly)
}
