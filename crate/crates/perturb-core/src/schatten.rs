//! Singular-value functionals: Schatten norms, weak variants, truncations,
//! ideal powers, Cesàro averaging, and dilation (Boyd) estimates.
//!
//! A sequence here is a finite `&[f64]` of nonnegative numbers, nonincreasing
//! by convention; entries past the stored length count as exactly zero.

use std::sync::Arc;

use crate::error::{Error, Result};

/// A quasinormed ideal described by its functional Ψ on singular values.
#[derive(Clone)]
pub enum Ideal {
    /// `Ψ(s) = (Σ_j s_j^p)^{1/p}`.
    Schatten { p: f64 },
    /// `Ψ(s) = (Σ_{j≤l} s_j^p)^{1/p}` — only the leading `l+1` terms count.
    SchattenTruncated { p: f64, l: usize },
    /// `Ψ(s) = sup_j (1+j)^{1/p} s_j`.
    Weak { p: f64 },
    /// `Ψ(s) = sup_n (Σ_{j≤n} s_j) / log(2+n)`; finite on `s_j = 1/(1+j)`.
    LogAveraged,
    /// User-supplied functional.
    Custom {
        name: String,
        psi: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name())
    }
}

impl Ideal {
    pub fn name(&self) -> String {
        match self {
            Ideal::Schatten { p } => format!("S_{p}"),
            Ideal::SchattenTruncated { p, l } => format!("S_{p}^{l}"),
            Ideal::Weak { p } => format!("S_{p},inf"),
            Ideal::LogAveraged => "S_log".into(),
            Ideal::Custom { name, .. } => name.clone(),
        }
    }

    /// Applies the functional to a finite singular-value list.
    pub fn psi(&self, s: &[f64]) -> f64 {
        match self {
            Ideal::Schatten { p } => sum_powers(s, *p, None).powf(1.0 / p),
            Ideal::SchattenTruncated { p, l } => sum_powers(s, *p, Some(*l)).powf(1.0 / p),
            Ideal::Weak { p } => s
                .iter()
                .enumerate()
                .map(|(j, &v)| ((1 + j) as f64).powf(1.0 / p) * v)
                .fold(0.0, f64::max),
            Ideal::LogAveraged => {
                let mut partial = 0.0;
                let mut best: f64 = 0.0;
                for (n, &v) in s.iter().enumerate() {
                    partial += v;
                    best = best.max(partial / ((2 + n) as f64).ln());
                }
                best
            }
            Ideal::Custom { psi, .. } => psi(s),
        }
    }
}

fn sum_powers(s: &[f64], p: f64, trunc: Option<usize>) -> f64 {
    let upto = trunc.map(|l| (l + 1).min(s.len())).unwrap_or(s.len());
    s[..upto].iter().map(|&v| v.powf(p)).sum()
}

fn require_positive(p: f64, what: &str) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be positive, got {p}"
        )));
    }
    Ok(())
}

/// `(Σ_j s_j^p)^{1/p}`, optionally truncated to indices `j ≤ l`.
pub fn schatten_norm(s: &[f64], p: f64, trunc: Option<usize>) -> Result<f64> {
    require_positive(p, "Schatten exponent p")?;
    Ok(sum_powers(s, p, trunc).powf(1.0 / p))
}

/// `sup_j (1+j)^{1/p} s_j`.
pub fn weak_norm(s: &[f64], p: f64) -> Result<f64> {
    require_positive(p, "weak exponent p")?;
    Ok(Ideal::Weak { p }.psi(s))
}

/// Cesàro means `σ_n = (s_0 + … + s_n)/(n+1)`, same length as the input.
pub fn sigma_seq(s: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut partial = 0.0;
    for (n, &v) in s.iter().enumerate() {
        partial += v;
        out.push(partial / ((n + 1) as f64));
    }
    out
}

/// Each entry repeated `d` times: the singular values of a `d`-fold dilation.
pub fn dilate(s: &[f64], d: usize) -> Vec<f64> {
    assert!(d >= 1, "dilation factor must be at least 1");
    let mut out = Vec::with_capacity(s.len() * d);
    for &v in s {
        out.extend(std::iter::repeat(v).take(d));
    }
    out
}

/// Norm of the `p`-th power ideal: `Ψ(s^p)^{1/p}`.
pub fn ideal_power_norm(s: &[f64], ideal: &Ideal, p: f64) -> Result<f64> {
    require_positive(p, "power p")?;
    let powered: Vec<f64> = s.iter().map(|&v| v.powf(p)).collect();
    Ok(ideal.psi(&powered).powf(1.0 / p))
}

/// Probe-based estimate of the dilation quasinorm `β_{I,d}`:
/// the maximum of `Ψ([s]_d)/Ψ(s)` over the probe corpus.
pub fn boyd_beta_d(ideal: &Ideal, d: usize, probes: &[Vec<f64>]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("empty probe corpus".into()));
    }
    let mut best: f64 = 0.0;
    for (idx, s) in probes.iter().enumerate() {
        let denom = ideal.psi(s);
        if denom <= 0.0 {
            if s.iter().any(|&v| v != 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "probe {idx} is nonzero but has Ψ = 0 under {}",
                    ideal.name()
                )));
            }
            continue;
        }
        best = best.max(ideal.psi(&dilate(s, d)) / denom);
    }
    Ok(best)
}

/// `Ψ(σ(s)) ≤ c · Ψ(s)`?
pub fn averaging_bound_check(ideal: &Ideal, s: &[f64], c: f64) -> bool {
    ideal.psi(&sigma_seq(s)) <= c * ideal.psi(s)
}

/// The averaging constant `3 (1 − 2^{1/p−1})^{−1}` valid for `p > 1`.
pub fn schatten_averaging_constant(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "averaging constant requires p > 1, got {p}"
        )));
    }
    Ok(3.0 / (1.0 - 2.0_f64.powf(1.0 / p - 1.0)))
}

/// Power-decay probes `(1+j)^{−γ}` for `γ ∈ {0.1, …, 2.0}` (length `len`)
/// together with flat indicator blocks of dyadic lengths up to `len`.
pub fn default_probes(len: usize) -> Vec<Vec<f64>> {
    let mut probes = Vec::new();
    for tenths in 1..=20 {
        let gamma = tenths as f64 / 10.0;
        probes.push((0..len).map(|j| ((1 + j) as f64).powf(-gamma)).collect());
    }
    let mut k = 1;
    while k <= len {
        probes.push(vec![1.0; k]);
        k *= 2;
    }
    probes
}

/// Augments a corpus with the `d`-fold dilation of every probe, so estimates
/// over the result are monotone under splitting a dilation in two stages.
pub fn close_under_dilation(probes: &[Vec<f64>], factors: &[usize]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = probes.to_vec();
    for &d in factors {
        for s in probes {
            out.push(dilate(s, d));
        }
    }
    out
}
