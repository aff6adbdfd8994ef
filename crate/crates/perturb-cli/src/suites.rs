//! The experiment suites behind the `perturb` binary.
//!
//! Each suite draws its operators per trial from `seed ⊕ trial`, computes the
//! two sides of one inequality (or identity), and emits comparison rows.  A
//! suite *passes* when its internal invariants hold — exact identities match,
//! provable bounds are not exceeded, every number is finite.  The two
//! expected-failure suites invert the reading: they pass when the documented
//! unboundedness actually shows up.

use std::sync::Arc;

use perturb_core::besov::TrigPoly;
use perturb_core::eigen::{eig_hermitian, eig_unitary, svd, EigenSystem};
use perturb_core::error::Result;
use perturb_core::funcalc::{
    apply_fn, contraction_poly_diff, higher_diff_sa, higher_diff_unitary_m2, Route, SmoothFn,
};
use perturb_core::hankel::{envelope_slope, hankel_section, lacunary_g, lacunary_window, sv_envelope_check, Side};
use perturb_core::matrix::{ComplexMatrix, HermitianMatrix};
use perturb_core::parallel::map_trials;
use perturb_core::random::{rand_hermitian, rand_operator, rand_unitary, OperatorKind};
use perturb_core::schatten::{
    close_under_dilation, default_probes, schatten_averaging_constant, schatten_norm, sigma_seq,
    weak_norm,
};
use perturb_core::specshift::{
    default_grid, koplienko_eta_sample, ssf2_sample, verify_trace_formula_sa, DEFAULT_GRID_POINTS,
};
use perturb_core::util::mix_seed;

use crate::config::{Config, Suite};
use crate::families::draw_symbol;
use crate::report::BenchRow;

/// What a suite produced, before serialization.
#[derive(Debug)]
pub struct SuiteOutcome {
    pub rows: Vec<BenchRow>,
    /// All internal invariants held.
    pub passed: bool,
    /// `Some(confirmed)` for suites that demonstrate a failure of
    /// boundedness; `None` for ordinary sweeps.
    pub expected_failure: Option<bool>,
    pub notes: Vec<String>,
}

pub fn run_suite(cfg: &Config) -> Result<SuiteOutcome> {
    match cfg.suite {
        Suite::FirstDiff | Suite::UnitaryDiff => run_first_diff(cfg),
        Suite::HigherDiff => run_higher_diff(cfg),
        Suite::Contraction => run_contraction(cfg),
        Suite::Quasicommutator => run_quasicommutator(cfg),
        Suite::Counterexample => run_counterexample(cfg),
        Suite::Ssf => run_ssf(cfg),
        Suite::Boyd => run_boyd(cfg),
        Suite::OmegaScaling => run_omega_scaling(cfg),
    }
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

fn ratio_of(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

fn emit(cfg: &Config, trial: u64, j: i64, lhs: f64, rhs: f64) -> BenchRow {
    emit_p(cfg, trial, j, lhs, rhs, cfg.p)
}

/// Like [`emit`] but with an explicit exponent column, for rows measured in
/// an ideal other than the configured `S_p`.
fn emit_p(cfg: &Config, trial: u64, j: i64, lhs: f64, rhs: f64, p: f64) -> BenchRow {
    BenchRow {
        trial,
        j,
        lhs,
        rhs,
        ratio: ratio_of(lhs, rhs),
        alpha: cfg.alpha,
        p,
        m: cfg.m,
        dim: cfg.dim,
        seed: cfg.seed,
    }
}

fn rows_finite(rows: &[BenchRow]) -> bool {
    rows.iter()
        .all(|r| r.lhs.is_finite() && r.rhs.is_finite() && r.ratio.is_finite())
}

/// Collects per-trial row batches, preserving trial order.
fn gather(results: Vec<Result<Vec<BenchRow>>>) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

fn trial_symbol(cfg: &Config, trial_seed: u64, analytic: bool) -> Result<TrigPoly> {
    draw_symbol(
        cfg.family,
        cfg.alpha,
        cfg.symbol_degree(),
        mix_seed(trial_seed, 3),
        analytic,
    )
}

/// A same-kind operator pair with its eigensystems and plain matrices.
struct Pair {
    ea: EigenSystem,
    eb: EigenSystem,
    a: ComplexMatrix,
    b: ComplexMatrix,
}

fn draw_pair(cfg: &Config, trial_seed: u64) -> Result<Pair> {
    if cfg.unitary {
        let u = rand_unitary(cfg.dim, mix_seed(trial_seed, 1))?;
        let v = rand_unitary(cfg.dim, mix_seed(trial_seed, 2))?;
        Ok(Pair {
            ea: eig_unitary(&u)?,
            eb: eig_unitary(&v)?,
            a: u.matrix().clone(),
            b: v.matrix().clone(),
        })
    } else {
        let a = rand_hermitian(cfg.dim, mix_seed(trial_seed, 1), 1.0)?;
        let b = rand_hermitian(cfg.dim, mix_seed(trial_seed, 2), 1.0)?;
        Ok(Pair {
            ea: eig_hermitian(&a)?,
            eb: eig_hermitian(&b)?,
            a: a.matrix().clone(),
            b: b.matrix().clone(),
        })
    }
}

fn wrap_symbol(cfg: &Config, poly: TrigPoly) -> SmoothFn {
    if cfg.unitary {
        SmoothFn::Circle(poly)
    } else {
        SmoothFn::Line(poly)
    }
}

// ---------------------------------------------------------------------------
// first_diff / unitary_diff
// ---------------------------------------------------------------------------

/// Rows for `D = f(A) − f(B)` against the gap `A − B`: one row per singular
/// value (`rhs = (1+j)^{−α/p} ‖gap‖_{S_p^j}^α`, truncation inclusive of `j`)
/// plus the whole-norm row at `j = −1` (`‖D‖_{S_{p/α}}` vs `‖gap‖_{S_p}^α`).
fn diff_rows(
    cfg: &Config,
    trial: u64,
    fa: &ComplexMatrix,
    fb: &ComplexMatrix,
    gap: &ComplexMatrix,
) -> Result<Vec<BenchRow>> {
    let sv = svd(&fa.sub(fb))?;
    let gsv = svd(gap)?;
    let mut rows = Vec::with_capacity(cfg.dim + 1);
    for j in 0..cfg.dim {
        let lhs = sv.s(j);
        let rhs = (1.0 + j as f64).powf(-cfg.alpha / cfg.p)
            * schatten_norm(gsv.values(), cfg.p, Some(j))?.powf(cfg.alpha);
        rows.push(emit(cfg, trial, j as i64, lhs, rhs));
    }
    let lhs = schatten_norm(sv.values(), cfg.p / cfg.alpha, None)?;
    let rhs = schatten_norm(gsv.values(), cfg.p, None)?.powf(cfg.alpha);
    rows.push(emit(cfg, trial, -1, lhs, rhs));
    Ok(rows)
}

fn run_first_diff(cfg: &Config) -> Result<SuiteOutcome> {
    let results = map_trials(cfg.trials, |t| {
        let ts = cfg.seed ^ t;
        let f = wrap_symbol(cfg, trial_symbol(cfg, ts, false)?);
        let pair = draw_pair(cfg, ts)?;
        let fa = apply_fn(&pair.ea, &f)?;
        let fb = apply_fn(&pair.eb, &f)?;
        diff_rows(cfg, t, &fa, &fb, &pair.a.sub(&pair.b))
    });
    let rows = gather(results)?;
    let passed = rows_finite(&rows);
    Ok(SuiteOutcome {
        passed,
        notes: if passed {
            vec![]
        } else {
            vec!["non-finite comparison row".into()]
        },
        expected_failure: None,
        rows,
    })
}

// ---------------------------------------------------------------------------
// higher_diff
// ---------------------------------------------------------------------------

/// Norm rows for an order-`m` difference `D` against a perturbation spectrum:
/// `j = −1` is `‖D‖_{S_{p/α}}` vs `‖K‖_{S_p}^α`, and `j = −2` is the weak
/// pairing `sup (1+j)^{α/m} s_j(D)` vs `‖K‖_{S_m}^α`.
fn order_rows(cfg: &Config, trial: u64, d: &ComplexMatrix, pert_sv: &[f64]) -> Result<Vec<BenchRow>> {
    let sv = svd(d)?;
    let alpha = cfg.alpha;
    let m = cfg.m as f64;
    let strong = emit(
        cfg,
        trial,
        -1,
        schatten_norm(sv.values(), cfg.p / alpha, None)?,
        schatten_norm(pert_sv, cfg.p, None)?.powf(alpha),
    );
    let weak = emit_p(
        cfg,
        trial,
        -2,
        weak_norm(sv.values(), m / alpha)?,
        schatten_norm(pert_sv, m, None)?.powf(alpha),
        m / alpha,
    );
    Ok(vec![strong, weak])
}

fn run_higher_diff(cfg: &Config) -> Result<SuiteOutcome> {
    let m = cfg.m as usize;
    let results = map_trials(cfg.trials, |t| {
        let ts = cfg.seed ^ t;
        let f = wrap_symbol(cfg, trial_symbol(cfg, ts, false)?);
        if cfg.unitary {
            let gen = rand_hermitian(cfg.dim, mix_seed(ts, 1), 0.5)?;
            let u = rand_unitary(cfg.dim, mix_seed(ts, 2))?;
            let d = higher_diff_unitary_m2(&u, &gen, &f, Route::Direct)?;
            let gsv = svd(gen.matrix())?;
            order_rows(cfg, t, &d, gsv.values())
        } else {
            let a = rand_hermitian(cfg.dim, mix_seed(ts, 1), 1.0)?;
            let k = rand_hermitian(cfg.dim, mix_seed(ts, 2), 0.5)?;
            let d = higher_diff_sa(&a, &k, m, &f, Route::Direct)?;
            let ksv = svd(k.matrix())?;
            order_rows(cfg, t, &d, ksv.values())
        }
    });
    let rows = gather(results)?;
    let passed = rows_finite(&rows);
    Ok(SuiteOutcome {
        passed,
        notes: if passed {
            vec![]
        } else {
            vec!["non-finite comparison row".into()]
        },
        expected_failure: None,
        rows,
    })
}

// ---------------------------------------------------------------------------
// contraction
// ---------------------------------------------------------------------------

fn run_contraction(cfg: &Config) -> Result<SuiteOutcome> {
    let m = cfg.m as usize;
    let results = map_trials(cfg.trials, |t| {
        let ts = cfg.seed ^ t;
        let f = trial_symbol(cfg, ts, true)?;
        let t_mat = rand_operator(OperatorKind::Contraction, cfg.dim, mix_seed(ts, 1), 1.0)?;
        let r_mat = rand_operator(OperatorKind::Contraction, cfg.dim, mix_seed(ts, 2), 1.0)?;
        let d = contraction_poly_diff(&t_mat, &r_mat, &f, m)?;
        let sv = svd(&d)?;
        let gsv = svd(&t_mat.sub(&r_mat))?;
        let lhs = schatten_norm(sv.values(), cfg.p / cfg.alpha, None)?;
        let rhs = schatten_norm(gsv.values(), cfg.p, None)?.powf(cfg.alpha);
        Ok(vec![emit(cfg, t, -1, lhs, rhs)])
    });
    let rows = gather(results)?;
    let passed = rows_finite(&rows);
    Ok(SuiteOutcome {
        passed,
        notes: if passed {
            vec![]
        } else {
            vec!["non-finite comparison row".into()]
        },
        expected_failure: None,
        rows,
    })
}

// ---------------------------------------------------------------------------
// quasicommutator
// ---------------------------------------------------------------------------

/// Rows for `L = f(A)Q − Q f(B)` against `S = AQ − QB`, weighted by
/// `‖Q‖^{1−α}`: per-`j` rows and the whole-norm row at `j = −1`.
fn quasi_rows(
    cfg: &Config,
    trial: u64,
    fa: &ComplexMatrix,
    fb: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    q: &ComplexMatrix,
) -> Result<Vec<BenchRow>> {
    let lhs_m = fa.matmul(q).sub(&q.matmul(fb));
    let sym = a.matmul(q).sub(&q.matmul(b));
    let sv = svd(&lhs_m)?;
    let ssv = svd(&sym)?;
    let q_op = svd(q)?.s(0).powf(1.0 - cfg.alpha);
    let mut rows = Vec::with_capacity(cfg.dim + 1);
    for j in 0..cfg.dim {
        let lhs = sv.s(j);
        let rhs = (1.0 + j as f64).powf(-cfg.alpha / cfg.p)
            * q_op
            * schatten_norm(ssv.values(), cfg.p, Some(j))?.powf(cfg.alpha);
        rows.push(emit(cfg, trial, j as i64, lhs, rhs));
    }
    let lhs = schatten_norm(sv.values(), cfg.p / cfg.alpha, None)?;
    let rhs = q_op * schatten_norm(ssv.values(), cfg.p, None)?.powf(cfg.alpha);
    rows.push(emit(cfg, trial, -1, lhs, rhs));
    Ok(rows)
}

fn rows_bitwise_equal(xs: &[BenchRow], ys: &[BenchRow]) -> bool {
    xs.len() == ys.len()
        && xs.iter().zip(ys).all(|(x, y)| {
            x.trial == y.trial
                && x.j == y.j
                && x.lhs.to_bits() == y.lhs.to_bits()
                && x.rhs.to_bits() == y.rhs.to_bits()
                && x.ratio.to_bits() == y.ratio.to_bits()
        })
}

fn run_quasicommutator(cfg: &Config) -> Result<SuiteOutcome> {
    let results = map_trials(cfg.trials, |t| {
        let ts = cfg.seed ^ t;
        let f = wrap_symbol(cfg, trial_symbol(cfg, ts, false)?);
        let pair = draw_pair(cfg, ts)?;
        let q = rand_operator(OperatorKind::General, cfg.dim, mix_seed(ts, 4), 1.0)?;
        let fa = apply_fn(&pair.ea, &f)?;
        let fb = apply_fn(&pair.eb, &f)?;
        let rows = quasi_rows(cfg, t, &fa, &fb, &pair.a, &pair.b, &q)?;
        // With Q = I the quasicommutator degenerates to the plain difference;
        // the rows must agree bit for bit, not merely to rounding.
        let id = ComplexMatrix::identity(cfg.dim);
        let qi = quasi_rows(cfg, t, &fa, &fb, &pair.a, &pair.b, &id)?;
        let fd = diff_rows(cfg, t, &fa, &fb, &pair.a.sub(&pair.b))?;
        Ok((rows, rows_bitwise_equal(&qi, &fd)))
    });
    let mut rows = Vec::new();
    let mut identity_ok = true;
    for r in results {
        let (batch, ok) = r?;
        rows.extend(batch);
        identity_ok &= ok;
    }
    let finite = rows_finite(&rows);
    let mut notes = Vec::new();
    if !identity_ok {
        notes.push("identity-factor rows diverged from the plain difference".into());
    }
    if !finite {
        notes.push("non-finite comparison row".into());
    }
    Ok(SuiteOutcome {
        passed: identity_ok && finite,
        expected_failure: None,
        notes,
        rows,
    })
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

fn run_counterexample(cfg: &Config) -> Result<SuiteOutcome> {
    let n = cfg.dim;
    let mut levels = 0u32;
    while 4usize.pow(levels + 1) <= n {
        levels += 1;
    }
    let g = lacunary_g(cfg.alpha, levels)?;
    let report = sv_envelope_check(&g, cfg.alpha, n)?;

    let fit_len = (3 * 4usize.pow(levels - 1)).min(512);
    let mut rows = Vec::with_capacity(fit_len);
    for m_idx in 0..fit_len {
        let lhs = report.analytic_sv[m_idx];
        let rhs = (1.0 + m_idx as f64).powf(-cfg.alpha);
        rows.push(emit(cfg, 0, m_idx as i64, lhs, rhs));
    }

    // The lacunary windows must sit inside the section as exact scaled
    // isometries; their Gram matrices certify the lower staircase.
    let section = hankel_section(&g, n, Side::Analytic);
    let mut window_err = 0.0f64;
    for level in 1..=levels {
        let w = lacunary_window(&section, level)?;
        let gram = w.adjoint().matmul(&w).scale_re(4.0f64.powf(2.0 * cfg.alpha * level as f64));
        let dev = gram.sub(&ComplexMatrix::identity(w.dim())).frobenius_norm();
        window_err = window_err.max(dev);
    }

    let slope = envelope_slope(&report.analytic_sv, fit_len, 0.0);
    let flags_ok = report.lower_flags.iter().all(|&b| b);
    let slope_ok = slope.map_or(false, |s| (s + cfg.alpha).abs() <= 0.05);
    let upper_ok = report.upper_constant.is_finite();
    let windows_ok = window_err <= 1e-10;
    let confirmed = flags_ok && slope_ok && upper_ok && windows_ok;

    let notes = vec![
        format!("levels = {levels}, section = {n}"),
        format!("upper envelope constant = {:.6}", report.upper_constant),
        format!("log-log envelope slope = {:?} (target {:.3})", slope, -cfg.alpha),
        format!("window isometry deviation = {window_err:.3e}"),
        format!("lower staircase flags = {:?}", report.lower_flags),
    ];
    Ok(SuiteOutcome {
        rows,
        passed: confirmed,
        expected_failure: Some(confirmed),
        notes,
    })
}

// ---------------------------------------------------------------------------
// ssf
// ---------------------------------------------------------------------------

fn quadratic_symbol() -> SmoothFn {
    SmoothFn::callable_with_derivs(
        |x| 0.5 * x * x,
        vec![
            Arc::new(|x| x) as Arc<dyn Fn(f64) -> f64 + Send + Sync>,
            Arc::new(|_| 1.0),
        ],
    )
}

fn run_ssf(cfg: &Config) -> Result<SuiteOutcome> {
    // Five fixed smooth test symbols, shared by all trials.  Their degree is
    // kept low on purpose: the quadrature error carries six derivatives of
    // the test function, and these rows check an identity, not a smoothness
    // class, so gratuitous high-frequency content would only add noise.
    let mut test_fns = Vec::with_capacity(5);
    for i in 0..5u64 {
        let poly = draw_symbol(cfg.family, 1.0, 8, mix_seed(cfg.seed, 100 + i), false)?;
        test_fns.push(SmoothFn::Line(poly));
    }
    let test_fns = Arc::new(test_fns);

    let results = map_trials(cfg.trials, |t| {
        let ts = cfg.seed ^ t;
        let a = rand_hermitian(cfg.dim, mix_seed(ts, 1), 1.0)?;
        let k = rand_hermitian(cfg.dim, mix_seed(ts, 2), 0.5)?;

        let grid = default_grid(&a, &k, DEFAULT_GRID_POINTS)?;
        let density = ssf2_sample(&a, &k, &grid)?;
        let positive = density.values.iter().all(|&v| v >= -1e-9);
        let eta_plus = koplienko_eta_sample(&a, &k, &grid)?;
        let neg = HermitianMatrix::symmetrize(&k.matrix().scale_re(-1.0));
        let eta_minus = koplienko_eta_sample(&a, &neg, &grid)?;
        let decomposed = (0..grid.len()).all(|i| {
            (density.values[i] - eta_plus.values[i] - eta_minus.values[i]).abs() <= 1e-9
        });

        let mut rows = Vec::with_capacity(6);
        let mut residuals_ok = true;
        for (i, f) in test_fns.iter().enumerate() {
            let rep = verify_trace_formula_sa(&a, &k, f, 4096)?;
            residuals_ok &= rep.relative <= 1e-6;
            rows.push(emit(cfg, t, i as i64, rep.lhs, rep.rhs));
        }
        // Mass row: with f = x²/2 the integral of the density equals tr K².
        let mass = verify_trace_formula_sa(&a, &k, &quadratic_symbol(), 4096)?;
        let k2 = k.matrix().matmul(k.matrix()).trace().re;
        rows.push(emit(cfg, t, -1, mass.rhs, k2));
        let mass_ok = (mass.rhs - k2).abs() <= 1e-8 * k2.abs().max(1.0);

        Ok((rows, positive && decomposed && residuals_ok && mass_ok))
    });
    let mut rows = Vec::new();
    let mut passed = true;
    for r in results {
        let (batch, ok) = r?;
        rows.extend(batch);
        passed &= ok;
    }
    passed &= rows_finite(&rows);
    Ok(SuiteOutcome {
        passed,
        expected_failure: None,
        notes: if passed {
            vec![]
        } else {
            vec!["a shift-density invariant failed; see ratio columns".into()]
        },
        rows,
    })
}

// ---------------------------------------------------------------------------
// boyd
// ---------------------------------------------------------------------------

fn run_boyd(cfg: &Config) -> Result<SuiteOutcome> {
    if cfg.p == 1.0 {
        // At p = 1 no averaging constant exists: the harmonic sums of the
        // averaged rank-one sequence grow like ln n.
        let mut rows = Vec::new();
        let mut grows = true;
        for (idx, &n) in [10usize, 100, 1_000, 10_000, 100_000].iter().enumerate() {
            let mut s = vec![0.0; n];
            s[0] = 1.0;
            let lhs = schatten_norm(&sigma_seq(&s), 1.0, None)?;
            let rhs = 0.9 * (n as f64).ln();
            grows &= lhs >= rhs;
            rows.push(emit(cfg, 0, idx as i64, lhs, rhs));
        }
        return Ok(SuiteOutcome {
            rows,
            passed: grows,
            expected_failure: Some(grows),
            notes: vec!["averaged rank-one mass vs 0.9·ln n".into()],
        });
    }

    let c = schatten_averaging_constant(cfg.p)?;
    let corpus = close_under_dilation(&default_probes(64), &[2, 3]);
    let mut rows = Vec::with_capacity(corpus.len());
    let mut bounded = true;
    for (idx, probe) in corpus.iter().enumerate() {
        let lhs = schatten_norm(&sigma_seq(probe), cfg.p, None)?;
        let rhs = c * schatten_norm(probe, cfg.p, None)?;
        bounded &= lhs <= rhs * (1.0 + 1e-12);
        rows.push(emit(cfg, 0, idx as i64, lhs, rhs));
    }
    Ok(SuiteOutcome {
        rows,
        passed: bounded,
        expected_failure: None,
        notes: vec![format!("averaging constant = {c:.6}, probes = {}", corpus.len())],
    })
}

// ---------------------------------------------------------------------------
// omega_scaling
// ---------------------------------------------------------------------------

fn run_omega_scaling(cfg: &Config) -> Result<SuiteOutcome> {
    let q = cfg.p / cfg.alpha;
    let results = map_trials(cfg.trials, |t| {
        let ts = cfg.seed ^ t;
        let poly = trial_symbol(cfg, ts, false)?;
        let f = SmoothFn::Circle(poly);
        let u = rand_unitary(cfg.dim, mix_seed(ts, 1))?;
        let v = rand_unitary(cfg.dim, mix_seed(ts, 2))?;
        let base_gap = u.matrix().sub(v.matrix());
        let base_diff = apply_fn(&eig_unitary(&u)?, &f)?.sub(&apply_fn(&eig_unitary(&v)?, &f)?);
        let gap_norm = schatten_norm(svd(&base_gap)?.values(), cfg.p, None)?;
        let diff_norm = schatten_norm(svd(&base_diff)?.values(), q, None)?;
        let mut rows = Vec::with_capacity(6);
        let mut exact = true;
        for &n in &[2usize, 4, 8] {
            let folded_gap = schatten_norm(svd(&base_gap.direct_sum_copies(n))?.values(), cfg.p, None)?;
            let rhs_gap = (n as f64).powf(1.0 / cfg.p) * gap_norm;
            rows.push(emit_p(cfg, t, n as i64, folded_gap, rhs_gap, cfg.p));
            exact &= (folded_gap / rhs_gap - 1.0).abs() <= 1e-10;

            let folded_diff = schatten_norm(svd(&base_diff.direct_sum_copies(n))?.values(), q, None)?;
            let rhs_diff = (n as f64).powf(1.0 / q) * diff_norm;
            rows.push(emit_p(cfg, t, n as i64, folded_diff, rhs_diff, q));
            exact &= (folded_diff / rhs_diff - 1.0).abs() <= 1e-10;
        }
        Ok((rows, exact))
    });
    let mut rows = Vec::new();
    let mut passed = true;
    for r in results {
        let (batch, ok) = r?;
        rows.extend(batch);
        passed &= ok;
    }
    passed &= rows_finite(&rows);
    Ok(SuiteOutcome {
        passed,
        expected_failure: None,
        notes: if passed {
            vec![]
        } else {
            vec!["direct-sum scaling identity missed 1e-10".into()]
        },
        rows,
    })
}
