//! Functional calculus, divided differences, and the operator-integral
//! representations of first and higher-order operator differences.
//!
//! A scalar symbol is either a circle function (a trig polynomial evaluated
//! at eigenphases) or a line function (a periodic band-limited symbol or a
//! plain callable with explicit derivatives, evaluated at eigenvalues).
//! Divided differences handle confluent nodes through derivative (Hermite)
//! entries once nodes fall within a snapping threshold; separated nodes go
//! through the ordinary Newton recursion.
//!
//! The transformer built from a first-order divided-difference kernel acts as
//! a Schur multiplier in the two eigenbases; the triple and quadruple
//! versions contract one and two inner indices.  These reproduce operator
//! differences exactly in finite dimensions, which the tests and the
//! acceptance harness check against direct functional calculus.

use std::sync::Arc;

use num_complex::Complex64;

use crate::besov::TrigPoly;
use crate::eigen::{eig_hermitian, eig_unitary, expi, EigenSystem, SpectrumKind};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::util::binomial;

/// Confluence threshold scale: nodes closer than
/// `CONFLUENT_REL_TOL · (diameter + 1)` are treated as a single point.
pub const CONFLUENT_REL_TOL: f64 = 1e-6;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar symbol with enough smoothness data for divided differences.
#[derive(Clone)]
pub enum SmoothFn {
    /// `ζ ↦ Σ ĥ(n) ζⁿ` on the unit circle.
    Circle(TrigPoly),
    /// `x ↦ Σ ĥ(n) e^{inx}` on the real line (periodic band-limited).
    Line(TrigPoly),
    /// A real callable with explicit derivatives `derivs[r] = f^{(r+1)}`.
    Callable { f: RealFn, derivs: Vec<RealFn> },
}

impl std::fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmoothFn::Circle(p) => write!(f, "Circle(degree {})", p.degree()),
            SmoothFn::Line(p) => write!(f, "Line(degree {})", p.degree()),
            SmoothFn::Callable { derivs, .. } => {
                write!(f, "Callable({} derivatives)", derivs.len())
            }
        }
    }
}

impl SmoothFn {
    pub fn callable(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SmoothFn::Callable {
            f: Arc::new(f),
            derivs: Vec::new(),
        }
    }

    pub fn callable_with_derivs(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivs: Vec<RealFn>,
    ) -> Self {
        SmoothFn::Callable {
            f: Arc::new(f),
            derivs,
        }
    }

    /// Which spectrum the symbol acts on.
    pub fn spectrum_kind(&self) -> SpectrumKind {
        match self {
            SmoothFn::Circle(_) => SpectrumKind::Phase,
            SmoothFn::Line(_) | SmoothFn::Callable { .. } => SpectrumKind::Real,
        }
    }

    /// Value at a spectral node: a unimodular `ζ` for circle symbols, a real
    /// point (stored in the real part) for line symbols.
    pub fn value(&self, node: Complex64) -> Complex64 {
        match self {
            SmoothFn::Circle(p) => p.eval(node),
            SmoothFn::Line(p) => p.eval(Complex64::cis(node.re)),
            SmoothFn::Callable { f, .. } => Complex64::new(f(node.re), 0.0),
        }
    }

    /// `r`-th derivative at a node, in the variable matching the domain
    /// (`d/dζ` on the circle, `d/dx` on the line).
    pub fn deriv(&self, node: Complex64, r: u32) -> Result<Complex64> {
        if r == 0 {
            return Ok(self.value(node));
        }
        match self {
            SmoothFn::Circle(p) => Ok(p.eval_deriv_z(node, r)),
            SmoothFn::Line(p) => {
                let mut q = p.clone();
                for _ in 0..r {
                    q = q.derivative_theta();
                }
                Ok(q.eval(Complex64::cis(node.re)))
            }
            SmoothFn::Callable { derivs, .. } => {
                derivs.get(r as usize - 1).map(|d| Complex64::new(d(node.re), 0.0)).ok_or_else(
                    || {
                        Error::Capability(format!(
                            "derivative of order {r} requested but only {} supplied",
                            derivs.len()
                        ))
                    },
                )
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Divided differences
// ---------------------------------------------------------------------------

fn node_diameter(nodes: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            d = d.max((nodes[i] - nodes[j]).norm());
        }
    }
    d
}

fn confluence_threshold(diameter: f64) -> f64 {
    CONFLUENT_REL_TOL * (diameter + 1.0)
}

/// Sorts nodes canonically: by real part on the line, by phase on the circle
/// starting after the widest angular gap (so wrap-around clusters stay
/// contiguous).
fn sort_nodes(nodes: &mut Vec<Complex64>, kind: SpectrumKind) {
    match kind {
        SpectrumKind::Real => {
            nodes.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        }
        SpectrumKind::Phase => {
            nodes.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
            let n = nodes.len();
            if n > 1 {
                let mut widest = 0;
                let mut widest_gap = -1.0;
                for i in 0..n {
                    let a = nodes[i].arg();
                    let b = if i + 1 == n {
                        nodes[0].arg() + 2.0 * std::f64::consts::PI
                    } else {
                        nodes[i + 1].arg()
                    };
                    if b - a > widest_gap {
                        widest_gap = b - a;
                        widest = i;
                    }
                }
                nodes.rotate_left((widest + 1) % n);
            }
        }
    }
}

/// Chain clustering of canonically-sorted nodes: consecutive nodes closer
/// than `tau` share a cluster.  Returns each node snapped to its cluster
/// representative (clusters become bitwise-equal nodes).
fn snap_clusters(sorted: &[Complex64], tau: f64, kind: SpectrumKind) -> Vec<Complex64> {
    let n = sorted.len();
    let mut out = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (sorted[end] - sorted[end - 1]).norm() < tau {
            end += 1;
        }
        if end - start == 1 {
            out.push(sorted[start]);
        } else {
            let mut mean: Complex64 =
                sorted[start..end].iter().sum::<Complex64>() / (end - start) as f64;
            if kind == SpectrumKind::Phase {
                mean /= mean.norm();
            }
            for _ in start..end {
                out.push(mean);
            }
        }
        start = end;
    }
    out
}

/// Newton divided-difference table over nodes with confluent (repeated)
/// entries resolved by derivatives: a block of `r+1` equal nodes contributes
/// `f^{(r)}(x)/r!`.
fn hermite_table(f: &SmoothFn, snapped: &[Complex64]) -> Result<Complex64> {
    let k = snapped.len() - 1;
    let mut table: Vec<Complex64> = snapped.iter().map(|&z| f.value(z)).collect();
    let mut factorial = 1.0;
    for level in 1..=k {
        factorial *= level as f64;
        for i in 0..=(k - level) {
            let lo = snapped[i];
            let hi = snapped[i + level];
            if lo == hi {
                table[i] = f.deriv(lo, level as u32)? / factorial;
            } else {
                table[i] = (table[i + 1] - table[i]) / (hi - lo);
            }
        }
    }
    Ok(table[0])
}

/// Divided difference of order `nodes.len() − 1` with confluent handling.
/// Symmetric in the nodes; the confluence threshold is derived from the
/// diameter of the node set itself.
pub fn divided_diff(f: &SmoothFn, nodes: &[Complex64]) -> Result<Complex64> {
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("divided difference needs nodes".into()));
    }
    let tau = confluence_threshold(node_diameter(nodes));
    divided_diff_with_threshold(f, nodes, tau)
}

fn divided_diff_with_threshold(
    f: &SmoothFn,
    nodes: &[Complex64],
    tau: f64,
) -> Result<Complex64> {
    let mut sorted = nodes.to_vec();
    sort_nodes(&mut sorted, f.spectrum_kind());
    let snapped = snap_clusters(&sorted, tau, f.spectrum_kind());
    hermite_table(f, &snapped)
}

/// Divided differences of a fixed order tabulated on a product of spectral
/// grids.  `grids.len() = order + 1`; entry `(i₁, …)` is the divided
/// difference at `(grids[0][i₁], …)`.
#[derive(Debug, Clone)]
pub struct DividedDiffTable {
    order: usize,
    dims: Vec<usize>,
    grids: Vec<Vec<Complex64>>,
    values: Vec<Complex64>,
}

impl DividedDiffTable {
    pub fn build(f: &SmoothFn, grids: &[Vec<Complex64>]) -> Result<Self> {
        if grids.is_empty() {
            return Err(Error::InvalidArgument("need at least one grid".into()));
        }
        let order = grids.len() - 1;
        let dims: Vec<usize> = grids.iter().map(|g| g.len()).collect();
        let union: Vec<Complex64> = grids.iter().flatten().copied().collect();
        let tau = confluence_threshold(node_diameter(&union));

        // Per-grid value cache feeds the separated-node fast path.
        let cache: Vec<Vec<Complex64>> = grids
            .iter()
            .map(|g| g.iter().map(|&z| f.value(z)).collect())
            .collect();

        let total: usize = dims.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; order + 1];
        let mut nodes = vec![Complex64::new(0.0, 0.0); order + 1];
        let mut vals = vec![Complex64::new(0.0, 0.0); order + 1];
        for flat in 0..total {
            let mut rem = flat;
            for axis in (0..=order).rev() {
                idx[axis] = rem % dims[axis];
                rem /= dims[axis];
            }
            for axis in 0..=order {
                nodes[axis] = grids[axis][idx[axis]];
                vals[axis] = cache[axis][idx[axis]];
            }
            let mut separated = true;
            'sep: for i in 0..=order {
                for j in (i + 1)..=order {
                    if (nodes[i] - nodes[j]).norm() < tau {
                        separated = false;
                        break 'sep;
                    }
                }
            }
            let dd = if separated {
                // Plain Newton recursion; node order is irrelevant here.
                let mut t = vals.clone();
                for level in 1..=order {
                    for i in 0..=(order - level) {
                        t[i] = (t[i + 1] - t[i]) / (nodes[i + level] - nodes[i]);
                    }
                }
                t[0]
            } else {
                divided_diff_with_threshold(f, &nodes, tau)?
            };
            values.push(dd);
        }
        Ok(DividedDiffTable {
            order,
            dims,
            grids: grids.to_vec(),
            values,
        })
    }

    /// Builds the table on the spectral grids of the given eigensystems.
    pub fn from_systems(f: &SmoothFn, systems: &[&EigenSystem]) -> Result<Self> {
        for es in systems {
            if es.kind != f.spectrum_kind() {
                return Err(Error::DomainMismatch {
                    expected: match f.spectrum_kind() {
                        SpectrumKind::Real => "real eigenvalues",
                        SpectrumKind::Phase => "unimodular eigenvalues",
                    },
                    found: match es.kind {
                        SpectrumKind::Real => "real eigenvalues",
                        SpectrumKind::Phase => "unimodular eigenvalues",
                    },
                });
            }
        }
        let grids: Vec<Vec<Complex64>> = systems.iter().map(|es| es.points()).collect();
        Self::build(f, &grids)
    }

    /// Constant kernel `Φ ≡ c` on the given grids (for plumbing checks).
    pub fn constant(c: Complex64, grids: &[Vec<Complex64>]) -> Self {
        let dims: Vec<usize> = grids.iter().map(|g| g.len()).collect();
        let total = dims.iter().product();
        DividedDiffTable {
            order: grids.len() - 1,
            dims,
            grids: grids.to_vec(),
            values: vec![c; total],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn grids(&self) -> &[Vec<Complex64>] {
        &self.grids
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        assert_eq!(idx.len(), self.order + 1, "index arity");
        let mut flat = 0;
        for (axis, &i) in idx.iter().enumerate() {
            flat = flat * self.dims[axis] + i;
        }
        self.values[flat]
    }
}

// ---------------------------------------------------------------------------
// Functional calculus and operator integrals
// ---------------------------------------------------------------------------

/// `f` applied through an eigendecomposition: `V diag(f(points)) V*`.
pub fn apply_fn(es: &EigenSystem, f: &SmoothFn) -> Result<ComplexMatrix> {
    if es.kind != f.spectrum_kind() {
        return Err(Error::DomainMismatch {
            expected: match f.spectrum_kind() {
                SpectrumKind::Real => "real eigenvalues",
                SpectrumKind::Phase => "unimodular eigenvalues",
            },
            found: match es.kind {
                SpectrumKind::Real => "real eigenvalues",
                SpectrumKind::Phase => "unimodular eigenvalues",
            },
        });
    }
    let diag: Vec<Complex64> = es.points().iter().map(|&z| f.value(z)).collect();
    Ok(es.assemble(&diag))
}

fn check_square(m: &ComplexMatrix, n: usize) -> Result<()> {
    if m.dim() != n {
        return Err(Error::DimensionMismatch {
            left: m.dim(),
            right: n,
        });
    }
    Ok(())
}

/// Transformer with a two-variable kernel: in the eigenbases of the two
/// systems the kernel multiplies entrywise,
/// `V₁ (Φ ⊙ (V₁* Q V₂)) V₂*`.
pub fn doi(
    table: &DividedDiffTable,
    e1: &EigenSystem,
    e2: &EigenSystem,
    q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if table.order() != 1 {
        return Err(Error::InvalidArgument(format!(
            "two-variable kernel required, got order {}",
            table.order()
        )));
    }
    let (n1, n2) = (e1.dim(), e2.dim());
    if table.dims() != [n1, n2] {
        return Err(Error::DimensionMismatch { left: table.dims()[0], right: n1 });
    }
    check_square(q, n1)?;
    check_square(q, n2)?;
    let v1 = e1.vectors.matrix();
    let v2 = e2.vectors.matrix();
    let qp = v1.adjoint().matmul(q).matmul(v2);
    let mixed = ComplexMatrix::from_fn(n1, |i, j| table.get(&[i, j]) * qp.get(i, j));
    Ok(v1.matmul(&mixed).matmul(&v2.adjoint()))
}

/// Transformer with a three-variable kernel and two perturbation slots:
/// entry `(i,k)` of the middle matrix is `Σ_j Φ(x_i, y_j, z_k) K₁'_{ij} K₂'_{jk}`.
pub fn moi3(
    table: &DividedDiffTable,
    e1: &EigenSystem,
    e2: &EigenSystem,
    e3: &EigenSystem,
    k1: &ComplexMatrix,
    k2: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if table.order() != 2 {
        return Err(Error::InvalidArgument(format!(
            "three-variable kernel required, got order {}",
            table.order()
        )));
    }
    let (n1, n2, n3) = (e1.dim(), e2.dim(), e3.dim());
    if table.dims() != [n1, n2, n3] {
        return Err(Error::InvalidArgument("kernel grid shape mismatch".into()));
    }
    check_square(k1, n1)?;
    check_square(k2, n2)?;
    let v1 = e1.vectors.matrix();
    let v2 = e2.vectors.matrix();
    let v3 = e3.vectors.matrix();
    let k1p = v1.adjoint().matmul(k1).matmul(v2);
    let k2p = v2.adjoint().matmul(k2).matmul(v3);
    let mut mid = ComplexMatrix::zeros(n1);
    for i in 0..n1 {
        for k in 0..n3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n2 {
                acc += table.get(&[i, j, k]) * k1p.get(i, j) * k2p.get(j, k);
            }
            mid.set(i, k, acc);
        }
    }
    Ok(v1.matmul(&mid).matmul(&v3.adjoint()))
}

/// Four-variable analog with three perturbation slots.
pub fn moi4(
    table: &DividedDiffTable,
    systems: [&EigenSystem; 4],
    k1: &ComplexMatrix,
    k2: &ComplexMatrix,
    k3: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if table.order() != 3 {
        return Err(Error::InvalidArgument(format!(
            "four-variable kernel required, got order {}",
            table.order()
        )));
    }
    let n = systems[0].dim();
    for es in &systems {
        if es.dim() != n {
            return Err(Error::DimensionMismatch { left: es.dim(), right: n });
        }
    }
    if table.dims() != [n, n, n, n] {
        return Err(Error::InvalidArgument("kernel grid shape mismatch".into()));
    }
    let v: Vec<&ComplexMatrix> = systems.iter().map(|es| es.vectors.matrix()).collect();
    let k1p = v[0].adjoint().matmul(k1).matmul(v[1]);
    let k2p = v[1].adjoint().matmul(k2).matmul(v[2]);
    let k3p = v[2].adjoint().matmul(k3).matmul(v[3]);
    let mut mid = ComplexMatrix::zeros(n);
    for i in 0..n {
        for l in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let kij = k1p.get(i, j);
                if kij.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..n {
                    acc += table.get(&[i, j, k, l]) * kij * k2p.get(j, k) * k3p.get(k, l);
                }
            }
            mid.set(i, l, acc);
        }
    }
    Ok(v[0].matmul(&mid).matmul(&v[3].adjoint()))
}

/// How an operator difference should be computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Straight functional calculus on each endpoint.
    Direct,
    /// Through the operator-integral representation.
    Integral,
}

/// `Σ_{j=0}^m (−1)^{m−j} C(m,j) f(A + jK)`: the `m`-th order difference of
/// `f` along a self-adjoint perturbation, by either route (`m ≤ 3` for the
/// integral route).
pub fn higher_diff_sa(
    a: &HermitianMatrix,
    k: &HermitianMatrix,
    m: usize,
    f: &SmoothFn,
    route: Route,
) -> Result<ComplexMatrix> {
    if m == 0 || m > 3 {
        return Err(Error::InvalidArgument(format!(
            "difference order must be 1, 2, or 3, got {m}"
        )));
    }
    if f.spectrum_kind() != SpectrumKind::Real {
        return Err(Error::DomainMismatch {
            expected: "real eigenvalues",
            found: "unimodular eigenvalues",
        });
    }
    check_square(k.matrix(), a.dim())?;
    let steps: Vec<HermitianMatrix> = (0..=m)
        .map(|j| {
            HermitianMatrix::symmetrize(
                &a.matrix().add(&k.matrix().scale_re(j as f64)),
            )
        })
        .collect();
    let systems: Vec<EigenSystem> = steps
        .iter()
        .map(eig_hermitian)
        .collect::<Result<_>>()?;

    match route {
        Route::Direct => {
            let mut acc = ComplexMatrix::zeros(a.dim());
            for (j, es) in systems.iter().enumerate() {
                let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc.add(&apply_fn(es, f)?.scale_re(sign * binomial(m, j)));
            }
            Ok(acc)
        }
        Route::Integral => {
            let refs: Vec<&EigenSystem> = systems.iter().collect();
            let table = DividedDiffTable::from_systems(f, &refs)?;
            let km = k.matrix();
            let out = match m {
                1 => doi(&table, &systems[0], &systems[1], km)?,
                2 => moi3(&table, &systems[0], &systems[1], &systems[2], km, km)?,
                3 => moi4(
                    &table,
                    [&systems[0], &systems[1], &systems[2], &systems[3]],
                    km,
                    km,
                    km,
                )?,
                _ => unreachable!(),
            };
            let mfact: f64 = (1..=m).map(|v| v as f64).product();
            Ok(out.scale_re(mfact))
        }
    }
}

/// Second-order difference along the unitary path `U, e^{iA}U, e^{2iA}U`:
/// `f(U₁) − 2 f(U₂) + f(U₃)`.  The integral route evaluates
/// `2·(triple integral of the second divided difference against U₁−U₂ and
/// U₂−U₃) + (double integral of the first divided difference against
/// U₁ − 2U₂ + U₃)`.
pub fn higher_diff_unitary_m2(
    u: &UnitaryMatrix,
    a: &HermitianMatrix,
    f: &SmoothFn,
    route: Route,
) -> Result<ComplexMatrix> {
    if f.spectrum_kind() != SpectrumKind::Phase {
        return Err(Error::DomainMismatch {
            expected: "unimodular eigenvalues",
            found: "real eigenvalues",
        });
    }
    check_square(a.matrix(), u.dim())?;
    let v = expi(a)?;
    let u1 = u.matrix().clone();
    let u2 = v.matrix().matmul(&u1);
    let u3 = v.matrix().matmul(&u2);
    let us = [
        UnitaryMatrix::new(u1.clone())?,
        UnitaryMatrix::new(u2.clone())?,
        UnitaryMatrix::new(u3.clone())?,
    ];
    let systems: Vec<EigenSystem> = us.iter().map(eig_unitary).collect::<Result<_>>()?;

    match route {
        Route::Direct => {
            let f1 = apply_fn(&systems[0], f)?;
            let f2 = apply_fn(&systems[1], f)?;
            let f3 = apply_fn(&systems[2], f)?;
            Ok(f1.sub(&f2.scale_re(2.0)).add(&f3))
        }
        Route::Integral => {
            let table2 = DividedDiffTable::from_systems(
                f,
                &[&systems[0], &systems[1], &systems[2]],
            )?;
            let d12 = u1.sub(&u2);
            let d23 = u2.sub(&u3);
            let triple = moi3(&table2, &systems[0], &systems[1], &systems[2], &d12, &d23)?;
            let table1 = DividedDiffTable::from_systems(f, &[&systems[0], &systems[2]])?;
            let bend = u1.sub(&u2.scale_re(2.0)).add(&u3);
            let double = doi(&table1, &systems[0], &systems[2], &bend)?;
            Ok(triple.scale_re(2.0).add(&double))
        }
    }
}

/// `f(A)Q − Q f(B)` for Hermitian `A`, `B`: directly, or as the two-variable
/// integral of the first divided difference against `AQ − QB`.
pub fn quasicommutator_hermitian(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    q: &ComplexMatrix,
    f: &SmoothFn,
    route: Route,
) -> Result<ComplexMatrix> {
    let ea = eig_hermitian(a)?;
    let eb = eig_hermitian(b)?;
    quasicommutator_with_systems(&ea, &eb, a.matrix(), b.matrix(), q, f, route)
}

/// `f(U)Q − Q f(V)` for unitary `U`, `V`, against `UQ − QV`.
pub fn quasicommutator_unitary(
    u: &UnitaryMatrix,
    v: &UnitaryMatrix,
    q: &ComplexMatrix,
    f: &SmoothFn,
    route: Route,
) -> Result<ComplexMatrix> {
    let eu = eig_unitary(u)?;
    let ev = eig_unitary(v)?;
    quasicommutator_with_systems(&eu, &ev, u.matrix(), v.matrix(), q, f, route)
}

fn quasicommutator_with_systems(
    ea: &EigenSystem,
    eb: &EigenSystem,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    q: &ComplexMatrix,
    f: &SmoothFn,
    route: Route,
) -> Result<ComplexMatrix> {
    check_square(q, a.dim())?;
    match route {
        Route::Direct => {
            let fa = apply_fn(ea, f)?;
            let fb = apply_fn(eb, f)?;
            Ok(fa.matmul(q).sub(&q.matmul(&fb)))
        }
        Route::Integral => {
            let table = DividedDiffTable::from_systems(f, &[ea, eb])?;
            let sym = a.matmul(q).sub(&q.matmul(b));
            doi(&table, ea, eb, &sym)
        }
    }
}

/// Horner evaluation of an analytic polynomial symbol on a matrix argument.
pub fn matrix_polynomial(p: &TrigPoly, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !p.is_analytic(0.0) {
        return Err(Error::InvalidArgument(
            "matrix polynomial evaluation needs an analytic symbol".into(),
        ));
    }
    let d = p.degree() as i64;
    let n = m.dim();
    let mut acc = ComplexMatrix::zeros(n);
    for j in 0..n {
        acc.set(j, j, p.coeff(d));
    }
    for deg in (0..d).rev() {
        acc = acc.matmul(m);
        let c = p.coeff(deg);
        for j in 0..n {
            acc.set(j, j, acc.get(j, j) + c);
        }
    }
    Ok(acc)
}

/// Alternating binomial combination of `f` along the segment from `T`
/// to `R`: `Σ_k (−1)^k C(m,k) f(T + (k/m)(R − T))`, each term evaluated by
/// direct polynomial calculus.  For `m = 1` this is `f(T) − f(R)`.
pub fn contraction_poly_diff(
    t: &ComplexMatrix,
    r: &ComplexMatrix,
    f: &TrigPoly,
    m: usize,
) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::InvalidArgument("difference order must be ≥ 1".into()));
    }
    check_square(r, t.dim())?;
    let step = r.sub(t);
    let mut acc = ComplexMatrix::zeros(t.dim());
    for k in 0..=m {
        let point = t.add(&step.scale_re(k as f64 / m as f64));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc = acc.add(&matrix_polynomial(f, &point)?.scale_re(sign * binomial(m, k)));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use crate::random::{rand_hermitian, rand_operator, rand_unitary, OperatorKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn square_fn() -> SmoothFn {
        SmoothFn::callable_with_derivs(
            |x| x * x,
            vec![Arc::new(|x: f64| 2.0 * x), Arc::new(|_| 2.0)],
        )
    }

    fn cube_fn() -> SmoothFn {
        SmoothFn::callable_with_derivs(
            |x| x * x * x,
            vec![
                Arc::new(|x: f64| 3.0 * x * x),
                Arc::new(|x: f64| 6.0 * x),
                Arc::new(|_| 6.0),
            ],
        )
    }

    /// Random periodic line symbol of the given degree.
    fn line_symbol(degree: usize, seed: u64) -> SmoothFn {
        let mut p = TrigPoly::zero(degree);
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

    fn circle_symbol(degree: usize, seed: u64) -> SmoothFn {
        if let SmoothFn::Line(p) = line_symbol(degree, seed) {
            SmoothFn::Circle(p)
        } else {
            unreachable!()
        }
    }

    #[test]
    fn apply_identity_and_square() {
        let a = rand_hermitian(5, 3, 1.0).unwrap();
        let es = eig_hermitian(&a).unwrap();
        let ident = SmoothFn::callable(|x| x);
        assert!(
            apply_fn(&es, &ident)
                .unwrap()
                .sub(a.matrix())
                .frobenius_norm()
                < 1e-10
        );
        let diag = HermitianMatrix::new(ComplexMatrix::diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]))
            .unwrap();
        let es = eig_hermitian(&diag).unwrap();
        let sq = apply_fn(&es, &square_fn()).unwrap();
        assert!((sq.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((sq.get(1, 1) - c(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn apply_rejects_domain_mismatch() {
        let a = rand_hermitian(4, 5, 1.0).unwrap();
        let es = eig_hermitian(&a).unwrap();
        let circ = SmoothFn::Circle(TrigPoly::monomial(1, c(1.0, 0.0)));
        assert!(apply_fn(&es, &circ).is_err());
    }

    #[test]
    fn divided_diff_of_square() {
        let f = square_fn();
        let v = divided_diff(&f, &[c(1.0, 0.0), c(3.0, 0.0)]).unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-12);
        let v = divided_diff(&f, &[c(2.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-12); // f'(2)
    }

    #[test]
    fn second_divided_diff_of_cube_is_sum_of_nodes() {
        let f = cube_fn();
        for nodes in [
            [0.3, 1.7, -2.0],
            [0.5, 0.5, 0.5],
            [1.0, 1.0 + 5e-9, 2.0],
        ] {
            let pts: Vec<Complex64> = nodes.iter().map(|&x| c(x, 0.0)).collect();
            let v = divided_diff(&f, &pts).unwrap();
            let expect: f64 = nodes.iter().sum();
            assert!(
                (v - c(expect, 0.0)).norm() < 1e-5,
                "nodes {nodes:?}: {v} vs {expect}"
            );
        }
    }

    #[test]
    fn divided_diff_recursion_matches_partial_fraction_sum() {
        let f = line_symbol(12, 9);
        let nodes = [c(-1.3, 0.0), c(0.2, 0.0), c(0.9, 0.0), c(2.4, 0.0)];
        let dd = divided_diff(&f, &nodes).unwrap();
        let mut expect = Complex64::new(0.0, 0.0);
        for k in 0..nodes.len() {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..nodes.len() {
                if j != k {
                    denom *= nodes[k] - nodes[j];
                }
            }
            expect += f.value(nodes[k]) / denom;
        }
        assert!((dd - expect).norm() < 1e-9 * (1.0 + expect.norm()));
    }

    #[test]
    fn divided_diff_is_permutation_symmetric() {
        let f = line_symbol(10, 4);
        let a = [c(0.1, 0.0), c(-0.7, 0.0), c(1.9, 0.0)];
        let b = [a[2], a[0], a[1]];
        let va = divided_diff(&f, &a).unwrap();
        let vb = divided_diff(&f, &b).unwrap();
        assert!((va - vb).norm() < 1e-12 * (1.0 + va.norm()));
    }

    #[test]
    fn circle_divided_diff_uses_chord_denominators() {
        let f = circle_symbol(6, 2);
        let z1 = Complex64::cis(0.4);
        let z2 = Complex64::cis(-1.1);
        let dd = divided_diff(&f, &[z1, z2]).unwrap();
        let expect = (f.value(z1) - f.value(z2)) / (z1 - z2);
        assert!((dd - expect).norm() < 1e-12);
        // Confluent point on the circle: complex derivative.
        let dd = divided_diff(&f, &[z1, z1]).unwrap();
        let expect = f.deriv(z1, 1).unwrap();
        assert!((dd - expect).norm() < 1e-12);
    }

    #[test]
    fn constant_kernel_transformer_is_identity_on_q() {
        let a = rand_hermitian(6, 11, 1.0).unwrap();
        let b = rand_hermitian(6, 12, 1.0).unwrap();
        let q = rand_operator(OperatorKind::General, 6, 13, 1.0).unwrap();
        let ea = eig_hermitian(&a).unwrap();
        let eb = eig_hermitian(&b).unwrap();
        let table = DividedDiffTable::constant(c(1.0, 0.0), &[ea.points(), eb.points()]);
        let out = doi(&table, &ea, &eb, &q).unwrap();
        assert!(out.sub(&q).frobenius_norm() < 1e-10);
    }

    #[test]
    fn first_difference_identity_hermitian() {
        // f(A+K) − f(A) equals the kernel transformer applied to K.
        let f = line_symbol(16, 21);
        let a = rand_hermitian(12, 31, 1.0).unwrap();
        let k = rand_hermitian(12, 32, 0.3).unwrap();
        let apk = HermitianMatrix::symmetrize(&a.matrix().add(k.matrix()));
        let e_apk = eig_hermitian(&apk).unwrap();
        let e_a = eig_hermitian(&a).unwrap();
        let table = DividedDiffTable::from_systems(&f, &[&e_apk, &e_a]).unwrap();
        let integral = doi(&table, &e_apk, &e_a, k.matrix()).unwrap();
        let direct = apply_fn(&e_apk, &f).unwrap().sub(&apply_fn(&e_a, &f).unwrap());
        let rel = integral.sub(&direct).frobenius_norm() / direct.frobenius_norm();
        assert!(rel < 1e-10, "relative residual {rel}");
    }

    #[test]
    fn first_difference_identity_unitary() {
        let f = circle_symbol(10, 33);
        let u = rand_unitary(10, 41).unwrap();
        let v = rand_unitary(10, 42).unwrap();
        let eu = eig_unitary(&u).unwrap();
        let ev = eig_unitary(&v).unwrap();
        let table = DividedDiffTable::from_systems(&f, &[&eu, &ev]).unwrap();
        let integral = doi(&table, &eu, &ev, &u.matrix().sub(v.matrix())).unwrap();
        let direct = apply_fn(&eu, &f).unwrap().sub(&apply_fn(&ev, &f).unwrap());
        let rel = integral.sub(&direct).frobenius_norm() / direct.frobenius_norm();
        assert!(rel < 1e-9, "relative residual {rel}");
    }

    #[test]
    fn doi_with_equal_diagonal_arguments_scales_by_derivative() {
        let lam = [0.3, 1.1, 2.6];
        let diag = ComplexMatrix::diagonal(&[c(lam[0], 0.0), c(lam[1], 0.0), c(lam[2], 0.0)]);
        let a = HermitianMatrix::new(diag).unwrap();
        let ea = eig_hermitian(&a).unwrap();
        let q = rand_operator(OperatorKind::General, 3, 5, 1.0).unwrap();
        let f = square_fn();
        let table = DividedDiffTable::from_systems(&f, &[&ea, &ea]).unwrap();
        let out = doi(&table, &ea, &ea, &q).unwrap();
        for i in 0..3 {
            let expect = 2.0 * lam[i] * q.get(i, i); // f'(λ_i) Q_ii
            assert!((out.get(i, i) - expect).norm() < 1e-10);
            for j in 0..3 {
                let dd = if i == j {
                    2.0 * lam[i]
                } else {
                    (lam[i] * lam[i] - lam[j] * lam[j]) / (lam[i] - lam[j])
                };
                assert!((out.get(i, j) - dd * q.get(i, j)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn triple_integral_with_constant_kernel_multiplies() {
        let e: Vec<EigenSystem> = (0..3)
            .map(|s| eig_hermitian(&rand_hermitian(5, 60 + s, 1.0).unwrap()).unwrap())
            .collect();
        let k1 = rand_operator(OperatorKind::General, 5, 70, 1.0).unwrap();
        let k2 = rand_operator(OperatorKind::General, 5, 71, 1.0).unwrap();
        let table = DividedDiffTable::constant(
            c(1.0, 0.0),
            &[e[0].points(), e[1].points(), e[2].points()],
        );
        let out = moi3(&table, &e[0], &e[1], &e[2], &k1, &k2).unwrap();
        assert!(out.sub(&k1.matmul(&k2)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn second_difference_of_square_is_twice_k_squared() {
        let a = rand_hermitian(6, 80, 1.0).unwrap();
        let k = rand_hermitian(6, 81, 0.5).unwrap();
        let f = square_fn();
        let direct = higher_diff_sa(&a, &k, 2, &f, Route::Direct).unwrap();
        let expect = k.matrix().matmul(k.matrix()).scale_re(2.0);
        assert!(direct.sub(&expect).frobenius_norm() < 1e-10);
        let integral = higher_diff_sa(&a, &k, 2, &f, Route::Integral).unwrap();
        assert!(integral.sub(&expect).frobenius_norm() < 1e-9);
    }

    #[test]
    fn second_difference_of_cube_matches_expansion() {
        // A³ − 2(A+K)³ + (A+2K)³ = 2(AK² + KAK + K²A) + 6K³
        let a = rand_hermitian(6, 90, 1.0).unwrap();
        let k = rand_hermitian(6, 91, 0.7).unwrap();
        let (am, km) = (a.matrix(), k.matrix());
        let expect = am
            .matmul(&km.matmul(km))
            .add(&km.matmul(&am.matmul(km)))
            .add(&km.matmul(km).matmul(am))
            .scale_re(2.0)
            .add(&km.matmul(km).matmul(km).scale_re(6.0));
        let direct = higher_diff_sa(&a, &k, 2, &cube_fn(), Route::Direct).unwrap();
        assert!(direct.sub(&expect).frobenius_norm() < 1e-9 * expect.frobenius_norm());
    }

    #[test]
    fn higher_differences_agree_between_routes() {
        let f = line_symbol(8, 55);
        let a = rand_hermitian(8, 100, 1.0).unwrap();
        let k = rand_hermitian(8, 101, 0.2).unwrap();
        for m in 1..=3 {
            let direct = higher_diff_sa(&a, &k, m, &f, Route::Direct).unwrap();
            let integral = higher_diff_sa(&a, &k, m, &f, Route::Integral).unwrap();
            let rel = integral.sub(&direct).frobenius_norm()
                / direct.frobenius_norm().max(1e-300);
            assert!(rel < 1e-8, "m={m}: relative residual {rel}");
        }
    }

    #[test]
    fn unitary_second_difference_of_identity_symbol() {
        // f = z: U − 2e^{iA}U + e^{2iA}U = (I − e^{iA})² U.
        let u = rand_unitary(6, 110).unwrap();
        let a = rand_hermitian(6, 111, 0.4).unwrap();
        let f = SmoothFn::Circle(TrigPoly::monomial(1, c(1.0, 0.0)));
        let w = expi(&a).unwrap();
        let bend = ComplexMatrix::identity(6).sub(w.matrix());
        let expect = bend.matmul(&bend).matmul(u.matrix());
        for route in [Route::Direct, Route::Integral] {
            let out = higher_diff_unitary_m2(&u, &a, &f, route).unwrap();
            assert!(
                out.sub(&expect).frobenius_norm() < 1e-9,
                "route {route:?}"
            );
        }
    }

    #[test]
    fn unitary_second_difference_routes_agree() {
        let u = rand_unitary(8, 120).unwrap();
        let a = rand_hermitian(8, 121, 0.3).unwrap();
        let f = circle_symbol(8, 122);
        let direct = higher_diff_unitary_m2(&u, &a, &f, Route::Direct).unwrap();
        let integral = higher_diff_unitary_m2(&u, &a, &f, Route::Integral).unwrap();
        let rel = integral.sub(&direct).frobenius_norm() / direct.frobenius_norm();
        assert!(rel < 1e-8, "relative residual {rel}");
    }

    #[test]
    fn unitary_second_difference_vanishes_for_zero_generator() {
        let u = rand_unitary(5, 130).unwrap();
        let a = HermitianMatrix::new(ComplexMatrix::zeros(5)).unwrap();
        let f = circle_symbol(6, 131);
        let out = higher_diff_unitary_m2(&u, &a, &f, Route::Direct).unwrap();
        assert!(out.frobenius_norm() < 1e-10);
    }

    #[test]
    fn quasicommutator_routes_agree() {
        let a = rand_hermitian(8, 140, 1.0).unwrap();
        let b = rand_hermitian(8, 141, 1.0).unwrap();
        let q = rand_operator(OperatorKind::General, 8, 142, 1.0).unwrap();
        let f = line_symbol(10, 143);
        let direct = quasicommutator_hermitian(&a, &b, &q, &f, Route::Direct).unwrap();
        let integral = quasicommutator_hermitian(&a, &b, &q, &f, Route::Integral).unwrap();
        let rel = integral.sub(&direct).frobenius_norm() / direct.frobenius_norm();
        assert!(rel < 1e-9, "relative residual {rel}");

        let u = rand_unitary(6, 144).unwrap();
        let v = rand_unitary(6, 145).unwrap();
        let fc = circle_symbol(8, 146);
        let direct = quasicommutator_unitary(&u, &v, &q_sub(&q, 6), &fc, Route::Direct).unwrap();
        let integral =
            quasicommutator_unitary(&u, &v, &q_sub(&q, 6), &fc, Route::Integral).unwrap();
        let rel = integral.sub(&direct).frobenius_norm() / direct.frobenius_norm();
        assert!(rel < 1e-9, "unitary relative residual {rel}");
    }

    fn q_sub(q: &ComplexMatrix, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |i, j| q.get(i, j))
    }

    #[test]
    fn quasicommutator_with_identity_q_is_function_difference() {
        let a = rand_hermitian(6, 150, 1.0).unwrap();
        let b = rand_hermitian(6, 151, 1.0).unwrap();
        let f = line_symbol(8, 152);
        let q = ComplexMatrix::identity(6);
        let out = quasicommutator_hermitian(&a, &b, &q, &f, Route::Direct).unwrap();
        let ea = eig_hermitian(&a).unwrap();
        let eb = eig_hermitian(&b).unwrap();
        let expect = apply_fn(&ea, &f).unwrap().sub(&apply_fn(&eb, &f).unwrap());
        assert!(out.sub(&expect).frobenius_norm() < 1e-11);
    }

    #[test]
    fn matrix_polynomial_matches_powers() {
        let t = rand_operator(OperatorKind::General, 5, 160, 0.8).unwrap();
        let mut p = TrigPoly::zero(3);
        p.set_coeff(0, c(2.0, 0.0));
        p.set_coeff(2, c(-1.0, 0.5));
        p.set_coeff(3, c(0.25, 0.0));
        let out = matrix_polynomial(&p, &t).unwrap();
        let t2 = t.matmul(&t);
        let t3 = t2.matmul(&t);
        let expect = ComplexMatrix::identity(5)
            .scale_re(2.0)
            .add(&t2.scale(c(-1.0, 0.5)))
            .add(&t3.scale_re(0.25));
        assert!(out.sub(&expect).frobenius_norm() < 1e-12);
        // Symbols with negative frequencies are rejected.
        let bad = TrigPoly::monomial(-1, c(1.0, 0.0));
        assert!(matrix_polynomial(&bad, &t).is_err());
    }

    #[test]
    fn contraction_first_difference_of_monomial() {
        let t = rand_operator(OperatorKind::Contraction, 6, 170, 1.0).unwrap();
        let r = rand_operator(OperatorKind::Contraction, 6, 171, 1.0).unwrap();
        let f = TrigPoly::monomial(3, c(1.0, 0.0));
        let out = contraction_poly_diff(&t, &r, &f, 1).unwrap();
        let expect = t
            .matmul(&t)
            .matmul(&t)
            .sub(&r.matmul(&r).matmul(&r));
        assert!(out.sub(&expect).frobenius_norm() < 1e-12);
        let zero = contraction_poly_diff(&t, &t, &f, 2).unwrap();
        assert!(zero.frobenius_norm() < 1e-13);
    }

    #[test]
    fn contraction_second_difference_of_square_is_half_gap_squared() {
        let t = rand_operator(OperatorKind::Contraction, 5, 180, 1.0).unwrap();
        let r = rand_operator(OperatorKind::Contraction, 5, 181, 1.0).unwrap();
        let f = TrigPoly::monomial(2, c(1.0, 0.0));
        let out = contraction_poly_diff(&t, &r, &f, 2).unwrap();
        let gap = t.sub(&r);
        let expect = gap.matmul(&gap).scale_re(0.5);
        assert!(out.sub(&expect).frobenius_norm() < 1e-12);
    }
}
