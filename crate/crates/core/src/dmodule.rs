//! The finite bicomplex module `BC^n`: vectors, D-valued norms, seminorms of
//! the form `x ↦ ‖Tx‖_D`, and truncated series summation.
//!
//! A vector is stored as its two complex idempotent components `(v1, v2)`,
//! and `‖x‖_D = N(v1)·e1 + N(v2)·e2` for a fixed complex component norm `N`.

use std::collections::VecDeque;
use std::ops::{Add, Sub};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::dop::BCMatrix;
use crate::error::{Error, Result};
use crate::hyperscalar::{Bicomplex, DPlus};

/// Number of trailing terms whose norms must sum below the tolerance before
/// an infinite series is declared converged.
pub const SERIES_WINDOW: usize = 8;

/// Default tolerance for membership in the closure of a sublevel set.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentNorm {
    #[default]
    L2,
    L1,
    #[serde(rename = "linf")]
    LInf,
}

impl ComponentNorm {
    pub fn eval(&self, v: &DVector<Complex64>) -> f64 {
        match self {
            ComponentNorm::L2 => v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
            ComponentNorm::L1 => v.iter().map(|z| z.norm()).sum(),
            ComponentNorm::LInf => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for ComponentNorm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(ComponentNorm::L2),
            "l1" => Ok(ComponentNorm::L1),
            "linf" => Ok(ComponentNorm::LInf),
            other => Err(Error::Parse(format!("unknown component norm {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct DNormConfig {
    pub component_norm: ComponentNorm,
}

impl DNormConfig {
    pub const L2: DNormConfig = DNormConfig {
        component_norm: ComponentNorm::L2,
    };
}

/// An element of `BC^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BCVector {
    v1: DVector<Complex64>,
    v2: DVector<Complex64>,
}

impl BCVector {
    pub fn new(v1: DVector<Complex64>, v2: DVector<Complex64>) -> Result<Self> {
        if v1.len() != v2.len() {
            return Err(Error::DimensionMismatch {
                expected: v1.len(),
                found: v2.len(),
            });
        }
        if v1.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be ≥ 1".into()));
        }
        if v1.iter().chain(v2.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("vector entry"));
        }
        Ok(Self { v1, v2 })
    }

    pub(crate) fn raw(v1: DVector<Complex64>, v2: DVector<Complex64>) -> Self {
        debug_assert_eq!(v1.len(), v2.len());
        Self { v1, v2 }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::raw(DVector::zeros(dim), DVector::zeros(dim))
    }

    pub fn from_entries(entries: &[Bicomplex]) -> Result<Self> {
        Self::new(
            DVector::from_iterator(entries.len(), entries.iter().map(|b| b.z1())),
            DVector::from_iterator(entries.len(), entries.iter().map(|b| b.z2())),
        )
    }

    pub fn dim(&self) -> usize {
        self.v1.len()
    }

    pub fn v1(&self) -> &DVector<Complex64> {
        &self.v1
    }

    pub fn v2(&self) -> &DVector<Complex64> {
        &self.v2
    }

    pub fn components(&self) -> [&DVector<Complex64>; 2] {
        [&self.v1, &self.v2]
    }

    pub fn entry(&self, i: usize) -> Bicomplex {
        Bicomplex::raw(self.v1[i], self.v2[i])
    }

    pub fn entries(&self) -> Vec<Bicomplex> {
        (0..self.dim()).map(|i| self.entry(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.v1.iter().chain(self.v2.iter()).all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// `μ·x`, acting as `(μ1·v1, μ2·v2)`.
    pub fn scale(&self, mu: &Bicomplex) -> BCVector {
        Self::raw(&self.v1 * mu.z1(), &self.v2 * mu.z2())
    }

    pub fn scale_real(&self, s: f64) -> BCVector {
        Self::raw(self.v1.map(|z| z * s), self.v2.map(|z| z * s))
    }

    /// Scales each idempotent component by its own real factor.
    pub fn scale_components(&self, s1: f64, s2: f64) -> BCVector {
        Self::raw(self.v1.map(|z| z * s1), self.v2.map(|z| z * s2))
    }

    pub fn dnorm(&self, cfg: DNormConfig) -> DPlus {
        DPlus::raw(cfg.component_norm.eval(&self.v1), cfg.component_norm.eval(&self.v2))
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl Add for &BCVector {
    type Output = BCVector;
    fn add(self, rhs: &BCVector) -> BCVector {
        BCVector::raw(&self.v1 + &rhs.v1, &self.v2 + &rhs.v2)
    }
}

impl Sub for &BCVector {
    type Output = BCVector;
    fn sub(self, rhs: &BCVector) -> BCVector {
        BCVector::raw(&self.v1 - &rhs.v1, &self.v2 - &rhs.v2)
    }
}

impl Add for BCVector {
    type Output = BCVector;
    fn add(self, rhs: BCVector) -> BCVector {
        &self + &rhs
    }
}

impl Sub for BCVector {
    type Output = BCVector;
    fn sub(self, rhs: BCVector) -> BCVector {
        &self - &rhs
    }
}

/// `‖x‖_D` for a vector and a configured component norm.
pub fn vec_dnorm(v: &BCVector, cfg: DNormConfig) -> DPlus {
    v.dnorm(cfg)
}

/// A hyperbolic seminorm `p(x) = ‖Tx‖_D`.
#[derive(Clone, Debug, PartialEq)]
pub struct DSeminorm {
    op: BCMatrix,
    cfg: DNormConfig,
}

impl DSeminorm {
    pub fn new(op: BCMatrix, cfg: DNormConfig) -> Self {
        Self { op, cfg }
    }

    /// The norm `‖·‖_D` itself, as the seminorm of the identity.
    pub fn norm(dim: usize, cfg: DNormConfig) -> Self {
        Self::new(BCMatrix::identity(dim), cfg)
    }

    pub fn operator(&self) -> &BCMatrix {
        &self.op
    }

    pub fn config(&self) -> DNormConfig {
        self.cfg
    }

    pub fn domain_dim(&self) -> usize {
        self.op.cols()
    }

    pub fn eval(&self, x: &BCVector) -> Result<DPlus> {
        Ok(self.op.apply(x)?.dnorm(self.cfg))
    }
}

pub fn seminorm_eval(p: &DSeminorm, x: &BCVector) -> Result<DPlus> {
    p.eval(x)
}

/// Membership in the sublevel set `V_α = {x : p(x) ≤ α}`.
pub fn v_alpha_member(p: &DSeminorm, x: &BCVector, alpha: &DPlus) -> Result<bool> {
    Ok(p.eval(x)?.le(alpha))
}

/// Membership in the closure of `V_α`, represented as `p(x) ≤ α + tol·(1,1)`.
pub fn v_alpha_closure_member(
    p: &DSeminorm,
    x: &BCVector,
    alpha: &DPlus,
    tol: f64,
) -> Result<bool> {
    Ok(p.eval(x)?.le_tol(alpha, tol))
}

/// Where the terms of a series come from.
#[derive(Clone, Debug, PartialEq)]
pub enum SeriesSource {
    /// A finite list; the series is these terms followed by zeros.
    Explicit(Vec<BCVector>),
    /// `Z^n·v` for `n = 0, 1, 2, …`.
    Geometric { ratio: Bicomplex, seed: BCVector },
}

impl SeriesSource {
    pub fn dim(&self) -> Option<usize> {
        match self {
            SeriesSource::Explicit(v) => v.first().map(BCVector::dim),
            SeriesSource::Geometric { seed, .. } => Some(seed.dim()),
        }
    }

    pub fn terms(&self) -> Box<dyn Iterator<Item = BCVector> + '_> {
        match self {
            SeriesSource::Explicit(v) => Box::new(v.iter().cloned()),
            SeriesSource::Geometric { ratio, seed } => {
                let ratio = *ratio;
                Box::new(std::iter::successors(Some(seed.clone()), move |t| {
                    Some(t.scale(&ratio))
                }))
            }
        }
    }
}

/// Outcome of a truncated summation. "Converged" always means converged at
/// this cap with this tolerance; nothing is claimed about the infinite tail
/// of a generated series beyond the trailing-window estimate.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SeriesReport {
    pub terms: usize,
    pub converged: bool,
    /// The term source ran out before the cap (an explicit, finite list).
    pub exhausted: bool,
    pub tol: DPlus,
    pub window: usize,
    pub partial_sum_norms: Vec<DPlus>,
    /// Running `Σ_{k≤n} ‖x_k‖_D`.
    pub abs_sums: Vec<DPlus>,
    /// `Σ ‖x_k‖_D` over the trailing window at the point of stopping; bounds
    /// `‖s_n − s_m‖_D` for every `m < n` inside that window.
    pub cauchy_margin: DPlus,
    pub partial_sum: BCVector,
    pub limit: Option<BCVector>,
}

fn check_series_args(tol: &DPlus, max_n: usize) -> Result<()> {
    if !tol.is_strictly_positive() {
        return Err(Error::InvalidArgument("series tolerance must be strictly positive".into()));
    }
    if max_n == 0 {
        return Err(Error::InvalidArgument("maxN must be ≥ 1".into()));
    }
    Ok(())
}

struct Summation {
    dim: usize,
    sum: BCVector,
    abs: DPlus,
    window: VecDeque<DPlus>,
    partial_sum_norms: Vec<DPlus>,
    abs_sums: Vec<DPlus>,
    terms: Vec<BCVector>,
    keep_terms: bool,
}

impl Summation {
    fn new(dim: usize, keep_terms: bool) -> Self {
        Self {
            dim,
            sum: BCVector::zeros(dim),
            abs: DPlus::ZERO,
            window: VecDeque::with_capacity(SERIES_WINDOW + 1),
            partial_sum_norms: Vec::new(),
            abs_sums: Vec::new(),
            terms: Vec::new(),
            keep_terms,
        }
    }

    fn push(&mut self, term: BCVector) -> Result<()> {
        term.check_dim(self.dim)?;
        let norm = term.dnorm(DNormConfig::L2);
        self.sum = &self.sum + &term;
        self.abs = self.abs + norm;
        self.window.push_back(norm);
        if self.window.len() > SERIES_WINDOW {
            self.window.pop_front();
        }
        self.partial_sum_norms.push(self.sum.dnorm(DNormConfig::L2));
        self.abs_sums.push(self.abs);
        if self.keep_terms {
            self.terms.push(term);
        }
        Ok(())
    }

    fn window_sum(&self) -> DPlus {
        self.window.iter().fold(DPlus::ZERO, |acc, d| acc + *d)
    }

    fn window_full(&self) -> bool {
        self.window.len() == SERIES_WINDOW
    }
}

/// Sums at most `max_n` terms, stopping when the source is exhausted or the
/// trailing-window bound on `‖s_n − s_m‖_D` drops to `tol`.
fn run_summation<I>(terms: I, tol: DPlus, max_n: usize, keep_terms: bool) -> Result<(SeriesReport, Vec<BCVector>)>
where
    I: IntoIterator<Item = BCVector>,
{
    check_series_args(&tol, max_n)?;
    let mut iter = terms.into_iter().peekable();
    let dim = match iter.peek() {
        Some(t) => t.dim(),
        None => return Err(Error::InvalidArgument("series has no terms".into())),
    };
    let mut acc = Summation::new(dim, keep_terms);
    let mut converged = false;
    while acc.abs_sums.len() < max_n {
        let Some(term) = iter.next() else { break };
        acc.push(term)?;
        if acc.window_full() && acc.window_sum().le(&tol) {
            converged = true;
            break;
        }
    }
    let exhausted = iter.peek().is_none();
    let converged = converged || exhausted;
    let report = SeriesReport {
        terms: acc.abs_sums.len(),
        converged,
        exhausted,
        tol,
        window: SERIES_WINDOW,
        cauchy_margin: if exhausted { DPlus::ZERO } else { acc.window_sum() },
        limit: converged.then(|| acc.sum.clone()),
        partial_sum: acc.sum,
        partial_sum_norms: acc.partial_sum_norms,
        abs_sums: acc.abs_sums,
    };
    Ok((report, acc.terms))
}

/// Sums a series of vectors. Fails with [`Error::NotConverged`] (carrying
/// the report) when `max_n` terms are used up first.
pub fn series_sum<I>(terms: I, tol: DPlus, max_n: usize) -> Result<SeriesReport>
where
    I: IntoIterator<Item = BCVector>,
{
    let (report, _) = run_summation(terms, tol, max_n, false)?;
    if report.converged {
        Ok(report)
    } else {
        Err(Error::NotConverged(Box::new(report)))
    }
}

/// Result of replaying the Cauchy argument "absolutely summable ⇒ summable".
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AbsSummabilityReport {
    pub terms: usize,
    /// `Σ‖x_k‖_D` converged at this cap (trailing-window rule).
    pub abs_converged: bool,
    pub abs_sum: DPlus,
    pub tail_estimate: DPlus,
    pub pairs_checked: usize,
    /// Every sampled `‖s_n − s_m‖_D ≤ Σ_{k=m+1}^n ‖x_k‖_D` held.
    pub chain_ok: bool,
    /// Smallest observed `Σ_{k=m+1}^n ‖x_k‖_D − ‖s_n − s_m‖_D`, per component.
    #[serde(serialize_with = "crate::json::reals")]
    pub worst_margin: [f64; 2],
    #[serde(serialize_with = "crate::json::real")]
    pub chain_tol: f64,
}

pub const CAUCHY_CHAIN_TOL: f64 = 1e-12;

/// Partial-sum indices at which the Cauchy chain is checked: every index for
/// short series, otherwise a fixed mix of small, large and evenly spaced ones.
fn chain_indices(n: usize) -> Vec<usize> {
    if n <= 64 {
        return (0..=n).collect();
    }
    let mut idx: Vec<usize> = (0..=8).collect();
    let mut p = 16;
    while p < n {
        idx.push(p);
        p *= 2;
    }
    idx.extend((0..=32).map(|s| s * n / 32));
    idx.extend(n.saturating_sub(8)..=n);
    idx.sort_unstable();
    idx.dedup();
    idx
}

pub fn abs_summability_check<I>(terms: I, tol: DPlus, max_n: usize) -> Result<AbsSummabilityReport>
where
    I: IntoIterator<Item = BCVector>,
{
    let (report, terms) = run_summation(terms, tol, max_n, true)?;
    let n = terms.len();
    let dim = report.partial_sum.dim();

    let mut sums = Vec::with_capacity(n + 1);
    sums.push(BCVector::zeros(dim));
    for t in &terms {
        let next = sums.last().map(|s: &BCVector| s + t).expect("nonempty");
        sums.push(next);
    }
    let norms: Vec<DPlus> = terms.iter().map(|t| t.dnorm(DNormConfig::L2)).collect();

    let idx = chain_indices(n);
    let mut worst = [f64::INFINITY; 2];
    let mut pairs = 0;
    let mut ok = true;
    for (a, &m) in idx.iter().enumerate() {
        for &hi in &idx[a + 1..] {
            let lhs = (&sums[hi] - &sums[m]).dnorm(DNormConfig::L2);
            let rhs = norms[m..hi].iter().fold(DPlus::ZERO, |acc, d| acc + *d);
            for c in 0..2 {
                let margin = rhs.components()[c] - lhs.components()[c];
                worst[c] = worst[c].min(margin);
                if margin < -CAUCHY_CHAIN_TOL * rhs.components()[c].max(1.0) {
                    ok = false;
                }
            }
            pairs += 1;
        }
    }
    if pairs == 0 {
        worst = [0.0, 0.0];
    }

    Ok(AbsSummabilityReport {
        terms: n,
        abs_converged: report.converged,
        abs_sum: *report.abs_sums.last().expect("at least one term"),
        tail_estimate: report.cauchy_margin,
        pairs_checked: pairs,
        chain_ok: ok,
        worst_margin: worst,
        chain_tol: CAUCHY_CHAIN_TOL,
    })
}
