//! Finite-dimensional verification of the continuity results for hyperbolic
//! seminorms: the Lipschitz characterisation of continuity, countable
//! subadditivity, ball scaling of sublevel sets, the constructive Zabreiko
//! decomposition, uniform boundedness and the open mapping bound.
//!
//! Each check returns a report with the worst observed margin of every
//! inequality it replays. A margin is `rhs − lhs` per idempotent component,
//! so an inequality holds when its margin is `≥ −tol`. Topological closures
//! and dense subsets are replaced by membership with tolerance
//! [`CLOSURE_TOL`](crate::dmodule::CLOSURE_TOL).
//!
//! Random inputs come from [`sampling::trial_rng`] keyed by `(seed, trial)`,
//! so trials run in parallel and reports are identical for identical seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::dmodule::{self, BCVector, DNormConfig, DSeminorm, CLOSURE_TOL};
use crate::dop::{self, BCMatrix};
use crate::error::{Error, Result};
use crate::hyperscalar::{DPlus, Hyperbolic};
use crate::json::{self, Real};
use crate::sampling;

/// Relative tolerance for rank decisions and solves inside the checks.
pub const SOLVE_TOL: f64 = 1e-10;
/// Absolute slack allowed on every replayed inequality.
pub const VERIFY_TOL: f64 = 1e-9;
/// Terms `x + 2^{-j}·d`, `j = 1..=SEQUENCE_LEN`, in the sequential continuity check.
pub const SEQUENCE_LEN: usize = 16;
/// Remainders below this (both components) end a Zabreiko decomposition.
pub const MACHINE_FLOOR: f64 = 1e-300;
/// Number of terms in the generated series used for the quotient seminorm.
pub const QUOTIENT_SERIES_LEN: usize = 40;

/// Worst `rhs − lhs` over a set of componentwise inequalities `lhs ≤ rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margin(pub [f64; 2]);

impl Margin {
    /// No inequality recorded yet.
    pub const NONE: Margin = Margin([f64::INFINITY; 2]);

    pub fn of(lhs: Hyperbolic, rhs: Hyperbolic) -> Margin {
        let d = rhs - lhs;
        Margin([d.a1(), d.a2()])
    }

    pub fn min(self, other: Margin) -> Margin {
        Margin([self.0[0].min(other.0[0]), self.0[1].min(other.0[1])])
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.0[0] >= -tol && self.0[1] >= -tol
    }
}

impl Serialize for Margin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [Real(self.0[0]), Real(self.0[1])].serialize(s)
    }
}

fn margin(lhs: impl Into<Hyperbolic>, rhs: impl Into<Hyperbolic>) -> Margin {
    Margin::of(lhs.into(), rhs.into())
}

fn fold_margins<I: IntoIterator<Item = Margin>>(it: I) -> Margin {
    it.into_iter().fold(Margin::NONE, Margin::min)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg.into()))
    }
}

fn op_norm(p: &DSeminorm) -> Result<dop::OperatorNormReport> {
    dop::op_dnorm_with(p.operator(), p.config(), SOLVE_TOL)
}

// ---- continuity ------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub check: &'static str,
    pub inputs_digest: String,
    pub seed: u64,
    pub trials: usize,
    /// Least Lipschitz constant, the operator D-norm of the defining operator.
    pub alpha_star: DPlus,
    /// Constant actually tested.
    pub alpha: DPlus,
    /// Worst `α·‖x‖_D − p(x)`.
    pub bound_margin: Margin,
    pub all_ok: bool,
    /// Worst margin of `|p(x_n) − p(x)|_k ≤ p(x_n − x) ≤ α·‖x_n − x‖_D`.
    pub sequence_margin: Margin,
    pub sequence_check: bool,
    /// `p(w)` for the unit top-singular-vector witness `w`.
    pub witness_value: DPlus,
    pub tight: bool,
    pub pass: bool,
}

/// Checks `p(x) ≤ α*·‖x‖_D` with `α*` the operator D-norm, on the witness
/// plus `trials − 1` random points, and sequential continuity along
/// `x_n = x + 2^{-n}·d`.
pub fn continuity_bound_check(p: &DSeminorm, trials: usize, seed: u64) -> Result<ContinuityReport> {
    let alpha = op_norm(p)?.m;
    continuity_bound_check_with(p, alpha, trials, seed)
}

/// [`continuity_bound_check`] with an arbitrary candidate constant.
pub fn continuity_bound_check_with(
    p: &DSeminorm,
    alpha: DPlus,
    trials: usize,
    seed: u64,
) -> Result<ContinuityReport> {
    require(trials >= 1, "trials must be ≥ 1")?;
    let norm = op_norm(p)?;
    let n = p.domain_dim();

    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(Margin, Margin)> {
            let mut rng = sampling::trial_rng(seed, i as u64);
            let x = if i == 0 {
                norm.witness.clone()
            } else {
                sampling::vector(&mut rng, n)
            };
            let px = p.eval(&x)?;
            let bound = margin(px, alpha * x.dnorm(p.config()));

            let d = sampling::unit_vector(&mut rng, n);
            let mut seq = Margin::NONE;
            for j in 1..=SEQUENCE_LEN {
                let step = d.scale_real((-(j as f64)).exp2());
                let xn = &x + &step;
                let diff = (p.eval(&xn)?.hyperbolic() - px.hyperbolic()).abs();
                let lipschitz = p.eval(&(&xn - &x))?;
                seq = seq
                    .min(margin(diff, lipschitz))
                    .min(margin(lipschitz, alpha * (&xn - &x).dnorm(p.config())));
            }
            Ok((bound, seq))
        })
        .collect::<Result<Vec<_>>>()?;

    let bound_margin = fold_margins(outcomes.iter().map(|o| o.0));
    let sequence_margin = fold_margins(outcomes.iter().map(|o| o.1));
    let witness_value = p.eval(&norm.witness)?;
    let tight = (0..2).all(|c| {
        let (got, want) = (witness_value.components()[c], norm.m.components()[c]);
        (got - want).abs() <= 1e-8 * want.max(1.0)
    });
    let all_ok = bound_margin.holds(VERIFY_TOL);
    let sequence_check = sequence_margin.holds(VERIFY_TOL);
    Ok(ContinuityReport {
        check: "lemma31",
        inputs_digest: json::digest(&(p.operator(), alpha, trials, seed)),
        seed,
        trials,
        alpha_star: norm.m,
        alpha,
        bound_margin,
        all_ok,
        sequence_margin,
        sequence_check,
        witness_value,
        tight,
        pass: all_ok && sequence_check,
    })
}

// ---- countable subadditivity -----------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubadditivityReport {
    pub check: &'static str,
    pub inputs_digest: String,
    pub terms: usize,
    pub series_converged: bool,
    /// `p(Σ_{k≤N} x_k)` at the cap.
    pub p_limit: DPlus,
    /// `Σ_{k≤N} p(x_k)`.
    pub sum_p: DPlus,
    /// Worst `Σ_{k≤n} p(x_k) − p(s_n)` over every partial sum, the limit included.
    pub worst_margin: Margin,
    #[serde(serialize_with = "json::real")]
    pub tol: f64,
    pub pass: bool,
}

/// `p(Σ x_k) ≤ Σ p(x_k)` along every partial sum of a convergent series.
pub fn countable_subadd_check<I>(
    p: &DSeminorm,
    terms: I,
    series_tol: DPlus,
    max_n: usize,
    tol: f64,
) -> Result<SubadditivityReport>
where
    I: IntoIterator<Item = BCVector>,
{
    let mut seen = Vec::new();
    let series = dmodule::series_sum(
        terms.into_iter().inspect(|t| seen.push(t.clone())),
        series_tol,
        max_n,
    )?;
    seen.truncate(series.terms);

    let mut partial = BCVector::zeros(p.domain_dim());
    let mut sum_p = DPlus::ZERO;
    let mut worst = Margin::NONE;
    for t in &seen {
        partial = &partial + t;
        sum_p = sum_p + p.eval(t)?;
        worst = worst.min(margin(p.eval(&partial)?, sum_p));
    }
    let limit = series.limit.as_ref().unwrap_or(&series.partial_sum);
    let p_limit = p.eval(limit)?;
    worst = worst.min(margin(p_limit, sum_p));

    Ok(SubadditivityReport {
        check: "subadd",
        inputs_digest: json::digest(&(p.operator(), &seen, series_tol, max_n)),
        terms: seen.len(),
        series_converged: series.converged,
        p_limit,
        sum_p,
        worst_margin: worst,
        tol,
        pass: worst.holds(tol),
    })
}

// ---- ball scaling ------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleOutcome {
    #[serde(serialize_with = "json::real")]
    pub delta: f64,
    pub points: usize,
    /// Worst `δ·α + tol − p(x)` over points with `‖x‖_D ≤ δ·r`.
    pub worst_margin: Margin,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallScalingReport {
    pub check: &'static str,
    pub inputs_digest: String,
    pub seed: u64,
    pub alpha: DPlus,
    #[serde(serialize_with = "json::real")]
    pub r: f64,
    #[serde(serialize_with = "json::real")]
    pub closure_tol: f64,
    pub hypothesis_points: usize,
    pub hypothesis_margin: Margin,
    pub scales: Vec<ScaleOutcome>,
    pub pass: bool,
}

/// Verifies `B[0,r] ⊂ cl V_α` on samples, then `B[0,δr] ⊂ cl V_{δα}` for
/// each `δ`. The samples include the top-singular-vector witness on the
/// sphere of radius `r`, so a hypothesis that is false is always caught.
pub fn ball_scaling_check(
    p: &DSeminorm,
    alpha: DPlus,
    r: f64,
    deltas: &[f64],
    samples: usize,
    seed: u64,
) -> Result<BallScalingReport> {
    require(r > 0.0 && r.is_finite(), "r must be a positive real")?;
    require(deltas.iter().all(|&d| d > 0.0 && d.is_finite()), "each δ must be a positive real")?;
    require(samples >= 1, "samples must be ≥ 1")?;
    let n = p.domain_dim();
    let witness = op_norm(p)?.witness.scale_real(r);

    // Even streams lie on the sphere of radius r, odd ones inside the ball.
    let points: Vec<BCVector> = std::iter::once(witness)
        .chain((0..samples).map(|i| {
            let mut rng = sampling::trial_rng(seed, i as u64);
            if i % 2 == 0 {
                sampling::unit_vector(&mut rng, n).scale_real(r)
            } else {
                sampling::vector_in_ball(&mut rng, n, r)
            }
        }))
        .collect();

    let hyp = fold_margins(
        points
            .iter()
            .map(|x| Ok(margin(p.eval(x)?, alpha)))
            .collect::<Result<Vec<_>>>()?,
    );
    if !hyp.holds(CLOSURE_TOL) {
        return Err(Error::HypothesisFailed(format!(
            "B[0,{r}] ⊄ cl V_α on samples: worst margin ({:e}, {:e})",
            hyp.0[0], hyp.0[1]
        )));
    }

    let mut scales = Vec::with_capacity(deltas.len());
    for (si, &delta) in deltas.iter().enumerate() {
        let target = alpha.scale(delta);
        let fresh = (0..samples).map(|i| {
            let mut rng = sampling::trial_rng(seed, ((si as u64 + 1) << 32) | i as u64);
            sampling::vector_in_ball(&mut rng, n, delta * r)
        });
        let scaled: Vec<BCVector> = points.iter().map(|x| x.scale_real(delta)).chain(fresh).collect();
        let mut worst = Margin::NONE;
        for x in &scaled {
            worst = worst.min(margin(p.eval(x)?, target));
            // membership predicate agrees with the margin
            debug_assert_eq!(
                dmodule::v_alpha_closure_member(p, x, &target, CLOSURE_TOL)?,
                margin(p.eval(x)?, target).holds(CLOSURE_TOL)
            );
        }
        scales.push(ScaleOutcome {
            delta,
            points: scaled.len(),
            worst_margin: worst,
            ok: worst.holds(CLOSURE_TOL),
        });
    }

    let pass = scales.iter().all(|s| s.ok);
    Ok(BallScalingReport {
        check: "ballscale",
        inputs_digest: json::digest(&(p.operator(), alpha, Real(r), deltas.iter().map(|&d| Real(d)).collect::<Vec<_>>(), samples, seed)),
        seed,
        alpha,
        r,
        closure_tol: CLOSURE_TOL,
        hypothesis_points: points.len(),
        hypothesis_margin: hyp,
        scales,
        pass,
    })
}

// ---- Zabreiko decomposition --------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZabreikoStep {
    pub k: usize,
    /// `ε_{k−1}·m`, the budget for `p(x_k)`.
    pub p_budget: DPlus,
    pub p_term: DPlus,
    /// `ε_k·r = (ε·r/m)·2^{-k}`.
    pub remainder_bound: DPlus,
    pub remainder_norm: DPlus,
    /// `‖x − Σ_{j≤k} x_j‖_D`.
    pub tail_norm: DPlus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    RemainderFloor,
    Cap,
}

/// A replayable record of the decomposition `x = x_1 + … + x_n + u_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZabreikoTrace {
    pub check: &'static str,
    pub inputs_digest: String,
    #[serde(skip)]
    pub x_terms: Vec<BCVector>,
    #[serde(skip)]
    pub remainders: Vec<BCVector>,
    /// `ε_0 = ‖x‖_D/r`, then `ε_k = ε/(m·2^k)`.
    pub epsilons: Vec<DPlus>,
    pub m: DPlus,
    #[serde(serialize_with = "json::real")]
    pub r: f64,
    pub eps: DPlus,
    pub alpha_star: DPlus,
    pub steps: Vec<ZabreikoStep>,
    /// `ε_k·r` for each recorded step, bounding both `‖u_k‖_D` and the tail.
    #[serde(skip)]
    pub tail_bounds: Vec<DPlus>,
    pub terminated_by: Termination,
    /// Worst `ε_{k−1}·m − p(x_k)`.
    pub term_margin: Margin,
    /// Worst `ε_k·r − ‖u_k‖_D`.
    pub remainder_margin: Margin,
    /// Worst `(ε·r/m)·2^{-k} − ‖x − Σ_{j≤k} x_j‖_D`.
    pub tail_margin: Margin,
    pub p_x: DPlus,
    pub sum_p: DPlus,
    /// `(m/r)·‖x‖_D + ε`.
    pub final_bound: DPlus,
    /// Worst of `final_bound − p(x)` and `m·ε_0 + ε − Σ p(x_k)`.
    pub final_margin: Margin,
    pub final_bound_ok: bool,
    pub invariants_ok: bool,
}

/// Rounds every real coordinate of each component to a grid of the given
/// pitch; a zero pitch leaves the component unchanged.
fn quantize(v: &BCVector, pitch: [f64; 2]) -> BCVector {
    let snap = |x: f64, h: f64| {
        if h == 0.0 {
            return x;
        }
        let q = (x / h).round();
        if q.is_finite() {
            q * h
        } else {
            x
        }
    };
    let v1 = v.v1().map(|z| num_complex::Complex64::new(snap(z.re, pitch[0]), snap(z.im, pitch[0])));
    let v2 = v.v2().map(|z| num_complex::Complex64::new(snap(z.re, pitch[1]), snap(z.im, pitch[1])));
    BCVector::raw(v1, v2)
}

/// Decomposes `x` as `Σ x_k` with `p(x_k) ≤ ε_{k−1}·m` and remainders
/// `‖u_k‖_D ≤ ε_k·r`.
///
/// Each `x_k` is `u_{k−1}` rounded to a grid of pitch
/// `min(ε_{k−1}, ε_k)·r/(2√n)` per real coordinate, which keeps
/// `‖u_{k−1} − x_k‖_D ≤ ε_k·r`. With `2·α*·r ≤ m` this gives
/// `p(x_k) ≤ α*·(‖u_{k−1}‖ + ‖u_k‖) ≤ 2·α*·ε_{k−1}·r ≤ ε_{k−1}·m`.
pub fn zabreiko_decompose(
    p: &DSeminorm,
    x: &BCVector,
    m: DPlus,
    r: f64,
    eps: DPlus,
    max_n: usize,
) -> Result<ZabreikoTrace> {
    require(r > 0.0 && r.is_finite(), "r must be a positive real")?;
    require(max_n >= 1, "maxN must be ≥ 1")?;
    if !eps.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive { a1: eps.a1(), a2: eps.a2() });
    }
    x.check_dim(p.domain_dim())?;
    let cfg = p.config();
    let alpha = op_norm(p)?.m;

    for c in 0..2 {
        let (a, mc) = (alpha.components()[c], m.components()[c]);
        if !(mc > 0.0) {
            return Err(Error::PreconditionViolated(format!(
                "component e{}: m = {mc} must be strictly positive",
                c + 1
            )));
        }
        if 2.0 * a * r > mc {
            return Err(Error::PreconditionViolated(format!(
                "component e{}: 2·α*·r = {} exceeds m = {mc}",
                c + 1,
                2.0 * a * r
            )));
        }
    }
    let xnorm = x.dnorm(cfg);
    // unit vectors computed in floating point may exceed r by an ulp or two
    if !xnorm.le_tol(&DPlus::real(r)?, 1e-12 * r) {
        return Err(Error::PreconditionViolated(format!("‖x‖_D = {xnorm} exceeds r = {r}")));
    }

    let eps_0 = xnorm.scale(1.0 / r);
    let eps_over_m = eps.div(&m)?;
    let eps_k = |k: usize| -> DPlus {
        if k == 0 {
            eps_0
        } else {
            eps_over_m.scale((-(k as f64)).exp2())
        }
    };
    let grid = r / (2.0 * (x.dim() as f64).sqrt());

    let mut epsilons = vec![eps_0];
    let mut x_terms = Vec::new();
    let mut remainders = Vec::new();
    let mut steps = Vec::new();
    let mut tail_bounds = Vec::new();
    let mut u = x.clone();
    let mut partial = BCVector::zeros(x.dim());
    let mut sum_p = DPlus::ZERO;
    let (mut term_m, mut rem_m, mut tail_m) = (Margin::NONE, Margin::NONE, Margin::NONE);
    let mut terminated_by = Termination::Cap;

    for k in 1..=max_n {
        let (prev, cur) = (eps_k(k - 1), eps_k(k));
        epsilons.push(cur);
        let pitch = [prev.a1().min(cur.a1()) * grid, prev.a2().min(cur.a2()) * grid];
        let xk = quantize(&u, pitch);
        let uk = &u - &xk;
        partial = &partial + &xk;

        let p_term = p.eval(&xk)?;
        let p_budget = prev * m;
        let remainder_norm = uk.dnorm(cfg);
        let remainder_bound = cur.scale(r);
        let tail_norm = (x - &partial).dnorm(cfg);
        term_m = term_m.min(margin(p_term, p_budget));
        rem_m = rem_m.min(margin(remainder_norm, remainder_bound));
        tail_m = tail_m.min(margin(tail_norm, remainder_bound));
        sum_p = sum_p + p_term;

        tail_bounds.push(remainder_bound);
        steps.push(ZabreikoStep {
            k,
            p_budget,
            p_term,
            remainder_bound,
            remainder_norm,
            tail_norm,
        });
        x_terms.push(xk);
        remainders.push(uk.clone());
        u = uk;
        if remainder_norm.a1() < MACHINE_FLOOR && remainder_norm.a2() < MACHINE_FLOOR {
            terminated_by = Termination::RemainderFloor;
            break;
        }
    }

    let p_x = p.eval(x)?;
    let final_bound = xnorm.scale(1.0 / r) * m + eps;
    let final_margin = margin(p_x, final_bound).min(margin(sum_p, m * eps_0 + eps));
    let final_bound_ok = final_margin.holds(VERIFY_TOL);
    let invariants_ok = term_m.holds(VERIFY_TOL) && rem_m.holds(VERIFY_TOL) && tail_m.holds(VERIFY_TOL);

    Ok(ZabreikoTrace {
        check: "zabreiko",
        inputs_digest: json::digest(&(p.operator(), x, m, Real(r), eps, max_n)),
        x_terms,
        remainders,
        epsilons,
        m,
        r,
        eps,
        alpha_star: alpha,
        steps,
        tail_bounds,
        terminated_by,
        term_margin: term_m,
        remainder_margin: rem_m,
        tail_margin: tail_m,
        p_x,
        sum_p,
        final_bound,
        final_margin,
        final_bound_ok,
        invariants_ok,
    })
}

// ---- uniform boundedness -------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UbpReport {
    pub check: &'static str,
    pub inputs_digest: String,
    pub seed: u64,
    pub family_size: usize,
    pub samples: usize,
    /// Supremum of the operator D-norms over the family.
    pub sup_opnorm: DPlus,
    /// Constant tested in `p*(x) ≤ δ·‖x‖_D`.
    pub bound_delta: DPlus,
    /// `p*(x) = sup_s p_s(x)` at each sample point, the witness first.
    pub pointwise_sups: Vec<DPlus>,
    /// Worst `p*(x) − p_s(x)`.
    pub member_margin: Margin,
    /// Worst `δ·‖x‖_D − p*(x)`.
    pub bound_margin: Margin,
    pub all_bounds_ok: bool,
}

fn check_family(family: &[BCMatrix]) -> Result<()> {
    let first = family.first().ok_or(Error::EmptySet)?;
    for t in family {
        if (t.rows(), t.cols()) != (first.rows(), first.cols()) {
            return Err(Error::ShapeMismatch(format!(
                "family mixes {}×{} and {}×{} operators",
                first.rows(),
                first.cols(),
                t.rows(),
                t.cols()
            )));
        }
    }
    Ok(())
}

/// Uniform bound for the seminorms `p_s(x) = ‖T_s x‖_D` of a finite family,
/// with `δ` the supremum of the operator D-norms.
pub fn ubp_verify(family: &[BCMatrix], samples: usize, seed: u64) -> Result<UbpReport> {
    ubp_verify_with(family, None, samples, seed)
}

/// [`ubp_verify`] against an arbitrary candidate `δ` (when given).
pub fn ubp_verify_with(
    family: &[BCMatrix],
    delta: Option<DPlus>,
    samples: usize,
    seed: u64,
) -> Result<UbpReport> {
    check_family(family)?;
    let norms = family
        .iter()
        .map(|t| dop::op_dnorm(t, SOLVE_TOL))
        .collect::<Result<Vec<_>>>()?;
    let sup = DPlus::sup(norms.iter().map(|r| r.m))?;
    let delta = delta.unwrap_or(sup);

    // In each component, the top singular vector of the operator attaining
    // the supremum.
    let argmax = |c: usize| {
        (0..norms.len())
            .max_by(|&a, &b| norms[a].sigma_max[c].total_cmp(&norms[b].sigma_max[c]).then(b.cmp(&a)))
            .expect("nonempty family")
    };
    let (s1, s2) = (argmax(0), argmax(1));
    let witness = BCVector::raw(norms[s1].witness.v1().clone(), norms[s2].witness.v2().clone());
    let n = family[0].cols();

    let per_point = (0..=samples)
        .into_par_iter()
        .map(|i| -> Result<(DPlus, Margin, Margin)> {
            let x = if i == 0 {
                witness.clone()
            } else {
                sampling::vector(&mut sampling::trial_rng(seed, i as u64), n)
            };
            let values = family
                .iter()
                .map(|t| Ok(t.apply(&x)?.dnorm(DNormConfig::L2)))
                .collect::<Result<Vec<_>>>()?;
            let p_star = DPlus::sup(values.iter().copied())?;
            let member = fold_margins(values.iter().map(|&v| margin(v, p_star)));
            let bound = margin(p_star, delta * x.dnorm(DNormConfig::L2));
            Ok((p_star, member, bound))
        })
        .collect::<Result<Vec<_>>>()?;

    let member_margin = fold_margins(per_point.iter().map(|o| o.1));
    let bound_margin = fold_margins(per_point.iter().map(|o| o.2));
    Ok(UbpReport {
        check: "ubp",
        inputs_digest: json::digest(&(family, delta, samples, seed)),
        seed,
        family_size: family.len(),
        samples: per_point.len(),
        sup_opnorm: sup,
        bound_delta: delta,
        pointwise_sups: per_point.iter().map(|o| o.0).collect(),
        member_margin,
        bound_margin,
        all_bounds_ok: member_margin.holds(VERIFY_TOL) && bound_margin.holds(VERIFY_TOL),
    })
}

// ---- open mapping ------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpenMappingVerifyReport {
    pub check: &'static str,
    pub inputs_digest: String,
    pub seed: u64,
    pub trials: usize,
    pub delta: DPlus,
    pub operator_norm: DPlus,
    /// Largest `‖Tx − y‖_D` over the trials.
    pub max_residual: DPlus,
    /// Worst `δ·‖y‖_D − ‖x‖_D`.
    pub bound_margin: Margin,
    /// `‖x‖_D / (δ·‖y‖_D)` per component for the bottom-singular-vector witness.
    #[serde(serialize_with = "json::reals")]
    pub witness_ratio: [f64; 2],
    pub minimal: bool,
    pub eps: DPlus,
    pub q_terms: usize,
    /// Worst margin over the quotient chain
    /// `q(Σy_k) ≤ ‖Σx_k‖_D ≤ Σ‖x_k‖_D ≤ Σq(y_k) + ε` and `‖x_k‖_D ≤ q(y_k) + ε_k`.
    pub q_chain_margin: Margin,
    pub q_subadditive: bool,
    pub pass: bool,
}

/// A unit vector (per component) in the kernel of `T`, or zero where the
/// kernel is trivial.
fn kernel_direction(t: &BCMatrix, rng: &mut sampling::TrialRng) -> Result<BCVector> {
    let z = sampling::vector(rng, t.cols());
    let tz = t.apply(&z)?;
    let back = dop::min_norm_solve(t, &tz, SOLVE_TOL)?.x;
    let k = &z - &back;
    let norms = k.dnorm(DNormConfig::L2);
    let inv = |n: f64, zn: f64| if n > 1e-8 * zn.max(1.0) { 1.0 / n } else { 0.0 };
    let zn = z.dnorm(DNormConfig::L2);
    Ok(k.scale_components(inv(norms.a1(), zn.a1()), inv(norms.a2(), zn.a2())))
}

/// Solve-and-bound for random right-hand sides, minimality of `δ`, and
/// countable subadditivity of `q(y) = inf{‖x‖_D : Tx = y}` with the budget
/// `ε = Σ ε/2^k`.
pub fn open_mapping_verify(t: &BCMatrix, trials: usize, seed: u64, eps: DPlus) -> Result<OpenMappingVerifyReport> {
    require(trials >= 1, "trials must be ≥ 1")?;
    if !eps.is_strictly_positive() {
        return Err(Error::NotStrictlyPositive { a1: eps.a1(), a2: eps.a2() });
    }
    let om = dop::open_mapping_report(t, SOLVE_TOL)?;
    let delta = om.delta;
    let operator_norm = dop::op_dnorm(t, SOLVE_TOL)?.m;
    let rows = t.rows();

    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(DPlus, Margin)> {
            let y = if i == 0 {
                om.witness.clone()
            } else {
                sampling::vector(&mut sampling::trial_rng(seed, i as u64), rows)
            };
            let sol = dop::min_norm_solve(t, &y, SOLVE_TOL)?;
            Ok((sol.residual, margin(sol.qy, delta * y.dnorm(DNormConfig::L2))))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_residual = DPlus::sup(outcomes.iter().map(|o| o.0))?;
    let bound_margin = fold_margins(outcomes.iter().map(|o| o.1));

    let w = dop::min_norm_solve(t, &om.witness, SOLVE_TOL)?;
    let wy = om.witness.dnorm(DNormConfig::L2);
    let witness_ratio = [
        w.qy.a1() / (delta.a1() * wy.a1()),
        w.qy.a2() / (delta.a2() * wy.a2()),
    ];
    let minimal = witness_ratio.iter().all(|&q| q >= 1.0 - 1e-6);

    // Quotient seminorm on a convergent series y_k = 2^{-k}·g_k. Each x_k is
    // a near-optimal preimage: the minimum-norm solution pushed along the
    // kernel until ‖x_k‖ sits halfway into the ε_k slack.
    let mut rng = sampling::trial_rng(seed, trials as u64 + 1);
    let mut y_sum = BCVector::zeros(rows);
    let mut x_sum = BCVector::zeros(t.cols());
    let mut norm_sum = DPlus::ZERO;
    let mut q_sum = DPlus::ZERO;
    let mut chain = Margin::NONE;
    for k in 1..=QUOTIENT_SERIES_LEN {
        let scale = (-(k as f64)).exp2();
        let yk = sampling::vector(&mut rng, rows).scale_real(scale);
        let eps_k = eps.scale(scale);
        let sol = dop::min_norm_solve(t, &yk, SOLVE_TOL)?;
        let q = sol.qy;
        let dir = kernel_direction(t, &mut rng)?;
        let push = |qc: f64, ec: f64| 0.5 * ((qc + ec).powi(2) - qc * qc).sqrt();
        let xk = &sol.x + &dir.scale_components(push(q.a1(), eps_k.a1()), push(q.a2(), eps_k.a2()));
        let xk_norm = xk.dnorm(DNormConfig::L2);
        chain = chain.min(margin(xk_norm, q + eps_k));
        y_sum = &y_sum + &yk;
        x_sum = &x_sum + &xk;
        norm_sum = norm_sum + xk_norm;
        q_sum = q_sum + q;
    }
    let q_y = dop::min_norm_solve(t, &y_sum, SOLVE_TOL)?.qy;
    let x_norm = x_sum.dnorm(DNormConfig::L2);
    let image_gap = (&t.apply(&x_sum)? - &y_sum).dnorm(DNormConfig::L2);
    chain = chain
        .min(margin(q_y, x_norm))
        .min(margin(x_norm, norm_sum))
        .min(margin(norm_sum, q_sum + eps))
        .min(margin(q_y, q_sum + eps))
        .min(margin(image_gap, DPlus::ZERO));
    let q_subadditive = chain.holds(1e-8);

    let residual_ok = max_residual.le_tol(&DPlus::ZERO, VERIFY_TOL);
    let pass = residual_ok && bound_margin.holds(VERIFY_TOL) && minimal && q_subadditive;
    Ok(OpenMappingVerifyReport {
        check: "omt-verify",
        inputs_digest: json::digest(&(t, trials, seed, eps)),
        seed,
        trials,
        delta,
        operator_norm,
        max_residual,
        bound_margin,
        witness_ratio,
        minimal,
        eps,
        q_terms: QUOTIENT_SERIES_LEN,
        q_chain_margin: chain,
        q_subadditive,
        pass,
    })
}
