//! BC-linear operators on finite bicomplex modules.
//!
//! A bicomplex matrix is stored as its two complex idempotent components
//! `(m1, m2)`. Application, the operator D-norm, minimum-norm solves and the
//! open-mapping constant all split into independent problems on `m1` and
//! `m2`, each solved with the ℓ2 singular value decomposition.

mod svd;

pub use svd::{sigma_extremes, svd, Svd, MAX_SWEEPS};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dmodule::{BCVector, DNormConfig};
use crate::error::{Error, Result};
use crate::hyperscalar::{Bicomplex, DPlus};

/// Singular values above `RANK_TOL·σmax` count as nonzero in solves.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct BCMatrix {
    m1: DMatrix<Complex64>,
    m2: DMatrix<Complex64>,
}

impl BCMatrix {
    pub fn new(m1: DMatrix<Complex64>, m2: DMatrix<Complex64>) -> Result<Self> {
        if m1.shape() != m2.shape() {
            return Err(Error::ShapeMismatch(format!(
                "components {:?} and {:?}",
                m1.shape(),
                m2.shape()
            )));
        }
        if m1.nrows() == 0 || m1.ncols() == 0 {
            return Err(Error::InvalidArgument("matrix must be at least 1×1".into()));
        }
        if m1.iter().chain(m2.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entry"));
        }
        Ok(Self { m1, m2 })
    }

    /// Row-major entries.
    pub fn from_entries(rows: usize, cols: usize, entries: &[Bicomplex]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}×{cols} matrix",
                entries.len()
            )));
        }
        Self::new(
            DMatrix::from_row_iterator(rows, cols, entries.iter().map(|b| b.z1())),
            DMatrix::from_row_iterator(rows, cols, entries.iter().map(|b| b.z2())),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m1: DMatrix::identity(n, n),
            m2: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            m1: DMatrix::zeros(rows, cols),
            m2: DMatrix::zeros(rows, cols),
        }
    }

    /// `diag(d_1, …, d_n)`.
    pub fn diagonal(d: &[Bicomplex]) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|b| b.z1()))),
            DMatrix::from_diagonal(&DVector::from_iterator(d.len(), d.iter().map(|b| b.z2()))),
        )
    }

    pub fn rows(&self) -> usize {
        self.m1.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m1.ncols()
    }

    pub fn m1(&self) -> &DMatrix<Complex64> {
        &self.m1
    }

    pub fn m2(&self) -> &DMatrix<Complex64> {
        &self.m2
    }

    pub fn components(&self) -> [&DMatrix<Complex64>; 2] {
        [&self.m1, &self.m2]
    }

    pub fn entry(&self, i: usize, j: usize) -> Bicomplex {
        Bicomplex::raw(self.m1[(i, j)], self.m2[(i, j)])
    }

    /// `μ·T`.
    pub fn scale(&self, mu: &Bicomplex) -> BCMatrix {
        Self {
            m1: &self.m1 * mu.z1(),
            m2: &self.m2 * mu.z2(),
        }
    }

    pub fn apply(&self, x: &BCVector) -> Result<BCVector> {
        x.check_dim(self.cols())?;
        Ok(BCVector::raw(&self.m1 * x.v1(), &self.m2 * x.v2()))
    }
}

pub fn mat_apply(t: &BCMatrix, x: &BCVector) -> Result<BCVector> {
    t.apply(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    FullDecomposition,
    PowerIteration,
}

/// The least constant `M` with `‖Tx‖_D ≤ M·‖x‖_D`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct OperatorNormReport {
    pub m: DPlus,
    #[serde(serialize_with = "crate::json::reals")]
    pub sigma_max: [f64; 2],
    pub method: NormMethod,
    pub iterations: usize,
    #[serde(serialize_with = "crate::json::real")]
    pub tol: f64,
    /// Top right singular vector of each component; `‖T w‖_D = M·‖w‖_D`.
    pub witness: BCVector,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument("tolerance must be > 0".into()))
    }
}

fn svd_pair(t: &BCMatrix) -> Result<[Svd; 2]> {
    Ok([svd(&t.m1)?, svd(&t.m2)?])
}

pub fn op_dnorm(t: &BCMatrix, tol: f64) -> Result<OperatorNormReport> {
    op_dnorm_with(t, DNormConfig::L2, tol)
}

/// Operator D-norm; only ℓ2 component norms are supported.
pub fn op_dnorm_with(t: &BCMatrix, cfg: DNormConfig, tol: f64) -> Result<OperatorNormReport> {
    check_tol(tol)?;
    if cfg != DNormConfig::L2 {
        return Err(Error::InvalidArgument(
            "operator D-norm is implemented for the l2 component norm only".into(),
        ));
    }
    let [d1, d2] = svd_pair(t)?;
    let sigma_max = [d1.sigma_max(), d2.sigma_max()];
    let witness = BCVector::raw(d1.v.column(0).into_owned(), d2.v.column(0).into_owned());
    Ok(OperatorNormReport {
        m: DPlus::raw(sigma_max[0], sigma_max[1]),
        sigma_max,
        method: NormMethod::FullDecomposition,
        iterations: d1.sweeps + d2.sweeps,
        tol,
        witness,
    })
}

/// Minimum-norm preimage of `y`; `qy = ‖x‖_D` is the quotient seminorm
/// `q(y) = inf{‖x‖_D : Tx = y}`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SolveReport {
    pub x: BCVector,
    pub qy: DPlus,
    pub residual: DPlus,
}

fn pinv_apply(d: &Svd, y: &DVector<Complex64>) -> DVector<Complex64> {
    let cutoff = RANK_TOL * d.sigma_max();
    let mut x = DVector::zeros(d.v.nrows());
    for (j, &s) in d.singular_values.iter().enumerate() {
        if s > cutoff {
            let coef = d.u.column(j).dotc(y) / s;
            x += d.v.column(j) * coef;
        }
    }
    x
}

/// Per-component minimum-ℓ2-norm solution of `Tx = y`. The residual must
/// satisfy `‖Tx − y‖ ≤ tol·max(1, ‖y‖)` in each component, otherwise `y` is
/// not in the range of `T`.
pub fn min_norm_solve(t: &BCMatrix, y: &BCVector, tol: f64) -> Result<SolveReport> {
    check_tol(tol)?;
    y.check_dim(t.rows())?;
    let [d1, d2] = svd_pair(t)?;
    let x = BCVector::raw(pinv_apply(&d1, y.v1()), pinv_apply(&d2, y.v2()));
    let residual = (&t.apply(&x)? - y).dnorm(DNormConfig::L2);
    let ynorm = y.dnorm(DNormConfig::L2);
    if residual.a1() > tol * ynorm.a1().max(1.0) || residual.a2() > tol * ynorm.a2().max(1.0) {
        return Err(Error::NotInRange {
            r1: residual.a1(),
            r2: residual.a2(),
        });
    }
    Ok(SolveReport {
        qy: x.dnorm(DNormConfig::L2),
        x,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct RankReport {
    pub surjective: bool,
    pub rows: usize,
    pub ranks: [usize; 2],
    #[serde(serialize_with = "crate::json::reals")]
    pub sigma_max: [f64; 2],
    #[serde(serialize_with = "crate::json::reals")]
    pub sigma_min: [f64; 2],
    #[serde(serialize_with = "crate::json::real")]
    pub tol: f64,
}

/// `T` maps onto `BC^rows` iff both components have full row rank.
pub fn surjectivity_check(t: &BCMatrix, tol: f64) -> Result<RankReport> {
    check_tol(tol)?;
    let [d1, d2] = svd_pair(t)?;
    Ok(rank_report(t, &d1, &d2, tol))
}

fn rank_report(t: &BCMatrix, d1: &Svd, d2: &Svd, tol: f64) -> RankReport {
    let ranks = [d1.rank(tol), d2.rank(tol)];
    RankReport {
        surjective: ranks[0] == t.rows() && ranks[1] == t.rows(),
        rows: t.rows(),
        ranks,
        sigma_max: [d1.sigma_max(), d2.sigma_max()],
        sigma_min: [d1.sigma_min(), d2.sigma_min()],
        tol,
    }
}

/// Open-mapping constant with the witness that makes it least.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct OpenMappingReport {
    pub delta: DPlus,
    pub rank: RankReport,
    /// Bottom left singular vector of each component; its minimum-norm
    /// preimage has `‖x‖_D = δ·‖y‖_D`.
    pub witness: BCVector,
}

pub fn open_mapping_report(t: &BCMatrix, tol: f64) -> Result<OpenMappingReport> {
    check_tol(tol)?;
    let [d1, d2] = svd_pair(t)?;
    let rank = rank_report(t, &d1, &d2, tol);
    if !rank.surjective {
        return Err(Error::NotSurjective {
            rank1: rank.ranks[0],
            rank2: rank.ranks[1],
            rows: rank.rows,
        });
    }
    // Surjective means rows ≤ cols, so U is rows×rows and its last column
    // pairs with σmin.
    let last = t.rows() - 1;
    let witness = BCVector::raw(d1.u.column(last).into_owned(), d2.u.column(last).into_owned());
    Ok(OpenMappingReport {
        delta: DPlus::new(1.0 / rank.sigma_min[0], 1.0 / rank.sigma_min[1])?,
        rank,
        witness,
    })
}

/// `δ = e1/σmin(m1) + e2/σmin(m2)`: every `y` has a preimage with
/// `‖x‖_D ≤ δ·‖y‖_D`.
pub fn open_mapping_delta(t: &BCMatrix, tol: f64) -> Result<DPlus> {
    open_mapping_report(t, tol).map(|r| r.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperscalar::Hyperbolic;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn h(a1: f64, a2: f64) -> Bicomplex {
        Bicomplex::from(Hyperbolic::new(a1, a2).unwrap())
    }

    fn row_ones() -> BCMatrix {
        BCMatrix::from_entries(1, 2, &[Bicomplex::ONE, Bicomplex::ONE]).unwrap()
    }

    fn sample_vector() -> BCVector {
        BCVector::new(
            DVector::from_row_slice(&[c(1.0, -2.0), c(0.5, 0.0), c(0.0, 3.0)]),
            DVector::from_row_slice(&[c(-1.0, 1.0), c(2.0, 2.0), c(0.25, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn apply_identity_and_zero() {
        let x = sample_vector();
        assert_eq!(mat_apply(&BCMatrix::identity(3), &x).unwrap(), x);
        assert!(mat_apply(&BCMatrix::zeros(2, 3), &x).unwrap().is_zero());
        assert!(matches!(
            mat_apply(&BCMatrix::identity(2), &x),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(BCMatrix::new(DMatrix::zeros(2, 2), DMatrix::zeros(2, 3)).is_err());
        assert!(BCMatrix::new(DMatrix::zeros(0, 2), DMatrix::zeros(0, 2)).is_err());
        assert!(BCMatrix::from_entries(2, 2, &[Bicomplex::ONE]).is_err());
    }

    #[test]
    fn scalar_operator_norm() {
        let t = BCMatrix::from_entries(1, 1, &[h(2.0, 3.0)]).unwrap();
        let r = op_dnorm(&t, 1e-10).unwrap();
        assert_eq!(r.m, DPlus::new(2.0, 3.0).unwrap());
        assert_eq!(r.method, NormMethod::FullDecomposition);
    }

    #[test]
    fn diagonal_operator_norm() {
        let t = BCMatrix::diagonal(&[h(1.0, 3.0), h(2.0, 4.0)]).unwrap();
        let r = op_dnorm(&t, 1e-10).unwrap();
        assert_eq!(r.m, DPlus::new(2.0, 4.0).unwrap());
        let image = t.apply(&r.witness).unwrap().dnorm(DNormConfig::L2);
        assert_eq!(image, r.m);
    }

    #[test]
    fn op_dnorm_rejects_other_norms() {
        let cfg = DNormConfig {
            component_norm: crate::dmodule::ComponentNorm::L1,
        };
        assert!(op_dnorm_with(&BCMatrix::identity(2), cfg, 1e-10).is_err());
        assert!(op_dnorm(&BCMatrix::identity(2), -1.0).is_err());
    }

    #[test]
    fn solve_identity() {
        let y = sample_vector();
        let r = min_norm_solve(&BCMatrix::identity(3), &y, 1e-10).unwrap();
        assert_eq!(r.x, y);
        assert_eq!(r.qy, y.dnorm(DNormConfig::L2));
        assert_eq!(r.residual, DPlus::ZERO);
    }

    #[test]
    fn solve_symmetric_row() {
        let y = BCVector::from_entries(&[Bicomplex::ONE * 2.0]).unwrap();
        let r = min_norm_solve(&row_ones(), &y, 1e-10).unwrap();
        for z in r.x.v1().iter().chain(r.x.v2().iter()) {
            assert!((z - c(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((r.qy.a1() - 2f64.sqrt()).abs() < 1e-14);
        assert!((r.qy.a2() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn solve_not_in_range() {
        // m2 = 0 so any y with a nonzero e2 part is unreachable
        let t = BCMatrix::new(DMatrix::identity(2, 2), DMatrix::zeros(2, 2)).unwrap();
        let y = BCVector::from_entries(&[Bicomplex::ONE, Bicomplex::ZERO]).unwrap();
        assert!(matches!(min_norm_solve(&t, &y, 1e-10), Err(Error::NotInRange { .. })));
        let y1 = BCVector::from_entries(&[Bicomplex::E1, Bicomplex::E1]).unwrap();
        assert!(min_norm_solve(&t, &y1, 1e-10).is_ok());
    }

    #[test]
    fn open_mapping_examples() {
        assert_eq!(open_mapping_delta(&BCMatrix::identity(3), 1e-10).unwrap(), DPlus::ONE);
        let two = BCMatrix::identity(3).scale(&(Bicomplex::ONE * 2.0));
        assert_eq!(open_mapping_delta(&two, 1e-10).unwrap(), DPlus::real(0.5).unwrap());
        let d = open_mapping_delta(&row_ones(), 1e-10).unwrap();
        assert!((d.a1() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d.a2() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn surjectivity_examples() {
        assert!(surjectivity_check(&BCMatrix::identity(2), 1e-10).unwrap().surjective);
        let z = surjectivity_check(&BCMatrix::zeros(2, 3), 1e-10).unwrap();
        assert!(!z.surjective);
        assert_eq!(z.ranks, [0, 0]);
        // m1 full rank, m2 of rank 1
        let m2 = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let t = BCMatrix::new(DMatrix::identity(2, 2), m2).unwrap();
        let r = surjectivity_check(&t, 1e-10).unwrap();
        assert_eq!(r.ranks, [2, 1]);
        assert!(!r.surjective);
        assert!(matches!(open_mapping_delta(&t, 1e-10), Err(Error::NotSurjective { .. })));
        // a tall matrix of full column rank is still not onto
        let tall = BCMatrix::new(DMatrix::identity(3, 2), DMatrix::identity(3, 2)).unwrap();
        let r = surjectivity_check(&tall, 1e-10).unwrap();
        assert_eq!(r.ranks, [2, 2]);
        assert!(!r.surjective);
    }
}
