//! Singular value decomposition of dense complex matrices by one-sided
//! (Hestenes) Jacobi rotations.
//!
//! Columns of the working matrix are rotated pairwise until every pair is
//! numerically orthogonal; the column norms are then the singular values and
//! the accumulated rotations form `V`. Wide matrices are handled through
//! their adjoint so the spectrum always has `min(rows, cols)` entries.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 60;

/// `A = U·diag(σ)·Vᴴ` with `U: rows×p`, `V: cols×p`, `p = min(rows, cols)`,
/// and `σ` sorted in descending order. Columns of `U` belonging to a zero
/// singular value are left as zero vectors.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<Complex64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<Complex64>,
    pub sweeps: usize,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    /// Singular values above `rel_tol·σmax`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cutoff = rel_tol * self.sigma_max();
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }
}

pub fn svd(a: &DMatrix<Complex64>) -> Result<Svd> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if a.nrows() >= a.ncols() {
        jacobi_tall(a.clone())
    } else {
        // A = (Aᴴ)ᴴ = (U_b Σ V_bᴴ)ᴴ = V_b Σ U_bᴴ
        let b = jacobi_tall(a.adjoint())?;
        Ok(Svd {
            u: b.v,
            singular_values: b.singular_values,
            v: b.u,
            sweeps: b.sweeps,
        })
    }
}

/// Largest and smallest singular values. Values at or below `tol·σmax` are
/// reported as exactly zero.
pub fn sigma_extremes(a: &DMatrix<Complex64>, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be > 0".into()));
    }
    let d = svd(a)?;
    let smax = d.sigma_max();
    let smin = d.sigma_min();
    Ok((smax, if smin <= tol * smax { 0.0 } else { smin }))
}

fn jacobi_tall(mut w: DMatrix<Complex64>) -> Result<Svd> {
    let (m, n) = w.shape();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let threshold = f64::EPSILON * (m as f64).sqrt().max(1.0);

    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    let (xp, xq) = (w[(i, p)], w[(i, q)]);
                    alpha += xp.norm_sqr();
                    beta += xq.norm_sqr();
                    gamma += xp.conj() * xq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rephasing column q by conj(γ/|γ|) makes the pair's inner
                // product real; the rest is the real Jacobi rotation.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: sweeps });
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let mut u = DMatrix::<Complex64>::zeros(m, n);
    let mut vs = DMatrix::<Complex64>::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        sigma.push(s);
        if s > 0.0 {
            u.set_column(dst, &(w.column(src) / Complex64::new(s, 0.0)));
        }
        vs.set_column(dst, &v.column(src));
    }
    Ok(Svd {
        u,
        singular_values: sigma,
        v: vs,
        sweeps,
    })
}

fn rotate(a: &mut DMatrix<Complex64>, p: usize, q: usize, phase: Complex64, c: f64, s: f64) {
    for i in 0..a.nrows() {
        let xp = a[(i, p)];
        let xq = a[(i, q)] * phase;
        a[(i, p)] = xp * c - xq * s;
        a[(i, q)] = xp * s + xq * c;
    }
}
