//! Reference computations that share no numerical code with the library:
//! bicomplex products from the multiplication table of `1, i, j, k`, power and
//! inverse iteration on Gram matrices, Gaussian elimination, and brute-force
//! sampling. Matrices are copied out of the library's containers into plain
//! row-major vectors before anything is computed.
#![allow(dead_code)]

use num_complex::Complex64 as C;

use hyplab::{BCMatrix, BCVector};

/// `(sign, basis index)` of the product of basis elements `1, i, j, k`.
const TABLE: [[(f64, usize); 4]; 4] = [
    [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
    [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
    [(1.0, 2), (1.0, 3), (-1.0, 0), (-1.0, 1)],
    [(1.0, 3), (-1.0, 2), (-1.0, 1), (1.0, 0)],
];

/// Product of `a0 + a1·i + a2·j + a3·k` and `b0 + …` straight from the table.
pub fn table_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for p in 0..4 {
        for q in 0..4 {
            let (sign, idx) = TABLE[p][q];
            out[idx] += sign * a[p] * b[q];
        }
    }
    out
}

pub fn real4_norm(a: [f64; 4]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<C>,
}

impl Dense {
    pub fn at(&self, i: usize, j: usize) -> C {
        self.a[i * self.cols + j]
    }

    pub fn apply(&self, x: &[C]) -> Vec<C> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * x[j]).sum())
            .collect()
    }

    pub fn adjoint_apply(&self, y: &[C]) -> Vec<C> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.at(i, j).conj() * y[i]).sum())
            .collect()
    }

    /// `A·Aᴴ` (rows × rows).
    pub fn gram_rows(&self) -> Dense {
        let n = self.rows;
        let mut a = vec![C::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                a[i * n + k] = (0..self.cols).map(|j| self.at(i, j) * self.at(k, j).conj()).sum();
            }
        }
        Dense { rows: n, cols: n, a }
    }
}

/// The two idempotent components of a bicomplex matrix.
pub fn components(t: &BCMatrix) -> [Dense; 2] {
    let grab = |c: usize| {
        let mut a = Vec::with_capacity(t.rows() * t.cols());
        for i in 0..t.rows() {
            for j in 0..t.cols() {
                let e = t.entry(i, j);
                a.push(if c == 0 { e.z1() } else { e.z2() });
            }
        }
        Dense { rows: t.rows(), cols: t.cols(), a }
    };
    [grab(0), grab(1)]
}

pub fn vec_components(v: &BCVector) -> [Vec<C>; 2] {
    let e = v.entries();
    [e.iter().map(|z| z.z1()).collect(), e.iter().map(|z| z.z2()).collect()]
}

pub fn l2(x: &[C]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(x: &mut [C]) -> f64 {
    let n = l2(x);
    for z in x.iter_mut() {
        *z /= n;
    }
    n
}

fn start_vector(n: usize) -> Vec<C> {
    (0..n)
        .map(|k| C::new(1.0 + 0.37 * k as f64, 0.21 - 0.13 * (k * k) as f64))
        .collect()
}

/// Largest singular value by power iteration on `AᴴA`, with the Rayleigh
/// quotient as the estimate.
pub fn sigma_max_power(m: &Dense, iters: usize) -> f64 {
    if m.a.iter().all(|z| *z == C::new(0.0, 0.0)) {
        return 0.0;
    }
    let mut x = start_vector(m.cols);
    normalize(&mut x);
    let mut est = 0.0;
    for _ in 0..iters {
        let y = m.adjoint_apply(&m.apply(&x));
        let rq: f64 = x.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum();
        est = rq.max(0.0).sqrt();
        x = y;
        if normalize(&mut x) == 0.0 {
            return 0.0;
        }
    }
    est
}

/// Solves `G·z = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(g: &Dense, b: &[C]) -> Option<Vec<C>> {
    let n = g.rows;
    let mut a = g.a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&p, &q| a[p * n + col].norm().total_cmp(&a[q * n + col].norm()))?;
        if a[piv * n + col].norm() == 0.0 {
            return None;
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
            }
            rhs.swap(piv, col);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            for j in col..n {
                let v = a[col * n + j];
                a[r * n + j] -= f * v;
            }
            let v = rhs[col];
            rhs[r] -= f * v;
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let s: C = (r + 1..n).map(|j| a[r * n + j] * x[j]).sum();
        x[r] = (rhs[r] - s) / a[r * n + r];
    }
    Some(x)
}

/// Minimum-norm solution of a full-row-rank system through the normal
/// equations: `x = Aᴴ (A Aᴴ)^{-1} y`.
pub fn normal_equations_solve(m: &Dense, y: &[C]) -> Option<Vec<C>> {
    let z = gauss_solve(&m.gram_rows(), y)?;
    Some(m.adjoint_apply(&z))
}

/// Smallest singular value of a full-row-rank matrix: inverse iteration on
/// `A Aᴴ`, Rayleigh quotient at the end.
pub fn sigma_min_rows(m: &Dense, iters: usize) -> Option<f64> {
    let g = m.gram_rows();
    let mut x = start_vector(m.rows);
    normalize(&mut x);
    for _ in 0..iters {
        x = gauss_solve(&g, &x)?;
        normalize(&mut x);
    }
    let gx = g.apply(&x);
    let rq: f64 = x.iter().zip(&gx).map(|(a, b)| (a.conj() * b).re).sum();
    Some(rq.max(0.0).sqrt())
}

/// Brute-force `sup ‖A x‖ / ‖x‖` over the supplied directions.
pub fn sampled_sup(m: &Dense, dirs: &[Vec<C>]) -> f64 {
    dirs.iter().map(|x| l2(&m.apply(x)) / l2(x)).fold(0.0, f64::max)
}

/// `(‖T₁x₁‖, ‖T₂x₂‖)` computed from scratch.
pub fn seminorm(t: &BCMatrix, x: &BCVector) -> [f64; 2] {
    let [a, b] = components(t);
    let [x1, x2] = vec_components(x);
    [l2(&a.apply(&x1)), l2(&b.apply(&x2))]
}

pub fn dnorm(x: &BCVector) -> [f64; 2] {
    let [x1, x2] = vec_components(x);
    [l2(&x1), l2(&x2)]
}

/// Least upper bound of a finite set in the product order, by searching all
/// candidate pairs drawn from the set's own coordinates for the smallest
/// upper bound.
pub fn brute_force_lub(items: &[[f64; 2]]) -> [f64; 2] {
    let xs: Vec<f64> = items.iter().map(|p| p[0]).collect();
    let ys: Vec<f64> = items.iter().map(|p| p[1]).collect();
    let mut best: Option<[f64; 2]> = None;
    for &x in &xs {
        for &y in &ys {
            if items.iter().all(|p| p[0] <= x && p[1] <= y) {
                best = Some(match best {
                    None => [x, y],
                    Some(b) => {
                        // every upper bound must dominate the least one
                        if x <= b[0] && y <= b[1] {
                            [x, y]
                        } else {
                            b
                        }
                    }
                });
            }
        }
    }
    best.expect("nonempty set")
}

/// Re-derives every inequality of a Zabreiko trace from the stored terms and
/// remainders alone: the recurrence `u_k = u_{k−1} − x_k`, the budgets
/// `p(x_k) ≤ ε_{k−1}·m`, `‖u_k‖ ≤ ε_k·r`, the tail `‖x − Σx_j‖ ≤ (ε·r/m)·2^{-k}`
/// and the final bound `p(x) ≤ (m/r)‖x‖ + ε`, with `ε_k` recomputed here.
pub fn replay_zabreiko(
    t: &BCMatrix,
    x: &BCVector,
    m: [f64; 2],
    r: f64,
    eps: [f64; 2],
    trace: &hyplab::theoremlab::ZabreikoTrace,
    tol: f64,
) -> Result<usize, String> {
    let n = trace.x_terms.len();
    if trace.remainders.len() != n || n == 0 {
        return Err(format!("{n} terms but {} remainders", trace.remainders.len()));
    }
    let [x1, x2] = vec_components(x);
    let xs = [x1, x2];
    let xnorm = dnorm(x);
    let eps_k = |k: usize, c: usize| {
        if k == 0 {
            xnorm[c] / r
        } else {
            eps[c] / (m[c] * 2f64.powi(k as i32))
        }
    };
    let mut checked = 0;
    let mut prev = xs.clone();
    let mut partial = [vec![C::new(0.0, 0.0); x.dim()], vec![C::new(0.0, 0.0); x.dim()]];
    let mut sum_p = [0.0; 2];
    for k in 1..=n {
        let xk = vec_components(&trace.x_terms[k - 1]);
        let uk = vec_components(&trace.remainders[k - 1]);
        let pk = seminorm(t, &trace.x_terms[k - 1]);
        for c in 0..2 {
            for i in 0..x.dim() {
                if prev[c][i] - xk[c][i] != uk[c][i] {
                    return Err(format!("step {k}: u_k ≠ u_(k-1) − x_k at ({c}, {i})"));
                }
                partial[c][i] += xk[c][i];
            }
            let budget = eps_k(k - 1, c) * m[c];
            if pk[c] > budget + tol {
                return Err(format!("step {k} e{}: p(x_k) = {} > ε_(k-1)·m = {budget}", c + 1, pk[c]));
            }
            let bound = eps_k(k, c) * r;
            let un = l2(&uk[c]);
            if un > bound + tol {
                return Err(format!("step {k} e{}: ‖u_k‖ = {un} > ε_k·r = {bound}", c + 1));
            }
            let tail: Vec<C> = xs[c].iter().zip(&partial[c]).map(|(a, b)| a - b).collect();
            let tail_bound = eps[c] * r / m[c] * 0.5f64.powi(k as i32);
            if l2(&tail) > tail_bound + tol {
                return Err(format!("step {k} e{}: tail {} > {tail_bound}", c + 1, l2(&tail)));
            }
            sum_p[c] += pk[c];
            checked += 3;
        }
        prev = uk;
    }
    let px = seminorm(t, x);
    for c in 0..2 {
        let fin = m[c] / r * xnorm[c] + eps[c];
        if px[c] > fin + tol {
            return Err(format!("e{}: p(x) = {} > (m/r)‖x‖ + ε = {fin}", c + 1, px[c]));
        }
        if sum_p[c] > m[c] * eps_k(0, c) + eps[c] + tol {
            return Err(format!("e{}: Σp(x_k) = {} exceeds m·ε_0 + ε", c + 1, sum_p[c]));
        }
        checked += 2;
    }
    Ok(checked)
}
