//! Revised primal simplex on the dual of the max-min LP.
//!
//! The max-min problem `max m` s.t. `m + sum_j L_ij c_j <= x_i`, `c >= 0`
//! has the dual
//!
//! ```text
//! min sum_i x_i y_i   s.t.   sum_i y_i = 1,   sum_i L_ij y_i - s_j = 0,   y, s >= 0
//! ```
//!
//! whose basis has only `J + 1` columns however many control points there
//! are. The simplex multipliers of the optimal basis are `(m, c_1, .., c_J)`.

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{MaxMinProblem, OptError};

const PIVOT_TOL: f64 = 1e-9;
const REFRESH_EVERY: usize = 64;
const DEGENERATE_RUN: usize = 24;
const MAX_PIVOTS: usize = 100_000;
/// Problems up to this many rows and columns get an exact rational recheck.
const EXACT_ROWS: usize = 16;
const EXACT_POINTS: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Y(usize),
    S(usize),
    Art,
}

pub(super) struct Outcome {
    pub pi: Vec<f64>,
    pub pivots: usize,
    pub certified: Option<bool>,
}

struct Tableau<'a> {
    prob: &'a MaxMinProblem,
    rows: usize,
    basis: Vec<Var>,
    /// Membership flags: `y_i` at `i`, `s_j` at `N + j - 1`.
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pivots: usize,
    since_refresh: usize,
}

impl<'a> Tableau<'a> {
    fn new(prob: &'a MaxMinProblem) -> Self {
        let rows = prob.num_polys() + 1;
        let mut basis = vec![Var::Art];
        basis.extend((1..rows).map(Var::S));
        // Column of s_j is -e_j, so B is diag(1, -1, ..., -1) and its own inverse.
        let mut binv = vec![0.0; rows * rows];
        for r in 0..rows {
            binv[r * rows + r] = if r == 0 { 1.0 } else { -1.0 };
        }
        let mut xb = vec![0.0; rows];
        xb[0] = 1.0;
        let mut in_basis = vec![false; prob.num_points() + rows - 1];
        for j in 1..rows {
            in_basis[prob.num_points() + j - 1] = true;
        }
        Tableau {
            prob,
            rows,
            basis,
            in_basis,
            binv,
            xb,
            pivots: 0,
            since_refresh: 0,
        }
    }

    fn column(&self, v: Var) -> Vec<f64> {
        let mut a = vec![0.0; self.rows];
        match v {
            Var::Y(i) => {
                a[0] = 1.0;
                a[1..].copy_from_slice(self.prob.row(i));
            }
            Var::S(j) => a[j] = -1.0,
            Var::Art => a[0] = 1.0,
        }
        a
    }

    fn ftran(&self, a: &[f64]) -> Vec<f64> {
        let n = self.rows;
        (0..n)
            .map(|r| {
                self.binv[r * n..(r + 1) * n]
                    .iter()
                    .zip(a)
                    .map(|(b, x)| b * x)
                    .sum()
            })
            .collect()
    }

    /// `pi = c_B^T B^{-1}`.
    fn multipliers(&self, cost: &dyn Fn(Var) -> f64) -> Vec<f64> {
        let n = self.rows;
        let mut pi = vec![0.0; n];
        for (r, &v) in self.basis.iter().enumerate() {
            let c = cost(v);
            if c != 0.0 {
                for (p, b) in pi.iter_mut().zip(&self.binv[r * n..(r + 1) * n]) {
                    *p += c * b;
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, v: Var, cost: &dyn Fn(Var) -> f64, pi: &[f64]) -> f64 {
        match v {
            Var::Y(i) => {
                cost(v)
                    - pi[0]
                    - self
                        .prob
                        .row(i)
                        .iter()
                        .zip(&pi[1..])
                        .map(|(l, p)| l * p)
                        .sum::<f64>()
            }
            Var::S(j) => cost(v) + pi[j],
            Var::Art => cost(v) - pi[0],
        }
    }

    fn pivot(&mut self, r: usize, entering: Var, u: &[f64]) {
        let n = self.rows;
        let ur = u[r];
        let theta = self.xb[r] / ur;
        for (i, x) in self.xb.iter_mut().enumerate() {
            if i != r {
                *x -= theta * u[i];
            }
        }
        self.xb[r] = theta;
        let row_r: Vec<f64> = self.binv[r * n..(r + 1) * n]
            .iter()
            .map(|b| b / ur)
            .collect();
        for i in 0..n {
            if i == r || u[i] == 0.0 {
                continue;
            }
            let f = u[i];
            for (b, rr) in self.binv[i * n..(i + 1) * n].iter_mut().zip(&row_r) {
                *b -= f * rr;
            }
        }
        self.binv[r * n..(r + 1) * n].copy_from_slice(&row_r);
        if let Some(k) = self.slot(self.basis[r]) {
            self.in_basis[k] = false;
        }
        if let Some(k) = self.slot(entering) {
            self.in_basis[k] = true;
        }
        self.basis[r] = entering;
        self.pivots += 1;
        self.since_refresh += 1;
        if self.since_refresh >= REFRESH_EVERY {
            self.refresh();
        }
    }

    /// Re-invert the basis from scratch to shed accumulated rounding.
    fn refresh(&mut self) {
        let n = self.rows;
        let mut a = vec![0.0; n * n];
        for (c, &v) in self.basis.iter().enumerate() {
            for (r, x) in self.column(v).into_iter().enumerate() {
                a[r * n + c] = x;
            }
        }
        if let Some(inv) = invert(&a, n) {
            self.binv = inv;
            let mut b = vec![0.0; n];
            b[0] = 1.0;
            self.xb = self
                .ftran(&b)
                .into_iter()
                .map(|x| if x.abs() < 1e-13 { 0.0 } else { x })
                .collect();
        }
        self.since_refresh = 0;
    }

    fn slot(&self, v: Var) -> Option<usize> {
        match v {
            Var::Y(i) => Some(i),
            Var::S(j) => Some(self.prob.num_points() + j - 1),
            Var::Art => None,
        }
    }

    fn candidates(&self) -> impl Iterator<Item = Var> + '_ {
        (0..self.prob.num_points())
            .map(Var::Y)
            .chain((1..self.rows).map(Var::S))
            .filter(|&v| !self.in_basis[self.slot(v).unwrap()])
    }

    /// Run simplex iterations to optimality for `cost`.
    fn optimize(&mut self, cost: &dyn Fn(Var) -> f64) -> Result<(), OptError> {
        let mut degenerate = 0;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(OptError::Numerical("pivot limit exceeded".into()));
            }
            let pi = self.multipliers(cost);
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering: Option<(Var, f64)> = None;
            for v in self.candidates() {
                let d = self.reduced_cost(v, cost, &pi);
                if d >= -1e-11 * (1.0 + cost(v).abs()) {
                    continue;
                }
                if bland {
                    entering = Some((v, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d < best) {
                    entering = Some((v, d));
                }
            }
            let Some((v, _)) = entering else {
                return Ok(());
            };
            let u = self.ftran(&self.column(v));
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                if u[r] > PIVOT_TOL {
                    let ratio = self.xb[r].max(0.0) / u[r];
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-15
                                || (ratio <= best + 1e-15
                                    && var_key(self.basis[r]) < var_key(self.basis[lr]))
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(OptError::Numerical("dual objective unbounded".into()));
            };
            degenerate = if ratio <= 1e-14 { degenerate + 1 } else { 0 };
            self.pivot(r, v, &u);
        }
    }
}

/// Bland ordering on variables; the artificial leaves first.
fn var_key(v: Var) -> (u8, usize) {
    match v {
        Var::Art => (0, 0),
        Var::Y(i) => (1, i),
        Var::S(j) => (2, j),
    }
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| m[x * n + c].abs().total_cmp(&m[y * n + c].abs()))?;
        if m[p * n + c].abs() < 1e-14 {
            return None;
        }
        for k in 0..n {
            m.swap(c * n + k, p * n + k);
            inv.swap(c * n + k, p * n + k);
        }
        let d = m[c * n + c];
        for k in 0..n {
            m[c * n + k] /= d;
            inv[c * n + k] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r * n + c];
                if f != 0.0 {
                    for k in 0..n {
                        m[r * n + k] -= f * m[c * n + k];
                        inv[r * n + k] -= f * inv[c * n + k];
                    }
                }
            }
        }
    }
    Some(inv)
}

pub(super) fn solve(prob: &MaxMinProblem) -> Result<Outcome, OptError> {
    let mut t = Tableau::new(prob);

    let phase1 = |v: Var| if v == Var::Art { 1.0 } else { 0.0 };
    t.optimize(&phase1)?;
    t.refresh();
    if let Some(r) = t.basis.iter().position(|&v| v == Var::Art) {
        if t.xb[r] > 1e-9 {
            return Err(OptError::Unbounded { column: None });
        }
        // Degenerate artificial: swap in any column with a usable entry.
        let n = t.rows;
        let row: Vec<f64> = t.binv[r * n..(r + 1) * n].to_vec();
        let replacement = t
            .candidates()
            .map(|v| {
                let a = t.column(v);
                (v, row.iter().zip(&a).map(|(b, x)| b * x).sum::<f64>())
            })
            .find(|(_, e)| e.abs() > 1e-7);
        let Some((v, _)) = replacement else {
            return Err(OptError::Numerical("redundant normalization row".into()));
        };
        let u = t.ftran(&t.column(v));
        t.pivot(r, v, &u);
    }

    let phase2 = |v: Var| match v {
        Var::Y(i) => prob.points()[i],
        Var::S(_) => 0.0,
        Var::Art => f64::INFINITY,
    };
    t.optimize(&phase2)?;
    t.refresh();
    let mut pi = t.multipliers(&phase2);
    let mut certified = None;
    if t.rows <= EXACT_ROWS && prob.num_points() <= EXACT_POINTS {
        let exact = certify(prob, &t.basis);
        certified = Some(exact.is_some());
        if let Some(exact) = exact {
            pi = exact
                .iter()
                .map(|p| p.to_f64().unwrap_or(f64::NAN))
                .collect();
        }
    }
    Ok(Outcome {
        pi,
        pivots: t.pivots,
        certified,
    })
}

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Bland pivots allowed when finishing a float basis exactly.
const EXACT_PIVOTS: usize = 64;

/// Recheck `basis` in exact rational arithmetic on the (already rounded)
/// problem data and, if it is feasible but not optimal, finish with exact
/// Bland pivots. Returns the exact multipliers of an optimal basis.
///
/// The float loop stops once reduced costs clear a small tolerance, which
/// on nearly flat rows leaves the multipliers visibly off; the exact pass
/// removes that error.
fn certify(prob: &MaxMinProblem, basis: &[Var]) -> Option<Vec<BigRational>> {
    let n = basis.len();
    let col = |v: Var| -> Vec<BigRational> {
        let mut a = vec![BigRational::zero(); n];
        match v {
            Var::Y(i) => {
                a[0] = BigRational::from_integer(1.into());
                for (j, l) in prob.row(i).iter().enumerate() {
                    a[j + 1] = q(*l);
                }
            }
            Var::S(j) => a[j] = BigRational::from_integer((-1).into()),
            Var::Art => a[0] = BigRational::from_integer(1.into()),
        }
        a
    };
    let cost = |v: Var| match v {
        Var::Y(i) => q(prob.points()[i]),
        _ => BigRational::zero(),
    };
    if basis.contains(&Var::Art) {
        return None;
    }
    let cols: Vec<Vec<BigRational>> = (0..prob.num_points()).map(|i| col(Var::Y(i))).collect();
    let column = |v: Var| match v {
        Var::Y(i) => cols[i].clone(),
        _ => col(v),
    };
    let mut basis = basis.to_vec();
    let mut e0 = vec![BigRational::zero(); n];
    e0[0] = BigRational::from_integer(1.into());
    for _ in 0..=EXACT_PIVOTS {
        let bcols: Vec<Vec<BigRational>> = basis.iter().map(|&v| column(v)).collect();
        let b_mat: Vec<Vec<BigRational>> = (0..n)
            .map(|r| (0..n).map(|c| bcols[c][r].clone()).collect())
            .collect();
        // B x = e_0 (primal feasibility of the dual) and B^T pi = c_B.
        let xb = solve_exact(b_mat.clone(), e0.clone())?;
        if xb.iter().any(|x| x.is_negative()) {
            return None;
        }
        let pi = solve_exact(bcols, basis.iter().map(|&v| cost(v)).collect())?;
        let reduced = |v: Var| {
            let a = column(v);
            cost(v) - a.iter().zip(&pi).map(|(x, p)| x * p).sum::<BigRational>()
        };
        let entering = (0..prob.num_points())
            .map(Var::Y)
            .chain((1..n).map(Var::S))
            .filter(|v| !basis.contains(v))
            .find(|&v| reduced(v).is_negative());
        let Some(v) = entering else {
            return Some(pi);
        };
        let u = solve_exact(b_mat, column(v))?;
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..n {
            if u[r].is_positive() {
                let ratio = &xb[r] / &u[r];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && var_key(basis[r]) < var_key(basis[*lr]))
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        basis[leave?.0] = v;
    }
    None
}

fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
                let t = &f * &b[c];
                b[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}
