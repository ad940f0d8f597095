//! Dense two-phase simplex over exact rationals.
//!
//! Solves `min c·x` subject to `A x = b`, `x ≥ 0`. Pivots follow Bland's
//! rule (lowest entering index, lowest leaving basic index on ratio ties),
//! so the method cannot cycle.
//!
//! Each column is rescaled by the lcm of its denominators (a change of
//! variable, so integer columns keep pivots small), rows then clear the
//! right-hand side, and the tableau is kept fraction-free: the stored entries
//! are the true entries times the last pivot value, and each update divides
//! exactly by the previous one. Columns that repeat or negate
//! an earlier column are stored once. Artificial columns are implicit and
//! dropped once they leave the basis.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

pub const DEFAULT_ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Scalar>,
    pub value: Scalar,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("infeasible")]
    Infeasible,
    #[error("unbounded")]
    Unbounded,
    #[error("iteration cap of {cap} reached")]
    IterationCap { cap: usize, best: Option<LpSolution> },
    #[error("malformed problem: {0}")]
    Shape(String),
}

fn exact_div(v: BigInt, d: &BigInt) -> BigInt {
    if d.is_one() {
        return v;
    }
    let (q, r) = v.div_rem(d);
    debug_assert!(r.is_zero(), "fraction-free update left a remainder");
    q
}

/// Column `j` is stored directly, or as `±` another stored column.
#[derive(Debug, Clone, Copy)]
enum Layout {
    Own(usize),
    Linked(usize, bool),
}

struct Tableau {
    rows: Vec<Vec<BigInt>>,
    rhs: Vec<BigInt>,
    det: BigInt,
    layout: Vec<Layout>,
    /// Basic variable per row: a column index, or `n + row` for an artificial.
    basis: Vec<usize>,
    iterations: usize,
    cap: usize,
}

impl Tableau {
    fn n(&self) -> usize {
        self.layout.len()
    }

    fn value(&self, i: usize, j: usize) -> BigInt {
        match self.layout[j] {
            Layout::Own(k) => self.rows[i][k].clone(),
            Layout::Linked(k, true) => -&self.rows[i][k],
            Layout::Linked(k, false) => self.rows[i][k].clone(),
        }
    }

    fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows.len()).map(|i| self.value(i, j)).collect()
    }

    fn pivot(&mut self, r: usize, e: usize, objective: &mut [BigInt]) {
        let col = self.column(e);
        let p = col[r].clone();
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for (i, factor) in col.iter().enumerate() {
            if i == r {
                continue;
            }
            let row = &mut self.rows[i];
            for (v, t) in row.iter_mut().zip(&pivot_row) {
                let mut next = &p * &*v;
                if !factor.is_zero() && !t.is_zero() {
                    next -= factor * t;
                }
                *v = exact_div(next, &self.det);
            }
            let mut next = &p * &self.rhs[i];
            if !factor.is_zero() {
                next -= factor * &pivot_rhs;
            }
            self.rhs[i] = exact_div(next, &self.det);
        }
        let z_e = objective[e].clone();
        for (j, z) in objective.iter_mut().enumerate() {
            let mut next = &p * &*z;
            if !z_e.is_zero() {
                next -= &z_e * self.value(r, j);
            }
            *z = exact_div(next, &self.det);
        }
        self.det = p;
        if self.det.is_negative() {
            // Only degenerate drive-out pivots can land here.
            for v in self.rows.iter_mut().flatten().chain(self.rhs.iter_mut()).chain(objective.iter_mut()) {
                *v = -&*v;
            }
            self.det = -&self.det;
        }
        self.basis[r] = e;
        self.iterations += 1;
    }

    /// Bland iterations until no reduced cost is negative.
    fn optimize(&mut self, objective: &mut [BigInt]) -> Result<(), LpError> {
        loop {
            let Some(e) = (0..self.n()).find(|&j| objective[j].is_negative()) else {
                return Ok(());
            };
            let col = self.column(e);
            let mut leave: Option<usize> = None;
            for i in 0..self.rows.len() {
                if !col[i].is_positive() {
                    continue;
                }
                leave = match leave {
                    None => Some(i),
                    Some(k) => {
                        // rhs_i / col_i against rhs_k / col_k
                        let lhs = &self.rhs[i] * &col[k];
                        let rhs = &self.rhs[k] * &col[i];
                        if lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[k]) {
                            Some(i)
                        } else {
                            Some(k)
                        }
                    }
                };
            }
            let Some(r) = leave else {
                return Err(LpError::Unbounded);
            };
            if self.iterations >= self.cap {
                return Err(LpError::IterationCap { cap: self.cap, best: None });
            }
            self.pivot(r, e, objective);
        }
    }

    fn solution(&self, c: &[Scalar], col_scale: &[BigInt]) -> LpSolution {
        let n = self.n();
        let mut x = vec![Scalar::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = Scalar::from_bigints(&self.rhs[i] * &col_scale[b], self.det.clone()).expect("positive pivot");
            }
        }
        let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
        LpSolution { x, value, iterations: self.iterations }
    }
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Scalar>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(&v.denom()))
}

fn scaled(v: &Scalar, scale: &BigInt) -> BigInt {
    v.numer() * (scale / v.denom())
}

/// `min c·x` s.t. `A x = b`, `x ≥ 0`; `a` is row-major.
pub fn minimize(a: &[Vec<Scalar>], b: &[Scalar], c: &[Scalar], cap: usize) -> Result<LpSolution, LpError> {
    let m = a.len();
    let n = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != n) {
        return Err(LpError::Shape(format!("{m} rows, {} rhs, {n} costs", b.len())));
    }

    // Variable j is replaced by x_j / col_scale[j]; rows then clear the
    // right-hand side and make it nonnegative.
    let col_scale: Vec<BigInt> = (0..n).map(|j| lcm_of_denominators(a.iter().map(|row| &row[j]))).collect();
    let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (row, bi) in a.iter().zip(b) {
        let mut scale = bi.denom();
        if bi.is_negative() {
            scale = -scale;
        }
        int_rows.push(row.iter().zip(&col_scale).map(|(v, s)| scaled(v, &(s * &scale))).collect());
        rhs.push(scaled(bi, &scale));
    }
    let scaled_costs: Vec<Scalar> = c
        .iter()
        .zip(&col_scale)
        .map(|(v, s)| v * &Scalar::from_bigints(s.clone(), BigInt::one()).expect("nonzero denominator"))
        .collect();

    // Store each column once up to sign.
    let mut layout = Vec::with_capacity(n);
    let mut stored: Vec<usize> = Vec::new();
    let mut seen: HashMap<Vec<BigInt>, usize> = HashMap::new();
    for j in 0..n {
        let col: Vec<BigInt> = int_rows.iter().map(|r| r[j].clone()).collect();
        let neg: Vec<BigInt> = col.iter().map(|v| -v).collect();
        if let Some(&k) = seen.get(&col) {
            layout.push(Layout::Linked(k, false));
        } else if let Some(&k) = seen.get(&neg) {
            layout.push(Layout::Linked(k, true));
        } else {
            seen.insert(col, stored.len());
            layout.push(Layout::Own(stored.len()));
            stored.push(j);
        }
    }
    let rows = int_rows.iter().map(|r| stored.iter().map(|&j| r[j].clone()).collect()).collect();
    let mut t = Tableau { rows, rhs, det: BigInt::one(), layout, basis: (n..n + m).collect(), iterations: 0, cap };

    // Phase 1: minimize the sum of the artificials.
    let mut phase1: Vec<BigInt> = (0..n).map(|j| -(0..m).map(|i| t.value(i, j)).sum::<BigInt>()).collect();
    t.optimize(&mut phase1)?;
    let infeasible = t.basis.iter().zip(&t.rhs).any(|(&bv, v)| bv >= n && v.is_positive());
    if infeasible {
        return Err(LpError::Infeasible);
    }
    // Pivot zero-level artificials out, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.value(i, j).is_zero()) {
                Some(j) => {
                    let mut scratch = vec![BigInt::zero(); n];
                    t.pivot(i, j, &mut scratch);
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 with integer costs.
    let cost_scale = lcm_of_denominators(scaled_costs.iter());
    let costs: Vec<BigInt> = scaled_costs.iter().map(|v| scaled(v, &cost_scale)).collect();
    let mut objective: Vec<BigInt> = (0..n)
        .map(|j| {
            let mut z = &costs[j] * &t.det;
            for (i, &bv) in t.basis.iter().enumerate() {
                if !costs[bv].is_zero() {
                    z -= &costs[bv] * t.value(i, j);
                }
            }
            z
        })
        .collect();
    match t.optimize(&mut objective) {
        Ok(()) => Ok(t.solution(c, &col_scale)),
        Err(LpError::IterationCap { cap, .. }) => {
            Err(LpError::IterationCap { cap, best: Some(t.solution(c, &col_scale)) })
        }
        Err(e) => Err(e),
    }
}

/// Solves `M x = v` exactly for square `M`; `None` when singular.
fn solve_square(mut mat: Vec<Vec<Scalar>>, mut v: Vec<Scalar>) -> Option<Vec<Scalar>> {
    let k = v.len();
    for col in 0..k {
        let p = (col..k).find(|&r| !mat[r][col].is_zero())?;
        mat.swap(col, p);
        v.swap(col, p);
        for r in 0..k {
            if r != col && !mat[r][col].is_zero() {
                let f = &mat[r][col] / &mat[col][col];
                let pivot_row = mat[col].clone();
                for (x, p) in mat[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &f * p;
                }
                let d = &f * &v[col];
                v[r] -= d;
            }
        }
    }
    Some((0..k).map(|i| &v[i] / &mat[i][i]).collect())
}

/// Minimum of `c·x` over the basic feasible solutions, found by trying
/// every column subset; exponential, meant for cross-checking tiny problems.
pub fn minimize_by_vertices(a: &[Vec<Scalar>], b: &[Scalar], c: &[Scalar]) -> Option<Scalar> {
    let m = a.len();
    let n = c.len();
    let mut best: Option<Scalar> = None;
    for size in 0..=m.min(n) {
        for cols in (0..n).combinations(size) {
            for rows in (0..m).combinations(size) {
                let mat: Vec<Vec<Scalar>> =
                    rows.iter().map(|&i| cols.iter().map(|&j| a[i][j].clone()).collect()).collect();
                let rhs: Vec<Scalar> = rows.iter().map(|&i| b[i].clone()).collect();
                let Some(sol) = solve_square(mat, rhs) else { continue };
                if sol.iter().any(|v| v.is_negative()) {
                    continue;
                }
                let mut x = vec![Scalar::zero(); n];
                for (&j, v) in cols.iter().zip(&sol) {
                    x[j] = v.clone();
                }
                let feasible = (0..m).all(|i| (0..n).map(|j| &a[i][j] * &x[j]).sum::<Scalar>() == b[i]);
                if !feasible {
                    continue;
                }
                let value: Scalar = x.iter().zip(c).map(|(p, q)| p * q).sum();
                if best.as_ref().is_none_or(|cur| value < *cur) {
                    best = Some(value);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: i64) -> Scalar {
        Scalar::from_int(v)
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&v| s(v)).collect()).collect()
    }

    #[test]
    fn small_program() {
        // min x + 2y + 3z, x + y + z = 4, x - y = 1
        let a = mat(&[&[1, 1, 1], &[1, -1, 0]]);
        let b = vec![s(4), s(1)];
        let c = vec![s(1), s(2), s(3)];
        let sol = minimize(&a, &b, &c, DEFAULT_ITERATION_CAP).unwrap();
        assert_eq!(sol.value, Scalar::ratio(11, 2));
        assert_eq!(minimize_by_vertices(&a, &b, &c), Some(Scalar::ratio(11, 2)));
    }

    #[test]
    fn infeasible_and_redundant() {
        let a = mat(&[&[1, 1], &[1, 1]]);
        assert_eq!(minimize(&a, &[s(1), s(2)], &[s(1), s(1)], 100), Err(LpError::Infeasible));
        let sol = minimize(&a, &[s(2), s(2)], &[s(1), s(3)], 100).unwrap();
        assert_eq!(sol.value, s(2));
        let neg = mat(&[&[1]]);
        assert_eq!(minimize(&neg, &[s(-1)], &[s(1)], 100), Err(LpError::Infeasible));
    }

    #[test]
    fn unbounded_and_cap() {
        let a = mat(&[&[1, -1]]);
        assert_eq!(minimize(&a, &[s(1)], &[s(0), s(-1)], 100), Err(LpError::Unbounded));
        let a = mat(&[&[1, 1, 1]]);
        let err = minimize(&a, &[s(1)], &[s(3), s(2), s(1)], 1).unwrap_err();
        assert!(matches!(err, LpError::IterationCap { cap: 1, best: Some(_) }));
    }
}
