//! Dense two-phase simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `maximize c·x` subject to `A x = b`, `x ≥ 0`. Rows are sparse
/// `(column, coefficient)` lists.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub columns: usize,
    pub rows: Vec<Vec<(usize, Rational)>>,
    pub rhs: Vec<Rational>,
    pub objective: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub objective: Rational,
    /// A basic (vertex) optimal solution.
    pub x: Vec<Rational>,
}

struct Tableau {
    // rows × (columns + 1); the last column is the right-hand side
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let support: Vec<usize> = (0..=self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for &j in &support {
                let delta = &f * &pivot_row[j];
                row[j] -= delta;
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = col;
    }

    /// Reduced costs of `maximize cost·x` for the current basis.
    fn reduced_costs(&self, cost: &[Rational], allowed: &[bool]) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                let a = &self.rows[r][j];
                if !a.is_zero() {
                    *dj -= &cost[b] * a;
                }
            }
        }
        for (j, dj) in d.iter_mut().enumerate() {
            if !allowed[j] {
                *dj = Rational::zero();
            }
        }
        d
    }

    /// Runs simplex iterations; `Err(Unbounded)` if the objective is unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<()> {
        loop {
            let d = self.reduced_costs(cost, allowed);
            let Some(col) = (0..self.width).find(|&j| d[j].is_positive()) else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((r, _)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(r, col);
        }
    }
}

pub fn solve(lp: &StandardForm) -> Result<Solution> {
    let n = lp.columns;
    let m = lp.rows.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
        let flip = b.is_negative();
        let mut dense = vec![Rational::zero(); width + 1];
        for (j, a) in row {
            dense[*j] += if flip { -a } else { a.clone() };
        }
        dense[n + i] = Rational::one();
        dense[width] = if flip { -b } else { b.clone() };
        rows.push(dense);
    }
    let mut t = Tableau { rows, basis: (n..width).collect(), width };

    // Phase one: maximize minus the sum of artificials.
    let mut cost = vec![Rational::zero(); width];
    for c in cost.iter_mut().skip(n) {
        *c = -Rational::one();
    }
    let all = vec![true; width];
    t.optimize(&cost, &all)?;
    if (0..m).any(|r| t.basis[r] >= n && !t.rhs(r).is_zero()) {
        return Err(Error::Infeasible);
    }
    // Drive artificials out of the basis; rows that cannot be are redundant.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, col);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    let mut cost = vec![Rational::zero(); width];
    for (j, c) in &lp.objective {
        cost[*j] += c;
    }
    let allowed: Vec<bool> = (0..width).map(|j| j < n).collect();
    t.optimize(&cost, &allowed)?;
    let mut x = vec![Rational::zero(); n];
    for (r, &b) in t.basis.iter().enumerate() {
        x[b] = t.rhs(r).clone();
    }
    let objective = lp.objective.iter().map(|(j, c)| c * &x[*j]).sum();
    Ok(Solution { objective, x })
}
