//! Exact two-phase simplex over big rationals.
//!
//! Dense tableau, Bland's rule for both entering and leaving variables, so
//! the method terminates on degenerate problems. All variables are
//! nonnegative; bounds go in as ordinary constraints.

use num_traits::{Signed, Zero};

use crate::rational::{one, zero, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

/// `max` or `min` of `objective · x` subject to `constraints`, `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct Lp {
    n: usize,
    objective: Vec<Rational>,
    maximize: bool,
    constraints: Vec<Constraint>,
}

impl Lp {
    pub fn maximize(objective: Vec<Rational>) -> Self {
        Self { n: objective.len(), objective, maximize: true, constraints: Vec::new() }
    }

    pub fn minimize(objective: Vec<Rational>) -> Self {
        Self { n: objective.len(), objective, maximize: false, constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    /// Adds `Σ coeffs · x  sense  rhs`. Coefficients are sparse `(var, c)`.
    pub fn constrain(&mut self, coeffs: Vec<(usize, Rational)>, sense: Sense, rhs: Rational) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.n));
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Columns: structural `0..n`, then slack/surplus, then artificial.
    n_struct: usize,
    first_art: usize,
    cols: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let n = lp.n;
        let m = lp.constraints.len();
        let n_slack = lp.constraints.iter().filter(|c| c.sense != Sense::Eq).count();
        let n_art = lp
            .constraints
            .iter()
            .filter(|c| {
                let flip = c.rhs.is_negative();
                match c.sense {
                    Sense::Le => flip,
                    Sense::Ge => !flip,
                    Sense::Eq => true,
                }
            })
            .count();
        let first_art = n + n_slack;
        let cols = first_art + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut next_slack, mut next_art) = (n, first_art);
        for c in &lp.constraints {
            let mut row = vec![zero(); cols + 1];
            for (j, v) in &c.coeffs {
                row[*j] += v;
            }
            row[cols] = c.rhs.clone();
            let mut sense = c.sense;
            if c.rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
                sense = match sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
            }
            match sense {
                Sense::Le => {
                    row[next_slack] = one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = -one();
                    next_slack += 1;
                    row[next_art] = one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Sense::Eq => {
                    row[next_art] = one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
        }
        Self { rows, basis, n_struct: n, first_art, cols }
    }

    fn pivot(&mut self, obj: &mut [Rational], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for (v, pv) in obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximizing `cost`; last entry holds `-z`.
    fn objective_row(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj = vec![zero(); self.cols + 1];
        obj[..cost.len()].clone_from_slice(cost);
        for (r, &b) in self.basis.iter().enumerate() {
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for (v, rv) in obj.iter_mut().zip(&self.rows[r]) {
                    *v -= &f * rv;
                }
            }
        }
        obj
    }

    /// Runs simplex iterations over columns `< limit`. Returns false if
    /// unbounded.
    fn iterate(&mut self, obj: &mut [Rational], limit: usize) -> bool {
        loop {
            let Some(c) = (0..limit).find(|&j| obj[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(obj, r, c);
        }
    }

    fn solve(mut self, lp: &Lp) -> LpOutcome {
        if self.first_art < self.cols {
            let mut cost = vec![zero(); self.cols];
            for v in &mut cost[self.first_art..] {
                *v = -one();
            }
            let mut obj = self.objective_row(&cost);
            self.iterate(&mut obj, self.cols);
            if !obj[self.cols].is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials out of the basis; drop redundant rows.
            let mut r = 0;
            while r < self.rows.len() {
                if self.basis[r] >= self.first_art {
                    if let Some(c) = (0..self.first_art).find(|&j| !self.rows[r][j].is_zero()) {
                        self.pivot(&mut obj, r, c);
                        r += 1;
                    } else {
                        self.rows.remove(r);
                        self.basis.remove(r);
                    }
                } else {
                    r += 1;
                }
            }
            for row in &mut self.rows {
                row.drain(self.first_art..self.cols);
            }
            self.cols = self.first_art;
        }
        let cost: Vec<Rational> = if lp.maximize {
            lp.objective.clone()
        } else {
            lp.objective.iter().map(|c| -c.clone()).collect()
        };
        let mut obj = self.objective_row(&cost);
        if !self.iterate(&mut obj, self.cols) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![zero(); self.n_struct];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rows[r][self.cols].clone();
            }
        }
        let value: Rational = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        LpOutcome::Optimal { value, x }
    }
}
