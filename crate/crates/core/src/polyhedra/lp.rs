//! Two-phase tableau simplex over [`Scalar`] with Bland's rule.
//!
//! Problems are `min <c, u> + c0` subject to the rows of an [`HPolytope`],
//! with `u` free. Free variables are split as `u = u+ - u-`. After phase 2
//! the optimum is walked to a vertex of the feasible region whenever the
//! region has one.

use super::linalg::kernel_vector;
use super::{dot, HPolytope};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: Vec<i64>,
    pub constant: Scalar,
    pub constraints: HPolytope,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Scalar, point: Vec<Scalar> },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Scalar> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Scalar>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Scalar {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip().expect("pivot element is nonzero");
        for x in self.rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
        self.basis[r] = c;
    }

    fn run(&mut self, cost: &[Scalar], allowed: &[bool]) -> Phase {
        loop {
            let entering = (0..self.ncols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        rc = rc - &cost[b] * &self.rows[i][j];
                    }
                }
                rc.is_negative()
            });
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, Scalar)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][c].is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) * &self.rows[i][c].recip().unwrap();
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = best else {
                return Phase::Unbounded;
            };
            self.pivot(r, c);
        }
    }
}

pub fn lp_solve(p: &LpProblem) -> LpOutcome {
    let n = p.constraints.dim();
    let cons = p.constraints.rows();
    let m = cons.len();
    assert_eq!(p.objective.len(), n, "objective length must match dimension");

    let slack0 = 2 * n;
    let art0 = 2 * n + m;
    let needs_art: Vec<bool> = cons.iter().map(|r| r.offset.is_positive()).collect();
    let art_cols: Vec<usize> = {
        let mut next = art0;
        needs_art
            .iter()
            .map(|&a| {
                if a {
                    next += 1;
                    next - 1
                } else {
                    usize::MAX
                }
            })
            .collect()
    };
    let ncols = art0 + needs_art.iter().filter(|&&a| a).count();

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, r) in cons.iter().enumerate() {
        let mut row = vec![Scalar::zero(); ncols + 1];
        // <normal, u+ - u-> - s_i = b_i, negated when b_i <= 0 so the slack is basic
        let sign = if needs_art[i] { 1 } else { -1 };
        for (k, &a) in r.normal.iter().enumerate() {
            row[k] = Scalar::from_int(sign * a);
            row[n + k] = Scalar::from_int(-sign * a);
        }
        row[slack0 + i] = Scalar::from_int(-sign);
        row[ncols] = r.offset.mul_int(sign);
        if needs_art[i] {
            row[art_cols[i]] = Scalar::one();
            basis.push(art_cols[i]);
        } else {
            basis.push(slack0 + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };

    if ncols > art0 {
        let cost: Vec<Scalar> =
            (0..ncols).map(|j| if j >= art0 { Scalar::one() } else { Scalar::zero() }).collect();
        let allowed = vec![true; ncols];
        t.run(&cost, &allowed);
        let infeas: Scalar =
            (0..t.rows.len()).filter(|&i| t.basis[i] >= art0).map(|i| t.rhs(i).clone()).sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art0 {
                match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Scalar::zero(); ncols];
    for (k, &c) in p.objective.iter().enumerate() {
        cost[k] = Scalar::from_int(c);
        cost[n + k] = Scalar::from_int(-c);
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| j < art0).collect();
    if let Phase::Unbounded = t.run(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }

    let mut vals = vec![Scalar::zero(); ncols];
    for (i, &b) in t.basis.iter().enumerate() {
        vals[b] = t.rhs(i).clone();
    }
    let mut point: Vec<Scalar> = (0..n).map(|k| &vals[k] - &vals[n + k]).collect();
    purify(&p.constraints, &p.objective, &mut point);
    let value = &p.constant + &dot(&p.objective, &point);
    LpOutcome::Optimal { value, point }
}

/// Moves an optimal point along objective-neutral directions until the tight
/// constraints have full rank, i.e. the point is a vertex. Stops early when
/// the feasible region contains a line.
fn purify(poly: &HPolytope, objective: &[i64], u: &mut [Scalar]) {
    let n = poly.dim();
    loop {
        let tight: Vec<Vec<Scalar>> = poly
            .rows()
            .iter()
            .filter(|r| r.is_tight(u))
            .map(|r| r.normal.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        let Some(mut d) = kernel_vector(&tight, n) else {
            return;
        };
        if dot(objective, &d).is_positive() {
            d = d.iter().map(|x| -x).collect();
        }
        let objective_flat = dot(objective, &d).is_zero();
        let step = |d: &[Scalar]| -> Option<Scalar> {
            poly.rows()
                .iter()
                .filter_map(|r| {
                    let rate = dot(&r.normal, d);
                    rate.is_negative().then(|| (r.eval(u) - &r.offset) * (-rate).recip().unwrap())
                })
                .min()
        };
        let (dir, t) = match step(&d) {
            Some(t) => (d, t),
            None if objective_flat => {
                let back: Vec<Scalar> = d.iter().map(|x| -x).collect();
                match step(&back) {
                    Some(t) => (back, t),
                    None => return,
                }
            }
            None => return,
        };
        for (x, dx) in u.iter_mut().zip(&dir) {
            *x = &*x + &(&t * dx);
        }
    }
}
