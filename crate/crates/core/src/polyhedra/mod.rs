//! Exact H-polytopes `{u : <u, normal_i> >= offset_i}` with integer normals
//! and [`Scalar`] offsets.

mod lattice;
mod linalg;
mod lp;
mod volume;

use thiserror::Error;

use crate::scalar::Scalar;

pub use lattice::orthogonal_lattice_basis;
pub use linalg::{rank, solve_square};
pub(crate) use linalg::kernel_vector;
pub use lp::{lp_solve, LpOutcome, LpProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is empty")]
    EmptyPolytope,
    #[error("constraint {row} has a zero normal vector")]
    ZeroNormal { row: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("row index {0} out of range")]
    NoSuchRow(usize),
    #[error("lattice enumeration exceeds machine integer range")]
    Overflow,
}

/// One half-space `<u, normal> >= offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub normal: Vec<i64>,
    pub offset: Scalar,
}

impl Constraint {
    pub fn new(normal: Vec<i64>, offset: Scalar) -> Self {
        Constraint { normal, offset }
    }

    /// `<u, normal>`.
    pub fn eval(&self, u: &[Scalar]) -> Scalar {
        dot(&self.normal, u)
    }

    pub fn is_satisfied(&self, u: &[Scalar]) -> bool {
        self.eval(u) >= self.offset
    }

    pub fn is_tight(&self, u: &[Scalar]) -> bool {
        self.eval(u) == self.offset
    }

    /// Same half-space with a primitive normal.
    pub fn primitive(&self) -> Constraint {
        let g = self.normal.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
        if g <= 1 {
            return self.clone();
        }
        Constraint {
            normal: self.normal.iter().map(|x| x / g).collect(),
            offset: self.offset.div_int(g),
        }
    }
}

pub(crate) fn dot(normal: &[i64], u: &[Scalar]) -> Scalar {
    normal
        .iter()
        .zip(u)
        .filter(|(k, _)| **k != 0)
        .map(|(k, x)| x.mul_int(*k))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HPolytope {
    dim: usize,
    rows: Vec<Constraint>,
}

impl HPolytope {
    pub fn new(dim: usize, rows: Vec<Constraint>) -> Result<Self, PolyError> {
        for (i, r) in rows.iter().enumerate() {
            if r.normal.len() != dim {
                return Err(PolyError::DimensionMismatch { expected: dim, got: r.normal.len() });
            }
            if r.normal.iter().all(|&x| x == 0) {
                return Err(PolyError::ZeroNormal { row: i });
            }
        }
        Ok(HPolytope { dim, rows })
    }

    /// Builds from `(normal, offset)` pairs; panics on malformed rows.
    pub fn from_rows<I>(dim: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, Scalar)>,
    {
        let rows = rows.into_iter().map(|(n, b)| Constraint::new(n, b)).collect();
        HPolytope::new(dim, rows).expect("malformed polytope rows")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn contains(&self, u: &[Scalar]) -> bool {
        u.len() == self.dim && self.rows.iter().all(|r| r.is_satisfied(u))
    }

    /// `lambda * P` for `lambda > 0`.
    pub fn dilate(&self, lambda: &Scalar) -> HPolytope {
        assert!(lambda.is_positive(), "dilation factor must be positive");
        HPolytope {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|r| Constraint::new(r.normal.clone(), &r.offset * lambda))
                .collect(),
        }
    }

    /// Rows with primitive normals, keeping only the tightest offset for
    /// each normal direction.
    pub(crate) fn reduced_rows(&self) -> Vec<Constraint> {
        let mut out: Vec<Constraint> = Vec::new();
        for r in self.rows.iter().map(Constraint::primitive) {
            match out.iter_mut().find(|o| o.normal == r.normal) {
                Some(o) => {
                    if r.offset > o.offset {
                        o.offset = r.offset;
                    }
                }
                None => out.push(r),
            }
        }
        out
    }

    pub fn is_feasible(&self) -> bool {
        let lp = LpProblem {
            objective: vec![0; self.dim],
            constant: Scalar::zero(),
            constraints: self.clone(),
        };
        !matches!(lp_solve(&lp), LpOutcome::Infeasible)
    }

    /// True iff the recession cone `{d : <d, normal_i> >= 0}` is `{0}`.
    ///
    /// Equivalent to the normals spanning `R^n` together with a strictly
    /// positive combination of them vanishing, which is one LP.
    pub fn is_bounded(&self) -> bool {
        let n = self.dim;
        if n == 0 {
            return true;
        }
        let normals: Vec<Vec<Scalar>> = self
            .rows
            .iter()
            .map(|r| r.normal.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        if rank(&normals) < n {
            return false;
        }
        // variables: lambda_j >= 1, sum_j lambda_j * normal_j = 0
        let m = self.rows.len();
        let mut rows = Vec::with_capacity(m + 2 * n);
        for j in 0..m {
            let mut e = vec![0; m];
            e[j] = 1;
            rows.push(Constraint::new(e, Scalar::one()));
        }
        for k in 0..n {
            let coeffs: Vec<i64> = self.rows.iter().map(|r| r.normal[k]).collect();
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            rows.push(Constraint::new(coeffs.clone(), Scalar::zero()));
            rows.push(Constraint::new(coeffs.iter().map(|c| -c).collect(), Scalar::zero()));
        }
        let lp = LpProblem {
            objective: vec![0; m],
            constant: Scalar::zero(),
            constraints: HPolytope { dim: m, rows },
        };
        !matches!(lp_solve(&lp), LpOutcome::Infeasible)
    }

    fn check_bounded_nonempty(&self) -> Result<(), PolyError> {
        if self.is_bounded() {
            return Ok(());
        }
        if self.is_feasible() {
            Err(PolyError::UnboundedPolytope)
        } else {
            Err(PolyError::EmptyPolytope)
        }
    }
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;

    #[test]
    fn rejects_zero_normal() {
        let r = HPolytope::new(2, vec![Constraint::new(vec![0, 0], Scalar::one())]);
        assert_eq!(r, Err(PolyError::ZeroNormal { row: 0 }));
    }

    #[test]
    fn boundedness() {
        assert!(unit_square().is_bounded());
        assert!(triangle().is_bounded());
        assert!(!poly(2, &[(&[1, 0], "0"), (&[0, 1], "0")]).is_bounded());
        assert!(!poly(2, &[(&[1, 0], "0"), (&[-1, 0], "-1")]).is_bounded());
        // empty but bounded recession cone
        assert!(poly(1, &[(&[1], "1"), (&[-1], "0")]).is_bounded());
    }

    #[test]
    fn primitive_rows() {
        let c = Constraint::new(vec![2, -4], s("3")).primitive();
        assert_eq!(c.normal, vec![1, -2]);
        assert_eq!(c.offset, s("3/2"));
    }

    #[test]
    fn dilation_scales_offsets() {
        let p = unit_simplex().dilate(&s("5"));
        assert_eq!(p.rows()[2].offset, s("-5"));
        assert!(p.contains(&pt(&["5", "0"])));
        assert!(!p.contains(&pt(&["5", "1/100"])));
    }
}
