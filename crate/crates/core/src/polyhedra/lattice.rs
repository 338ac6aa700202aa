//! Integer points of polytopes and the lattice of a hyperplane.

use num_traits::ToPrimitive;

use super::{HPolytope, PolyError};
use crate::exec::Execution;
use crate::scalar::Scalar;

/// A basis (as columns) of `{w in Z^n : <w, v> = 0}` for a primitive `v`.
///
/// Column operations reduce `v` to a single `±1` entry, like the extended
/// Euclidean algorithm; the accumulated unimodular matrix then has the
/// kernel basis in its remaining columns.
pub fn orthogonal_lattice_basis(v: &[i64]) -> Vec<Vec<i64>> {
    let n = v.len();
    let mut w = v.to_vec();
    let mut cols: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let mut e = vec![0; n];
            e[j] = 1;
            e
        })
        .collect();
    loop {
        let nonzero: Vec<usize> = (0..n).filter(|&j| w[j] != 0).collect();
        if nonzero.len() <= 1 {
            let keep = nonzero.first().copied();
            return (0..n).filter(|&j| Some(j) != keep).map(|j| cols[j].clone()).collect();
        }
        let p = *nonzero.iter().min_by_key(|&&j| w[j].abs()).unwrap();
        for &j in &nonzero {
            if j == p {
                continue;
            }
            let q = w[j].div_euclid(w[p]);
            w[j] -= q * w[p];
            let cp = cols[p].clone();
            for (x, y) in cols[j].iter_mut().zip(cp) {
                *x -= q * y;
            }
        }
    }
}

/// Integer form of a polytope: for integer points `<u, v> >= b` is the same
/// as `<u, v> >= ceil(b)`.
struct IntegerForm {
    rows: Vec<(Vec<i64>, i64)>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl IntegerForm {
    fn new(p: &HPolytope) -> Result<Option<Self>, PolyError> {
        let verts = match p.vertices() {
            Ok(v) => v,
            Err(PolyError::EmptyPolytope) => return Ok(None),
            Err(e) => return Err(e),
        };
        let n = p.dim();
        let to_i64 = |x: num_bigint::BigInt| x.to_i64().ok_or(PolyError::Overflow);
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for k in 0..n {
            let min = verts.iter().map(|v| &v[k]).min().unwrap();
            let max = verts.iter().map(|v| &v[k]).max().unwrap();
            lo.push(to_i64(min.ceil())?);
            hi.push(to_i64(max.floor())?);
        }
        let rows = p
            .rows()
            .iter()
            .map(|r| Ok((r.normal.clone(), to_i64(r.offset.ceil())?)))
            .collect::<Result<_, PolyError>>()?;
        Ok(Some(IntegerForm { rows, lo, hi }))
    }

    /// Feasible range of the last coordinate given the others.
    fn last_range(&self, prefix: &[i64]) -> Option<(i64, i64)> {
        let last = prefix.len();
        let (mut lo, mut hi) = (self.lo[last] as i128, self.hi[last] as i128);
        for (normal, b) in &self.rows {
            let partial: i128 = normal.iter().zip(prefix).map(|(a, x)| *a as i128 * *x as i128).sum();
            let c = normal[last] as i128;
            let rhs = *b as i128 - partial;
            match c.signum() {
                1 => lo = lo.max(div_ceil(rhs, c)),
                -1 => hi = hi.min(div_floor(rhs, c)),
                _ => {
                    if rhs > 0 {
                        return None;
                    }
                }
            }
        }
        (lo <= hi).then_some((lo as i64, hi as i64))
    }

    fn visit<F: FnMut(&[i64], i64, i64)>(&self, prefix: &mut Vec<i64>, f: &mut F) {
        if prefix.len() + 1 == self.lo.len() {
            if let Some((a, b)) = self.last_range(prefix) {
                f(prefix, a, b);
            }
            return;
        }
        let k = prefix.len();
        for x in self.lo[k]..=self.hi[k] {
            prefix.push(x);
            self.visit(prefix, f);
            prefix.pop();
        }
    }

    fn count_with_first(&self, first: Option<i64>) -> u64 {
        let mut total = 0u64;
        let mut prefix: Vec<i64> = first.into_iter().collect();
        self.visit(&mut prefix, &mut |_, a, b| total += (b - a + 1) as u64);
        total
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    a.div_euclid(b) - if b < 0 && a.rem_euclid(b) != 0 { 1 } else { 0 }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

impl HPolytope {
    /// Number of integer points. Empty polytopes count 0; unbounded ones
    /// are rejected.
    pub fn lattice_points(&self) -> Result<u64, PolyError> {
        self.lattice_points_with(Execution::Sequential)
    }

    pub fn lattice_points_with(&self, exec: Execution) -> Result<u64, PolyError> {
        if self.dim() == 0 {
            return Ok(1);
        }
        let Some(form) = IntegerForm::new(self)? else {
            return Ok(0);
        };
        if self.dim() == 1 {
            return Ok(form.count_with_first(None));
        }
        Ok(exec.sum_i64(form.lo[0]..=form.hi[0], |x| form.count_with_first(Some(x))))
    }

    /// All integer points in lexicographic order.
    pub fn lattice_point_list(&self) -> Result<Vec<Vec<i64>>, PolyError> {
        if self.dim() == 0 {
            return Ok(vec![vec![]]);
        }
        let Some(form) = IntegerForm::new(self)? else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        form.visit(&mut Vec::new(), &mut |prefix, a, b| {
            for x in a..=b {
                let mut p = prefix.to_vec();
                p.push(x);
                out.push(p);
            }
        });
        Ok(out)
    }

    /// Minimum of `<u, w>` over the integer points `u`, or `None` if there
    /// are none.
    pub fn min_over_lattice_points(&self, w: &[i64]) -> Result<Option<i64>, PolyError> {
        if self.dim() == 0 {
            return Ok(Some(0));
        }
        let Some(form) = IntegerForm::new(self)? else {
            return Ok(None);
        };
        let last = self.dim() - 1;
        let mut best: Option<i64> = None;
        form.visit(&mut Vec::new(), &mut |prefix, a, b| {
            let partial: i64 = prefix.iter().zip(w).map(|(x, c)| x * c).sum();
            let end = if w[last] >= 0 { a } else { b };
            let val = partial + w[last] * end;
            best = Some(best.map_or(val, |m| m.min(val)));
        });
        Ok(best)
    }

    /// Whether an integer point satisfies every row.
    pub fn contains_lattice_point(&self, u: &[i64]) -> bool {
        let pt: Vec<Scalar> = u.iter().map(|&x| Scalar::from_int(x)).collect();
        self.contains(&pt)
    }
}
