//! Vertex enumeration and exact volumes.
//!
//! The n-volume is computed by coning every facet over a point `c` of the
//! polytope. With a primitive facet normal `v`, the Euclidean height times
//! the Euclidean facet area equals `(<c, v> - b) * latvol(F)`, where
//! `latvol` is the facet volume measured in the lattice `v^perp ∩ Z^n`.
//! Facet volumes recurse one dimension down in lattice coordinates, so the
//! whole computation stays in the coefficient field.

use std::collections::BTreeSet;

use super::lattice::orthogonal_lattice_basis;
use super::linalg::{rank, solve_square};
use super::{dot, Constraint, HPolytope, PolyError};
use crate::scalar::Scalar;

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::new(), &mut out);
    out
}

impl HPolytope {
    /// All vertices, by solving every n-subset of constraints and keeping
    /// the feasible unique solutions. Sorted, duplicate-free.
    pub fn vertices(&self) -> Result<Vec<Vec<Scalar>>, PolyError> {
        self.check_bounded_nonempty()?;
        let verts = self.vertices_unchecked();
        if verts.is_empty() {
            return Err(PolyError::EmptyPolytope);
        }
        Ok(verts)
    }

    /// Vertex enumeration assuming boundedness (a bounded feasible polytope
    /// always has a vertex, so an empty result means infeasible).
    pub(crate) fn vertices_unchecked(&self) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        if n == 0 {
            return vec![vec![]];
        }
        let rows = self.reduced_rows();
        let mut found = BTreeSet::new();
        for subset in subsets(rows.len(), n) {
            let a: Vec<Vec<Scalar>> = subset
                .iter()
                .map(|&i| rows[i].normal.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect();
            let b: Vec<Scalar> = subset.iter().map(|&i| rows[i].offset.clone()).collect();
            if let Some(x) = solve_square(&a, &b) {
                if rows.iter().all(|r| r.is_satisfied(&x)) {
                    found.insert(x);
                }
            }
        }
        found.into_iter().collect()
    }

    /// Whether the affine hull of the polytope is all of `R^n`.
    pub fn is_full_dimensional(&self) -> Result<bool, PolyError> {
        let verts = self.vertices()?;
        Ok(affine_rank(&verts) == self.dim())
    }

    pub fn euclidean_volume(&self) -> Result<Scalar, PolyError> {
        let verts = self.vertices()?;
        Ok(volume_from_vertices(self, &verts))
    }

    /// Volume of the face cut out by `row`, measured in the lattice of its
    /// hyperplane. Zero when that face is empty or has dimension below
    /// `n - 1`.
    pub fn facet_lattice_volume(&self, row: usize) -> Result<Scalar, PolyError> {
        let r = self.rows().get(row).ok_or(PolyError::NoSuchRow(row))?;
        self.check_bounded_nonempty()?;
        Ok(face_lattice_volume(self, &r.primitive()))
    }
}

fn affine_rank(verts: &[Vec<Scalar>]) -> usize {
    let Some(base) = verts.first() else {
        return 0;
    };
    let diffs: Vec<Vec<Scalar>> = verts[1..]
        .iter()
        .map(|v| v.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

fn volume_from_vertices(p: &HPolytope, verts: &[Vec<Scalar>]) -> Scalar {
    let n = p.dim();
    if affine_rank(verts) < n {
        return Scalar::zero();
    }
    let count = verts.len() as i64;
    let center: Vec<Scalar> = (0..n)
        .map(|k| verts.iter().map(|v| v[k].clone()).sum::<Scalar>().div_int(count))
        .collect();
    let total: Scalar = p
        .reduced_rows()
        .iter()
        .map(|facet| {
            let height = facet.eval(&center) - &facet.offset;
            if height.is_zero() {
                return Scalar::zero();
            }
            height * face_lattice_volume(p, facet)
        })
        .sum();
    total.div_int(n as i64)
}

/// Lattice volume of `p ∩ {<u, v> = b}` for a primitive row `(v, b)`;
/// `p` must be bounded.
fn face_lattice_volume(p: &HPolytope, facet: &Constraint) -> Scalar {
    let n = p.dim();
    let v = &facet.normal;
    let norm2: i64 = v.iter().map(|x| x * x).sum();
    // a rational point on the hyperplane
    let origin: Vec<Scalar> = v.iter().map(|&x| facet.offset.mul_int(x).div_int(norm2)).collect();
    let basis = orthogonal_lattice_basis(v);

    let mut rows = Vec::new();
    for r in p.rows() {
        // <origin + B c, w> >= b'  <=>  <c, B^T w> >= b' - <origin, w>
        let normal: Vec<i64> =
            basis.iter().map(|col| col.iter().zip(&r.normal).map(|(a, b)| a * b).sum()).collect();
        let offset = &r.offset - &dot(&r.normal, &origin);
        if normal.iter().all(|&x| x == 0) {
            if offset.is_positive() {
                return Scalar::zero();
            }
            continue;
        }
        rows.push(Constraint::new(normal, offset));
    }
    if n == 1 {
        // the face is a single point and every constraint held
        return Scalar::one();
    }
    let q = HPolytope::new(n - 1, rows).expect("restricted rows are well formed");
    let verts = q.vertices_unchecked();
    if verts.is_empty() {
        return Scalar::zero();
    }
    volume_from_vertices(&q, &verts)
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    fn brute_force_vertices(p: &HPolytope) -> BTreeSet<Vec<Scalar>> {
        // independent check: pairwise line intersections in the plane
        let rows = p.rows();
        let mut out = BTreeSet::new();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a, b) = (&rows[i], &rows[j]);
                let det = a.normal[0] * b.normal[1] - a.normal[1] * b.normal[0];
                if det == 0 {
                    continue;
                }
                let x = (a.offset.mul_int(b.normal[1]) - b.offset.mul_int(a.normal[1])).div_int(det);
                let y = (b.offset.mul_int(a.normal[0]) - a.offset.mul_int(b.normal[0])).div_int(det);
                let pnt = vec![x, y];
                if p.contains(&pnt) {
                    out.insert(pnt);
                }
            }
        }
        out
    }

    #[test]
    fn square_vertices() {
        let v = unit_square().vertices().unwrap();
        assert_eq!(v, vec![pt(&["0", "0"]), pt(&["0", "1"]), pt(&["1", "0"]), pt(&["1", "1"])]);
    }

    #[test]
    fn triangle_vertices_match_brute_force() {
        let p = poly(2, &[(&[1, 0], "0"), (&[-1, 1], "0"), (&[0, -1], "-1")]);
        let v: BTreeSet<_> = p.vertices().unwrap().into_iter().collect();
        assert_eq!(v, brute_force_vertices(&p));
        assert_eq!(v.len(), 3);
        assert!(v.contains(&pt(&["1", "1"])));
    }

    #[test]
    fn empty_and_unbounded() {
        assert_eq!(poly(1, &[(&[1], "1"), (&[-1], "0")]).vertices(), Err(PolyError::EmptyPolytope));
        assert_eq!(
            poly(2, &[(&[1, 0], "0"), (&[0, 1], "0")]).vertices(),
            Err(PolyError::UnboundedPolytope)
        );
        assert_eq!(
            poly(2, &[(&[1, 0], "1"), (&[-1, 0], "0")]).vertices(),
            Err(PolyError::EmptyPolytope)
        );
    }

    #[test]
    fn volumes() {
        assert_eq!(unit_square().euclidean_volume().unwrap(), s("1"));
        assert_eq!(triangle().euclidean_volume().unwrap(), s("1/2"));
        assert_eq!(unit_simplex().euclidean_volume().unwrap(), s("1/2"));
        let cube = poly(
            3,
            &[
                (&[1, 0, 0], "0"),
                (&[0, 1, 0], "0"),
                (&[0, 0, 1], "0"),
                (&[-1, 0, 0], "-2"),
                (&[0, -1, 0], "-2"),
                (&[0, 0, -1], "-2"),
            ],
        );
        assert_eq!(cube.euclidean_volume().unwrap(), s("8"));
        let simplex3 = poly(
            3,
            &[(&[1, 0, 0], "0"), (&[0, 1, 0], "0"), (&[0, 0, 1], "0"), (&[-1, -1, -1], "-1")],
        );
        assert_eq!(simplex3.euclidean_volume().unwrap(), s("1/6"));
        // a segment in the plane has zero area
        let seg = poly(2, &[(&[1, 0], "0"), (&[-1, 0], "-1"), (&[0, 1], "0"), (&[0, -1], "0")]);
        assert_eq!(seg.euclidean_volume().unwrap(), s("0"));
    }

    #[test]
    fn irrational_volume() {
        let p = poly(2, &[(&[1, 0], "0"), (&[0, 1], "0"), (&[-1, -1], "-sqrt(2)")]);
        assert_eq!(p.euclidean_volume().unwrap(), s("1"));
    }

    #[test]
    fn facet_volumes() {
        assert_eq!(unit_square().facet_lattice_volume(3).unwrap(), s("1"));
        // P_C on F1, row for ray (0,1) touches only the vertex (0,0)
        let pc = poly(2, &[(&[1, 0], "0"), (&[0, 1], "0"), (&[-1, 1], "0"), (&[0, -1], "-1")]);
        assert_eq!(pc.facet_lattice_volume(1).unwrap(), s("0"));
        assert_eq!(pc.facet_lattice_volume(0).unwrap(), s("1"));
        // the hypotenuse of the unit simplex has lattice length 1
        assert_eq!(unit_simplex().facet_lattice_volume(2).unwrap(), s("1"));
        // a non-tight row
        let p = poly(1, &[(&[1], "0"), (&[-1], "-1"), (&[1], "-5")]);
        assert_eq!(p.facet_lattice_volume(2).unwrap(), s("0"));
        assert_eq!(p.facet_lattice_volume(0).unwrap(), s("1"));
    }

    #[test]
    fn facet_of_3d_simplex() {
        let p = poly(
            3,
            &[(&[1, 0, 0], "0"), (&[0, 1, 0], "0"), (&[0, 0, 1], "0"), (&[-1, -1, -1], "-2")],
        );
        // each face is a lattice triangle of normalized area 4 / 2!
        for row in 0..4 {
            assert_eq!(p.facet_lattice_volume(row).unwrap(), s("2"), "row {row}");
        }
    }
}
