use std::collections::BTreeMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::polyhedra::{kernel_vector, rank};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("fan must have positive dimension and at least one ray")]
    Degenerate,
    #[error("ray {index} has length {got}, expected {expected}")]
    RayLength { index: usize, expected: usize, got: usize },
    #[error("ray {index} {ray:?} is not a primitive nonzero integer vector")]
    NonPrimitiveRay { index: usize, ray: Vec<i64> },
    #[error("ray {0} appears twice")]
    DuplicateRay(usize),
    #[error("cone {cone} refers to missing ray {ray}")]
    BadRayIndex { cone: usize, ray: usize },
    #[error("cone {0} is not simplicial of full dimension")]
    NonSimplicialCone(usize),
    #[error("codimension-one face {face:?} lies in {count} maximal cones, expected 2")]
    Incomplete { face: Vec<usize>, count: usize },
    #[error("cones meeting along face {0:?} overlap")]
    Overlapping(Vec<usize>),
    #[error("unknown fan preset {0:?}")]
    UnknownPreset(String),
    #[error("ray names must be unique and match the ray count")]
    BadNames,
}

/// A complete simplicial fan given by primitive rays and maximal cones.
#[derive(Debug)]
pub struct Fan {
    name: String,
    dim: usize,
    rays: Vec<Vec<i64>>,
    ray_names: Vec<String>,
    cones: Vec<Vec<usize>>,
    pub(crate) ample: OnceLock<Option<Vec<Scalar>>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x)) == 1
}

fn to_scalars(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| Scalar::from_int(x)).collect()
}

impl Fan {
    /// Validates rays and cones; rays are named `r0, r1, ...`.
    pub fn new(rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Fan, FanError> {
        let names = (0..rays.len()).map(|i| format!("r{i}")).collect();
        Fan::with_names("custom", rays, names, cones)
    }

    pub fn with_names(
        name: &str,
        rays: Vec<Vec<i64>>,
        ray_names: Vec<String>,
        mut cones: Vec<Vec<usize>>,
    ) -> Result<Fan, FanError> {
        let dim = rays.first().map_or(0, Vec::len);
        if dim == 0 || rays.is_empty() {
            return Err(FanError::Degenerate);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::RayLength { index: i, expected: dim, got: r.len() });
            }
            if !is_primitive(r) {
                return Err(FanError::NonPrimitiveRay { index: i, ray: r.clone() });
            }
            if rays[..i].contains(r) {
                return Err(FanError::DuplicateRay(i));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if ray_names.len() != rays.len() || !ray_names.iter().all(|n| seen.insert(n.as_str())) {
            return Err(FanError::BadNames);
        }
        for (c, cone) in cones.iter_mut().enumerate() {
            cone.sort_unstable();
            cone.dedup();
            if let Some(&bad) = cone.iter().find(|&&r| r >= rays.len()) {
                return Err(FanError::BadRayIndex { cone: c, ray: bad });
            }
            let gens: Vec<Vec<Scalar>> = cone.iter().map(|&r| to_scalars(&rays[r])).collect();
            if cone.len() != dim || rank(&gens) != dim {
                return Err(FanError::NonSimplicialCone(c));
            }
        }
        cones.sort();
        let fan = Fan {
            name: name.to_string(),
            dim,
            rays,
            ray_names,
            cones,
            ample: OnceLock::new(),
        };
        fan.check_complete()?;
        Ok(fan)
    }

    /// Every codimension-one face lies in exactly two maximal cones, on
    /// opposite sides of its hyperplane.
    fn check_complete(&self) -> Result<(), FanError> {
        let mut faces: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, cone) in self.cones.iter().enumerate() {
            for skip in 0..cone.len() {
                let face: Vec<usize> =
                    cone.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                faces.entry(face).or_default().push(c);
            }
        }
        if faces.is_empty() {
            return Err(FanError::Incomplete { face: vec![], count: 0 });
        }
        for (face, owners) in faces {
            if owners.len() != 2 {
                return Err(FanError::Incomplete { face, count: owners.len() });
            }
            let gens: Vec<Vec<Scalar>> = face.iter().map(|&r| to_scalars(&self.rays[r])).collect();
            let normal = kernel_vector(&gens, self.dim).expect("face spans a hyperplane");
            let side = |cone: &Vec<usize>| {
                let apex = cone.iter().find(|r| !face.contains(r)).unwrap();
                to_scalars(&self.rays[*apex])
                    .iter()
                    .zip(&normal)
                    .map(|(a, b)| a * b)
                    .sum::<Scalar>()
                    .signum()
            };
            if side(&self.cones[owners[0]]) == side(&self.cones[owners[1]]) {
                return Err(FanError::Overlapping(face));
            }
        }
        Ok(())
    }

    /// `P<n>` (n = 1..=6), `P1xP1`, or `F<e>` / `F_<e>` for a Hirzebruch surface.
    pub fn preset(name: &str) -> Result<Fan, FanError> {
        let unknown = || FanError::UnknownPreset(name.to_string());
        match name {
            "P1xP1" | "P1*P1" => return Ok(Fan::p1xp1()),
            _ => {}
        }
        if let Some(n) = name.strip_prefix('P') {
            let n: usize = n.parse().map_err(|_| unknown())?;
            if !(1..=6).contains(&n) {
                return Err(unknown());
            }
            return Ok(Fan::projective_space(n));
        }
        if let Some(e) = name.strip_prefix("F_").or_else(|| name.strip_prefix('F')) {
            let e: u32 = e.parse().map_err(|_| unknown())?;
            return Ok(Fan::hirzebruch(e));
        }
        Err(unknown())
    }

    /// `P^n`: rays `e_1..e_n, -(e_1+..+e_n)`, named `r0..rn`.
    pub fn projective_space(n: usize) -> Fan {
        let mut rays: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        rays.push(vec![-1; n]);
        let cones = (0..=n).map(|skip| (0..=n).filter(|&i| i != skip).collect()).collect();
        let names = (0..=n).map(|i| format!("r{i}")).collect();
        Fan::with_names(&format!("P{n}"), rays, names, cones).expect("valid preset")
    }

    pub fn p1xp1() -> Fan {
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
        let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        let names = (0..4).map(|i| format!("r{i}")).collect();
        Fan::with_names("P1xP1", rays, names, cones).expect("valid preset")
    }

    /// Hirzebruch surface `F_e`. Rays: `F = (1,0)` and `Finf = (-1,e)` are
    /// fibers, `E = (0,1)` is the section with `E^2 = -e`, and
    /// `C = (0,-1)` is the section `E + eF` disjoint from `E`.
    pub fn hirzebruch(e: u32) -> Fan {
        let e = e as i64;
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, e], vec![0, -1]];
        let names = ["F", "E", "Finf", "C"].iter().map(|s| s.to_string()).collect();
        let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        Fan::with_names(&format!("F{e}"), rays, names, cones).expect("valid preset")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn ray_names(&self) -> &[String] {
        &self.ray_names
    }

    pub fn ray_name(&self, i: usize) -> &str {
        &self.ray_names[i]
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    /// Resolves a ray by name, by `r<k>`, or by its decimal index.
    pub fn ray_index(&self, key: &str) -> Option<usize> {
        if let Some(i) = self.ray_names.iter().position(|n| n == key) {
            return Some(i);
        }
        let idx = key.strip_prefix('r').unwrap_or(key).parse::<usize>().ok()?;
        (idx < self.rays.len()).then_some(idx)
    }
}
