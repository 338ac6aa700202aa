//! Asymptotic multiplicities, the divisorial Zariski decomposition and the
//! divisorial augmented base locus.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use super::{Result, TDivisor, ToricError};
use crate::polyhedra::{lp_solve, Constraint, HPolytope, LpOutcome, LpProblem};
use crate::scalar::Scalar;

/// `D = P_sigma + N_sigma` with `N_sigma = sum sigma_r(D) D_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaDecomposition {
    pub original: TDivisor,
    pub nsigma: TDivisor,
    pub psigma: TDivisor,
}

impl SigmaDecomposition {
    /// Re-checks `N >= 0`, `P + N = D` and `sigma_r(P) = 0` for every ray.
    pub fn verify(&self) -> Result<bool> {
        if !self.nsigma.is_effective() {
            return Ok(false);
        }
        if self.psigma.try_add(&self.nsigma)? != self.original {
            return Ok(false);
        }
        for r in 0..self.psigma.fan().num_rays() {
            if !self.psigma.sigma(r)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Halving schedule for [`TDivisor::bplus_div`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BplusOptions {
    /// Number of halvings `K` of the starting epsilon.
    pub max_steps: u32,
    /// Consecutive identical supports required to stop.
    pub stable_run: u32,
}

impl Default for BplusOptions {
    fn default() -> Self {
        BplusOptions { max_steps: 20, stable_run: 3 }
    }
}

impl TDivisor {
    /// `sigma_r(D) = min { a_r + <u, v_r> : u in P_D }`.
    pub fn sigma(&self, ray: usize) -> Result<Scalar> {
        if ray >= self.fan().num_rays() {
            return Err(ToricError::NoSuchRay(ray));
        }
        if !self.is_big() {
            return Err(ToricError::NotBig);
        }
        Ok(self.sigma_unchecked(ray))
    }

    fn sigma_unchecked(&self, ray: usize) -> Scalar {
        let lp = LpProblem {
            objective: self.fan().ray(ray).to_vec(),
            constant: self.coeff(ray).clone(),
            constraints: self.polytope(),
        };
        match lp_solve(&lp) {
            LpOutcome::Optimal { value, .. } => value,
            other => unreachable!("sigma LP over a nonempty bounded polytope: {other:?}"),
        }
    }

    fn sigma_vector(&self) -> Vec<Scalar> {
        (0..self.fan().num_rays()).map(|r| self.sigma_unchecked(r)).collect()
    }

    pub fn sigma_decomposition(&self) -> Result<SigmaDecomposition> {
        if !self.is_big() {
            return Err(ToricError::NotBig);
        }
        let nsigma = TDivisor::new(self.fan(), self.sigma_vector())?;
        let psigma = self.try_sub(&nsigma)?;
        Ok(SigmaDecomposition { original: self.clone(), nsigma, psigma })
    }

    /// `Supp N_sigma(D)`.
    pub fn nsigma_support(&self) -> Result<BTreeSet<usize>> {
        Ok(self.sigma_decomposition()?.nsigma.support())
    }

    /// An ample divisor on the fan, from an LP maximizing the strict
    /// convexity margin of a piecewise linear support function. The local
    /// character on the first cone is pinned to 0, so the result is
    /// effective with integer coefficients.
    pub fn ample(fan: &std::sync::Arc<super::Fan>) -> Result<TDivisor> {
        let coeffs = fan.ample.get_or_init(|| ample_coefficients(fan)).clone();
        match coeffs {
            Some(c) => TDivisor::new(fan, c),
            None => Err(ToricError::NotProjective),
        }
    }

    /// Divisorial augmented base locus: `Supp N_sigma(D - eps A)` for small
    /// `eps`, found along `eps_0 / 2^k`.
    ///
    /// Stops once `stable_run` consecutive supports agree and every ray in
    /// the support is certified to stay there as `eps -> 0`: either
    /// `sigma_r(D) > 0`, or `f(eps) = 2 f(eps/2)` for
    /// `f(eps) = sigma_r(D - eps A)`, which for the convex, nondecreasing,
    /// piecewise linear `f` with `f(0) = 0` pins `f` to a line through the
    /// origin on `[0, eps]`. Rays leaving the support never return.
    pub fn bplus_div(&self, opts: BplusOptions) -> Result<BTreeSet<usize>> {
        let base = self.sigma_decomposition()?.nsigma;
        let a = TDivisor::ample(self.fan())?;
        let half = Scalar::ratio(1, 2);

        let mut eps = Scalar::one();
        let mut tries = 0;
        while !self.try_sub(&a.scale(&eps)?)?.is_big() {
            tries += 1;
            if tries > opts.max_steps {
                return Err(ToricError::NoStabilization { steps: opts.max_steps });
            }
            eps = &eps * &half;
        }

        let support_of = |v: &[Scalar]| -> BTreeSet<usize> {
            (0..v.len()).filter(|&i| !v[i].is_zero()).collect()
        };
        let mut prev: Option<Vec<Scalar>> = None;
        let mut run = 0u32;
        for _ in 0..=opts.max_steps {
            let shifted = self.try_sub(&a.scale(&eps)?)?;
            if !shifted.is_big() {
                return Err(ToricError::NotBig);
            }
            let sig = shifted.sigma_vector();
            let supp = support_of(&sig);
            match &prev {
                Some(p) if support_of(p) == supp => run += 1,
                _ => run = 1,
            }
            if run >= opts.stable_run {
                let p = prev.as_ref().expect("run >= 2 implies a previous step");
                let certified = supp.iter().all(|&r| {
                    base.coeff(r).is_positive() || p[r] == sig[r].mul_int(2)
                });
                if certified {
                    return Ok(supp);
                }
            }
            prev = Some(sig);
            eps = &eps * &half;
        }
        Err(ToricError::NoStabilization { steps: opts.max_steps })
    }

    /// `(1/m) min { m a_r + <u, v_r> : u integer point of P_{mD} }` for each
    /// `m`; each value bounds `sigma_r(D)` from above.
    pub fn sigma_limit_oracle(&self, ray: usize, ms: &[i64]) -> Result<Vec<Scalar>> {
        if ray >= self.fan().num_rays() {
            return Err(ToricError::NoSuchRay(ray));
        }
        if !self.is_big() {
            return Err(ToricError::NotBig);
        }
        ms.iter()
            .map(|&m| {
                let ms = Scalar::from_int(m);
                if m <= 0 {
                    return Err(ToricError::NonPositiveSample(ms.to_string()));
                }
                let md = self.scale(&ms)?;
                let best = md
                    .polytope()
                    .min_over_lattice_points(self.fan().ray(ray))?
                    .ok_or_else(|| ToricError::NoSections(ms.to_string()))?;
                Ok((md.coeff(ray) + &Scalar::from_int(best)).div_int(m))
            })
            .collect()
    }
}

fn ample_coefficients(fan: &super::Fan) -> Option<Vec<Scalar>> {
    let n = fan.dim();
    let r = fan.num_rays();
    let cones = fan.cones();
    // variables: a_0..a_{r-1}, u_1..u_{c-1} (n each), t
    let nvars = r + n * (cones.len() - 1) + 1;
    let t = nvars - 1;
    let u_at = |c: usize, k: usize| r + n * (c - 1) + k;
    let mut rows = Vec::new();
    for (c, cone) in cones.iter().enumerate() {
        for rho in 0..r {
            // <u_c, v_rho> + a_rho  (= 0 inside the cone, >= t outside)
            let mut row = vec![0i64; nvars];
            row[rho] = 1;
            if c > 0 {
                for k in 0..n {
                    row[u_at(c, k)] = fan.ray(rho)[k];
                }
            }
            if cone.contains(&rho) {
                rows.push(Constraint::new(row.iter().map(|x| -x).collect(), Scalar::zero()));
                rows.push(Constraint::new(row, Scalar::zero()));
            } else {
                row[t] = -1;
                rows.push(Constraint::new(row, Scalar::zero()));
            }
        }
    }
    let mut cap = vec![0i64; nvars];
    cap[t] = -1;
    rows.push(Constraint::new(cap, Scalar::from_int(-1)));
    let rows = rows.into_iter().filter(|c| c.normal.iter().any(|&x| x != 0)).collect();
    let mut objective = vec![0i64; nvars];
    objective[t] = -1;
    let lp = LpProblem {
        objective,
        constant: Scalar::zero(),
        constraints: HPolytope::new(nvars, rows).ok()?,
    };
    let LpOutcome::Optimal { point, .. } = lp_solve(&lp) else {
        return None;
    };
    if !point[t].is_positive() {
        return None;
    }
    let coeffs = &point[..r];
    let lcm = coeffs.iter().fold(BigInt::one(), |l, a| {
        l.lcm(a.as_rational().expect("LP over rational data").denom())
    });
    let scale = Scalar::from_bigint(lcm);
    Some(coeffs.iter().map(|a| a * &scale).collect())
}
