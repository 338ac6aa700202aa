use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{factorial, Fan, Result, ToricError};
use crate::exec::Execution;
use crate::polyhedra::{solve_square, Constraint, HPolytope, PolyError};
use crate::scalar::Scalar;

/// A torus-invariant R-divisor `sum a_r D_r` on a fan.
#[derive(Clone)]
pub struct TDivisor {
    fan: Arc<Fan>,
    coeffs: Vec<Scalar>,
}

impl PartialEq for TDivisor {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan) && self.coeffs == other.coeffs
    }
}

impl Eq for TDivisor {}

impl fmt::Debug for TDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TDivisor({} on {})", self, self.fan.name())
    }
}

/// `C:1, E:1/2` style rendering; zero coefficients are omitted.
impl fmt::Display for TDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(i, a)| format!("{}:{}", self.fan.ray_name(i), a))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(", "))
        }
    }
}

/// One row of a Hilbert function table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertRow {
    pub m: Scalar,
    pub h0: u64,
    /// `n! h0(mD) / m^n`, exact.
    pub normalized: Scalar,
}

impl TDivisor {
    pub fn new(fan: &Arc<Fan>, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != fan.num_rays() {
            return Err(ToricError::CoefficientCount { expected: fan.num_rays(), got: coeffs.len() });
        }
        for w in coeffs.windows(2) {
            w[0].try_add(&w[1])?;
        }
        if let Some(d) = coeffs.iter().find(|a| !a.is_rational()) {
            for a in &coeffs {
                a.try_add(d)?;
            }
        }
        Ok(TDivisor { fan: fan.clone(), coeffs })
    }

    pub fn zero(fan: &Arc<Fan>) -> Self {
        TDivisor { fan: fan.clone(), coeffs: vec![Scalar::zero(); fan.num_rays()] }
    }

    /// The prime divisor `D_r`.
    pub fn prime(fan: &Arc<Fan>, ray: usize) -> Self {
        let mut d = Self::zero(fan);
        d.coeffs[ray] = Scalar::one();
        d
    }

    /// Builds from `(ray key, coefficient)` pairs; unlisted rays get 0.
    pub fn from_named(fan: &Arc<Fan>, terms: &[(&str, Scalar)]) -> Result<Self> {
        let mut coeffs = vec![Scalar::zero(); fan.num_rays()];
        for (key, a) in terms {
            let i = fan
                .ray_index(key)
                .ok_or_else(|| ToricError::UnsupportedDivisor(format!("unknown ray {key:?}")))?;
            coeffs[i] = coeffs[i].try_add(a)?;
        }
        Self::new(fan, coeffs)
    }

    /// `div(chi^u) = sum <u, v_r> D_r`.
    pub fn principal(fan: &Arc<Fan>, u: &[i64]) -> Self {
        let coeffs = fan
            .rays()
            .iter()
            .map(|v| Scalar::from_int(v.iter().zip(u).map(|(a, b)| a * b).sum()))
            .collect();
        TDivisor { fan: fan.clone(), coeffs }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, ray: usize) -> &Scalar {
        &self.coeffs[ray]
    }

    fn same_fan(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.fan, &other.fan) || self.fan == other.fan {
            Ok(())
        } else {
            Err(ToricError::FanMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_fan(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(TDivisor { fan: self.fan.clone(), coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(&Scalar::from_int(-1))?)
    }

    pub fn scale(&self, m: &Scalar) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|a| a.try_mul(m)).collect::<Result<_, _>>()?;
        Ok(TDivisor { fan: self.fan.clone(), coeffs })
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.iter().all(|a| !a.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    /// Common discriminant of the coefficients (0 when all are rational).
    pub fn disc(&self) -> u64 {
        self.coeffs.iter().map(Scalar::disc).find(|&d| d != 0).unwrap_or(0)
    }

    /// Section polytope `{u : <u, v_r> >= -a_r}`.
    pub fn polytope(&self) -> HPolytope {
        let rows = self
            .fan
            .rays()
            .iter()
            .zip(&self.coeffs)
            .map(|(v, a)| Constraint::new(v.clone(), -a))
            .collect();
        HPolytope::new(self.fan.dim(), rows).expect("fan rays are nonzero")
    }

    /// `h^0(floor(D))`: integer points of the section polytope.
    pub fn h0(&self) -> u64 {
        self.h0_with(Execution::Sequential)
    }

    pub fn h0_with(&self, exec: Execution) -> u64 {
        self.polytope().lattice_points_with(exec).expect("section polytopes of complete fans are bounded")
    }

    /// `h^0(mD)` for a real `m` (floor taken after scaling).
    pub fn h0_at(&self, m: &Scalar) -> Result<u64> {
        Ok(self.scale(m)?.h0())
    }

    /// Hilbert function samples; rows come back in input order.
    pub fn hilbert_table(&self, samples: &[Scalar], exec: Execution) -> Result<Vec<HilbertRow>> {
        for m in samples {
            if !m.is_positive() {
                return Err(ToricError::NonPositiveSample(m.to_string()));
            }
        }
        let scaled = samples.iter().map(|m| self.scale(m)).collect::<Result<Vec<_>>>()?;
        let n = self.fan.dim();
        let counts = exec.map(&scaled, |d| d.h0());
        samples
            .iter()
            .zip(counts)
            .map(|(m, h0)| {
                let normalized = Scalar::from_int(factorial(n) * h0 as i64).try_div(&m.pow(n as u32))?;
                Ok(HilbertRow { m: m.clone(), h0, normalized })
            })
            .collect()
    }

    /// `n! vol(P_D)`; zero when `P_D` is empty or not full-dimensional.
    pub fn volume(&self) -> Scalar {
        match self.polytope().euclidean_volume() {
            Ok(v) => v.mul_int(factorial(self.fan.dim())),
            Err(PolyError::EmptyPolytope) => Scalar::zero(),
            Err(e) => panic!("section polytope: {e}"),
        }
    }

    /// Big iff the section polytope is full-dimensional.
    pub fn is_big(&self) -> bool {
        match self.polytope().is_full_dimensional() {
            Ok(b) => b,
            Err(PolyError::EmptyPolytope) => false,
            Err(e) => panic!("section polytope: {e}"),
        }
    }

    /// Nef iff on every maximal cone the local character `u_s` with
    /// `<u_s, v_r> = -a_r` (r in the cone) satisfies `<u_s, v_t> >= -a_t`
    /// for all rays.
    pub fn is_nef(&self) -> Result<bool> {
        Ok(self.local_characters()?.is_some())
    }

    /// The vertex `u_s` of the support function on each maximal cone, when
    /// the divisor is nef.
    pub(crate) fn local_characters(&self) -> Result<Option<Vec<Vec<Scalar>>>> {
        let p = self.polytope();
        let mut out = Vec::with_capacity(self.fan.cones().len());
        for (c, cone) in self.fan.cones().iter().enumerate() {
            let a: Vec<Vec<Scalar>> = cone
                .iter()
                .map(|&r| self.fan.ray(r).iter().map(|&x| Scalar::from_int(x)).collect())
                .collect();
            let b: Vec<Scalar> = cone.iter().map(|&r| -&self.coeffs[r]).collect();
            let u = solve_square(&a, &b).ok_or(ToricError::NonSimplicialCone(c))?;
            if !p.contains(&u) {
                return Ok(None);
            }
            out.push(u);
        }
        Ok(Some(out))
    }

    /// `D^{n-1} . D_r` for nef big `D`: `(n-1)!` times the lattice volume
    /// of the face of `P_D` orthogonal to `v_r`.
    pub fn intersection_nef(&self, ray: usize) -> Result<Scalar> {
        self.check_nef_big()?;
        self.intersection_unchecked(ray)
    }

    fn intersection_unchecked(&self, ray: usize) -> Result<Scalar> {
        if ray >= self.fan.num_rays() {
            return Err(ToricError::NoSuchRay(ray));
        }
        let n = self.fan.dim();
        let vol = self.polytope().facet_lattice_volume(ray)?;
        Ok(vol.mul_int(factorial(n - 1)))
    }

    /// `D^{n-1} . E` for nef big `D` and effective invariant `E`.
    pub fn intersection_nef_div(&self, e: &TDivisor) -> Result<Scalar> {
        self.same_fan(e)?;
        if !e.is_effective() {
            return Err(ToricError::NotEffective);
        }
        self.check_nef_big()?;
        let mut total = Scalar::zero();
        for r in e.support() {
            total = total.try_add(&self.intersection_unchecked(r)?.try_mul(&e.coeffs[r])?)?;
        }
        Ok(total)
    }

    fn check_nef_big(&self) -> Result<()> {
        if !self.is_nef()? {
            return Err(ToricError::NotNef);
        }
        if !self.is_big() {
            return Err(ToricError::NotBig);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(lit: &str) -> Scalar {
        lit.parse().unwrap()
    }

    fn f1() -> Arc<Fan> {
        Arc::new(Fan::hirzebruch(1))
    }

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::projective_space(2))
    }

    fn div(fan: &Arc<Fan>, terms: &[(&str, &str)]) -> TDivisor {
        let terms: Vec<(&str, Scalar)> = terms.iter().map(|(k, v)| (*k, s(v))).collect();
        TDivisor::from_named(fan, &terms).unwrap()
    }

    #[test]
    fn polytope_assembly() {
        let p = div(&p2(), &[("r2", "1")]).polytope();
        let rows: Vec<_> = p.rows().iter().map(|r| (r.normal.clone(), r.offset.clone())).collect();
        assert_eq!(rows, vec![(vec![1, 0], s("0")), (vec![0, 1], s("0")), (vec![-1, -1], s("-1"))]);

        // F1, D = C: {x >= 0, y >= 0, -x + y >= 0, -y >= -1}
        let p = div(&f1(), &[("C", "1")]).polytope();
        let rows: Vec<_> = p.rows().iter().map(|r| (r.normal.clone(), r.offset.clone())).collect();
        assert_eq!(
            rows,
            vec![
                (vec![1, 0], s("0")),
                (vec![0, 1], s("0")),
                (vec![-1, 1], s("0")),
                (vec![0, -1], s("-1"))
            ]
        );
        let zero = TDivisor::zero(&f1()).polytope();
        assert_eq!(zero.vertices().unwrap(), vec![vec![s("0"), s("0")]]);
    }

    #[test]
    fn h0_examples() {
        assert_eq!(div(&p2(), &[("r2", "5")]).h0(), 21);
        assert_eq!(div(&f1(), &[("C", "1")]).h0(), 3);
        assert_eq!(TDivisor::zero(&f1()).h0(), 1);
        assert_eq!(TDivisor::zero(&Arc::new(Fan::projective_space(3))).h0(), 1);
        assert_eq!(div(&p2(), &[("r0", "-1")]).h0(), 0);
    }

    #[test]
    fn hilbert_rows() {
        let h = div(&p2(), &[("r2", "1")]);
        let rows = h.hilbert_table(&[s("1"), s("2"), s("3")], Execution::Sequential).unwrap();
        assert_eq!(rows.iter().map(|r| r.h0).collect::<Vec<_>>(), vec![3, 6, 10]);
        assert_eq!(rows[0].normalized, s("6"));
        let zero = TDivisor::zero(&p2()).hilbert_table(&[s("1")], Execution::Parallel).unwrap();
        assert_eq!(zero[0].h0, 1);
        assert!(matches!(
            h.hilbert_table(&[s("0")], Execution::Sequential),
            Err(ToricError::NonPositiveSample(_))
        ));
        // irrational m is fine
        let r = h.hilbert_table(&[s("sqrt(2)")], Execution::Sequential).unwrap();
        assert_eq!(r[0].h0, 3);
        assert_eq!(r[0].normalized, s("3"));
    }

    #[test]
    fn volumes() {
        assert_eq!(div(&p2(), &[("r2", "1")]).volume(), s("1"));
        assert_eq!(div(&f1(), &[("C", "1"), ("E", "1")]).volume(), s("1"));
        assert_eq!(div(&f1(), &[("C", "1")]).volume(), s("1"));
        assert_eq!(div(&p2(), &[("r2", "2/3")]).volume(), s("4/9"));
        assert_eq!(div(&p2(), &[("r0", "-1")]).volume(), s("0"));
        assert_eq!(div(&Arc::new(Fan::projective_space(3)), &[("r3", "2")]).volume(), s("8"));
    }

    #[test]
    fn bigness() {
        assert!(div(&f1(), &[("C", "1"), ("E", "1")]).is_big());
        assert!(!div(&f1(), &[("F", "1")]).is_big());
        assert!(!TDivisor::zero(&f1()).is_big());
        assert!(!div(&p2(), &[("r0", "-1")]).is_big());
    }

    #[test]
    fn nefness() {
        assert!(div(&f1(), &[("C", "1")]).is_nef().unwrap());
        assert!(!div(&f1(), &[("C", "1"), ("E", "1")]).is_nef().unwrap());
        assert!(TDivisor::zero(&f1()).is_nef().unwrap());
        assert!(div(&p2(), &[("r1", "1/2")]).is_nef().unwrap());
        assert!(div(&f1(), &[("F", "1")]).is_nef().unwrap());
    }

    #[test]
    fn nef_intersections() {
        let f = f1();
        let c = div(&f, &[("C", "1")]);
        assert_eq!(c.intersection_nef(f.ray_index("E").unwrap()).unwrap(), s("0"));
        assert_eq!(c.intersection_nef(f.ray_index("F").unwrap()).unwrap(), s("1"));
        assert_eq!(c.intersection_nef(f.ray_index("C").unwrap()).unwrap(), s("1"));
        let h = div(&p2(), &[("r2", "1")]);
        for r in 0..3 {
            assert_eq!(h.intersection_nef(r).unwrap(), s("1"));
        }
        let ce = div(&f, &[("C", "1"), ("E", "1")]);
        assert_eq!(ce.intersection_nef(0), Err(ToricError::NotNef));
        let e = div(&f, &[("E", "2"), ("F", "1/2")]);
        assert_eq!(c.intersection_nef_div(&e).unwrap(), s("1/2"));
        // on P3, H^2 . H = 1
        let p3 = Arc::new(Fan::projective_space(3));
        let h3 = div(&p3, &[("r0", "1")]);
        assert_eq!(h3.intersection_nef(2).unwrap(), s("1"));
        assert_eq!(h3.scale(&s("2")).unwrap().intersection_nef(3).unwrap(), s("4"));
    }

    #[test]
    fn principal_shift_keeps_volume() {
        let f = f1();
        let d = div(&f, &[("C", "3/2"), ("E", "1/3"), ("F", "1/2")]);
        let shifted = d.try_add(&TDivisor::principal(&f, &[2, -1])).unwrap();
        assert_eq!(d.volume(), shifted.volume());
        assert_ne!(d.coeffs(), shifted.coeffs());
    }

    #[test]
    fn mixed_discriminants_rejected() {
        let f = f1();
        let r = TDivisor::new(&f, vec![s("sqrt(2)"), s("sqrt(3)"), s("0"), s("0")]);
        assert!(matches!(r, Err(ToricError::Scalar(_))));
        let ok = TDivisor::new(&f, vec![s("sqrt(2)"), s("1/2"), s("0"), s("1 - sqrt(2)")]).unwrap();
        assert_eq!(ok.disc(), 2);
    }

    #[test]
    fn display_uses_ray_names() {
        assert_eq!(div(&f1(), &[("C", "1"), ("E", "1/2")]).to_string(), "E:1/2, C:1");
        assert_eq!(TDivisor::zero(&f1()).to_string(), "0");
    }
}
