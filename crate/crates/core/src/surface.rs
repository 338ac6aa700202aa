//! Hirzebruch surfaces `F_e` with named fibers.
//!
//! Divisors are supported on the negative section `E` (`E^2 = -e`), the
//! disjoint positive section `C = E + eF`, and finitely many labeled fibers.
//! Distinct fibers are linearly equivalent, so numerical classes collapse to
//! `xE + yF`, but `floor` acts on each prime component separately. That is
//! what makes `h^0` sensitive to the choice of representative.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};
use crate::toric::{Fan, TDivisor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("divisor class is not big")]
    NotBig,
    #[error("divisor class is not pseudoeffective")]
    NotPseudoeffective,
    #[error("unsupported surface model: {0}")]
    UnsupportedModel(String),
    #[error("unknown component {0:?}")]
    UnknownComponent(String),
    #[error("fiber labels must be distinct and differ from E and C")]
    BadFiberLabels,
    #[error("the example needs e >= 1 and at least {0} fibers")]
    ExampleModel(usize),
    #[error("sample m = {0} must be positive")]
    NonPositiveSample(String),
    #[error("example violated at m = {m}: {detail}")]
    ExampleViolated { m: String, detail: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub type Result<T, E = SurfaceError> = std::result::Result<T, E>;

/// A prime divisor of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    E,
    C,
    Fiber(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SurfaceModel {
    e: u32,
    fibers: Vec<String>,
}

/// Numerical class `xE + yF`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NumClass {
    pub x: Scalar,
    pub y: Scalar,
}

/// `cE E + cC C + sum b_i F_i`, fiber coefficients aligned with the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SDivisor {
    pub c_e: Scalar,
    pub c_c: Scalar,
    pub fibers: Vec<Scalar>,
}

/// Zariski decomposition of a big class: nef `positive`, and
/// `negative_e * E` with `positive . E = 0` whenever `negative_e > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZariskiPair {
    pub positive: NumClass,
    pub negative_e: Scalar,
    pub volume: Scalar,
}

impl SurfaceModel {
    pub fn new(e: u32, fibers: Vec<String>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for f in &fibers {
            if f == "E" || f == "C" || f.is_empty() || !seen.insert(f.as_str()) {
                return Err(SurfaceError::BadFiberLabels);
            }
        }
        Ok(SurfaceModel { e, fibers })
    }

    /// `F_e` with fibers `p1..pk`.
    pub fn with_fibers(e: u32, k: usize) -> Self {
        SurfaceModel { e, fibers: (1..=k).map(|i| format!("p{i}")).collect() }
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn fibers(&self) -> &[String] {
        &self.fibers
    }

    pub fn component(&self, key: &str) -> Option<Component> {
        match key {
            "E" => Some(Component::E),
            "C" => Some(Component::C),
            _ => self.fibers.iter().position(|f| f == key).map(Component::Fiber),
        }
    }

    pub fn component_name(&self, c: Component) -> &str {
        match c {
            Component::E => "E",
            Component::C => "C",
            Component::Fiber(i) => &self.fibers[i],
        }
    }

    /// Intersection pairing on classes: `E^2 = -e, E.F = 1, F^2 = 0`.
    pub fn intersect(&self, a: &NumClass, b: &NumClass) -> Scalar {
        let e = Scalar::from_int(self.e as i64);
        -(&e * &a.x * &b.x) + &a.x * &b.y + &a.y * &b.x
    }

    pub fn class_of_component(&self, c: Component) -> NumClass {
        match c {
            Component::E => NumClass { x: Scalar::one(), y: Scalar::zero() },
            Component::C => NumClass { x: Scalar::one(), y: Scalar::from_int(self.e as i64) },
            Component::Fiber(_) => NumClass { x: Scalar::zero(), y: Scalar::one() },
        }
    }

    /// `[D] = (cE + cC) E + (e cC + sum b_i) F`.
    pub fn class_of(&self, d: &SDivisor) -> Result<NumClass> {
        let x = d.c_e.try_add(&d.c_c)?;
        let mut y = d.c_c.mul_int(self.e as i64);
        for b in &d.fibers {
            y = y.try_add(b)?;
        }
        Ok(NumClass { x, y })
    }

    /// `h^0(xE + yF) = sum_{k=0}^{x} max(0, y - ke + 1)`, and 0 for `x < 0`.
    pub fn h0_class(x: i64, y: i64, e: u32) -> u64 {
        if x < 0 {
            return 0;
        }
        (0..=x).map(|k| (y - k * e as i64 + 1).max(0) as u64).sum()
    }

    /// `h^0(floor(D))`, flooring every prime component before collapsing
    /// to a class.
    pub fn h0(&self, d: &SDivisor) -> u64 {
        let f = d.floor();
        let class = self.class_of(&f).expect("integer coefficients are rational");
        let x = class.x.floor_i64();
        let y = class.y.floor_i64();
        Self::h0_class(x, y, self.e)
    }

    pub fn h0_at(&self, d: &SDivisor, m: &Scalar) -> Result<u64> {
        Ok(self.h0(&d.scale(m)?))
    }

    pub fn is_big(&self, d: &SDivisor) -> Result<bool> {
        let c = self.class_of(d)?;
        Ok(c.x.is_positive() && c.y.is_positive())
    }

    pub fn is_nef(&self, d: &SDivisor) -> Result<bool> {
        let c = self.class_of(d)?;
        let de = self.intersect(&c, &self.class_of_component(Component::E));
        Ok(!de.is_negative() && !c.x.is_negative())
    }

    /// Classical Zariski decomposition with the negative curve `E` as the
    /// only candidate: if `D.E < 0`, subtract `cE` with `(D - cE).E = 0`.
    pub fn zariski(&self, d: &SDivisor) -> Result<ZariskiPair> {
        let class = self.class_of(d)?;
        self.zariski_class(&class)
    }

    pub fn zariski_class(&self, class: &NumClass) -> Result<ZariskiPair> {
        if class.x.is_negative() || class.y.is_negative() {
            return Err(SurfaceError::NotPseudoeffective);
        }
        if !class.x.is_positive() || !class.y.is_positive() {
            return Err(SurfaceError::NotBig);
        }
        let e_class = self.class_of_component(Component::E);
        let de = self.intersect(class, &e_class);
        let (positive, negative_e) = if de.is_negative() {
            // (x - c)(-e) + y = 0
            let c = &class.x - &class.y.div_int(self.e as i64);
            (NumClass { x: &class.x - &c, y: class.y.clone() }, c)
        } else {
            (class.clone(), Scalar::zero())
        };
        let f_class = self.class_of_component(Component::Fiber(0));
        let pe = self.intersect(&positive, &e_class);
        let pf = self.intersect(&positive, &f_class);
        let volume = self.intersect(&positive, &positive);
        if pe.is_negative() || pf.is_negative() || !volume.is_positive() {
            return Err(SurfaceError::NotPseudoeffective);
        }
        Ok(ZariskiPair { positive, negative_e, volume })
    }

    /// `P^2` for big classes, 0 otherwise.
    pub fn volume(&self, d: &SDivisor) -> Result<Scalar> {
        match self.zariski(d) {
            Ok(z) => Ok(z.volume),
            Err(SurfaceError::NotBig | SurfaceError::NotPseudoeffective) => Ok(Scalar::zero()),
            Err(e) => Err(e),
        }
    }

    /// `N_sigma(D)` as a divisor (supported on `E`).
    pub fn nsigma(&self, d: &SDivisor) -> Result<SDivisor> {
        let z = self.zariski(d)?;
        let mut n = SDivisor::zero(self);
        n.c_e = z.negative_e;
        Ok(n)
    }

    /// Divisorial augmented base locus of a big divisor: `{E}` exactly when
    /// `D.E <= 0`, since `E` is the only curve a big nef class can be
    /// orthogonal to.
    pub fn bplus_div(&self, d: &SDivisor) -> Result<BTreeSet<Component>> {
        if !self.is_big(d)? {
            return Err(SurfaceError::NotBig);
        }
        let de = self.intersect(&self.class_of(d)?, &self.class_of_component(Component::E));
        Ok(if de.is_positive() { BTreeSet::new() } else { BTreeSet::from([Component::E]) })
    }

    /// `D . E'` for a divisor `E'` given componentwise.
    pub fn intersect_divisors(&self, a: &SDivisor, b: &SDivisor) -> Result<Scalar> {
        Ok(self.intersect(&self.class_of(a)?, &self.class_of(b)?))
    }

    /// The model matching a toric `F_e` preset, with fibers `F` and `Finf`.
    pub fn from_fan(fan: &Fan) -> Result<Self> {
        let e = fan.ray(2).get(1).copied().unwrap_or(-1);
        if fan.dim() != 2 || e < 0 || *fan != Fan::hirzebruch(e as u32) {
            return Err(SurfaceError::UnsupportedModel(format!("fan {} is not F_e", fan.name())));
        }
        SurfaceModel::new(e as u32, vec!["F".into(), "Finf".into()])
    }

    /// Converts an invariant divisor on the `F_e` fan.
    pub fn divisor_from_toric(&self, d: &TDivisor) -> Result<SDivisor> {
        let fan = d.fan();
        let get = |name: &str| fan.ray_index(name).map(|i| d.coeff(i).clone());
        match (get("E"), get("C"), get("F"), get("Finf")) {
            (Some(c_e), Some(c_c), Some(f0), Some(f1)) if self.fibers.len() == 2 => {
                Ok(SDivisor { c_e, c_c, fibers: vec![f0, f1] })
            }
            _ => Err(SurfaceError::UnsupportedModel("expected an F_e fan divisor".into())),
        }
    }
}

impl SDivisor {
    pub fn zero(model: &SurfaceModel) -> Self {
        SDivisor { c_e: Scalar::zero(), c_c: Scalar::zero(), fibers: vec![Scalar::zero(); model.fibers.len()] }
    }

    pub fn from_named(model: &SurfaceModel, terms: &[(&str, Scalar)]) -> Result<Self> {
        let mut d = SDivisor::zero(model);
        for (key, a) in terms {
            let c = model.component(key).ok_or_else(|| SurfaceError::UnknownComponent(key.to_string()))?;
            let slot = d.slot_mut(c);
            *slot = slot.try_add(a)?;
        }
        d.check_disc()?;
        Ok(d)
    }

    fn check_disc(&self) -> Result<()> {
        let all: Vec<&Scalar> = self.coefficients().collect();
        if let Some(irr) = all.iter().find(|a| !a.is_rational()) {
            for a in &all {
                a.try_add(irr)?;
            }
        }
        Ok(())
    }

    fn slot_mut(&mut self, c: Component) -> &mut Scalar {
        match c {
            Component::E => &mut self.c_e,
            Component::C => &mut self.c_c,
            Component::Fiber(i) => &mut self.fibers[i],
        }
    }

    pub fn coeff(&self, c: Component) -> &Scalar {
        match c {
            Component::E => &self.c_e,
            Component::C => &self.c_c,
            Component::Fiber(i) => &self.fibers[i],
        }
    }

    fn coefficients(&self) -> impl Iterator<Item = &Scalar> {
        [&self.c_e, &self.c_c].into_iter().chain(self.fibers.iter())
    }

    fn components(&self) -> impl Iterator<Item = (Component, &Scalar)> {
        [(Component::E, &self.c_e), (Component::C, &self.c_c)]
            .into_iter()
            .chain(self.fibers.iter().enumerate().map(|(i, b)| (Component::Fiber(i), b)))
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&Scalar, &Scalar) -> Result<Scalar, ScalarError>,
    ) -> Result<Self> {
        assert_eq!(self.fibers.len(), other.fibers.len(), "divisors on different models");
        Ok(SDivisor {
            c_e: f(&self.c_e, &other.c_e)?,
            c_c: f(&self.c_c, &other.c_c)?,
            fibers: self.fibers.iter().zip(&other.fibers).map(|(a, b)| f(a, b)).collect::<Result<_, _>>()?,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, Scalar::try_add)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, Scalar::try_sub)
    }

    pub fn scale(&self, m: &Scalar) -> Result<Self> {
        self.zip_with(self, |a, _| a.try_mul(m))
    }

    /// Componentwise floor.
    pub fn floor(&self) -> Self {
        let fl = |a: &Scalar| Scalar::from_bigint(a.floor());
        SDivisor { c_e: fl(&self.c_e), c_c: fl(&self.c_c), fibers: self.fibers.iter().map(fl).collect() }
    }

    pub fn is_effective(&self) -> bool {
        self.coefficients().all(|a| !a.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().all(Scalar::is_zero)
    }

    pub fn support(&self) -> BTreeSet<Component> {
        self.components().filter(|(_, a)| !a.is_zero()).map(|(c, _)| c).collect()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.components().zip(other.components()).all(|((_, a), (_, b))| a <= b)
    }

    pub fn display<'a>(&'a self, model: &'a SurfaceModel) -> impl fmt::Display + 'a {
        struct Show<'a>(&'a SDivisor, &'a SurfaceModel);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let terms: Vec<String> = self
                    .0
                    .components()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(c, a)| format!("{}:{}", self.1.component_name(c), a))
                    .collect();
                if terms.is_empty() {
                    f.write_str("0")
                } else {
                    f.write_str(&terms.join(", "))
                }
            }
        }
        Show(self, model)
    }
}

/// One sample of the R-linear equivalence example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExampleRow {
    pub m: Scalar,
    /// `floor(mD') . E`, from the floored divisor's class.
    pub floor_dot_e: i64,
    /// `h^0(mD')`.
    pub h0_shifted: u64,
    /// `h^0(mC)`.
    pub h0_section: u64,
}

/// `D' = C + (F_1 - F_2) + sqrt(2) (F_3 - F_4)`, which is R-linearly
/// equivalent to `C`.
pub fn example_divisor(model: &SurfaceModel) -> Result<SDivisor> {
    if model.e == 0 || model.fibers.len() < 4 {
        return Err(SurfaceError::ExampleModel(4));
    }
    let mut d = SDivisor::zero(model);
    d.c_c = Scalar::one();
    d.fibers[0] = Scalar::one();
    d.fibers[1] = Scalar::from_int(-1);
    d.fibers[2] = Scalar::sqrt(2);
    d.fibers[3] = -Scalar::sqrt(2);
    Ok(d)
}

/// For each `m`, checks `floor(mD') . E <= -1` and `h^0(mD') < h^0(mC)`.
/// The intersection is cross-checked against
/// `floor(m) + floor(-m) + floor(sqrt2 m) + floor(-sqrt2 m)`.
pub fn paper_example(e: u32, samples: &[Scalar]) -> Result<Vec<ExampleRow>> {
    let model = SurfaceModel::with_fibers(e, 4);
    let shifted = example_divisor(&model)?;
    let mut section = SDivisor::zero(&model);
    section.c_c = Scalar::one();
    let e_class = model.class_of_component(Component::E);
    let sqrt2 = Scalar::sqrt(2);

    samples
        .iter()
        .map(|m| {
            if !m.is_positive() {
                return Err(SurfaceError::NonPositiveSample(m.to_string()));
            }
            let floored = shifted.scale(m)?.floor();
            let dot = model.intersect(&model.class_of(&floored)?, &e_class);
            let sm = m.try_mul(&sqrt2)?;
            let formula = m.floor() + (-m).floor() + sm.floor() + (-&sm).floor();
            let floor_dot_e = dot.floor_i64();
            let violated = |detail: String| SurfaceError::ExampleViolated { m: m.to_string(), detail };
            if Scalar::from_bigint(formula.clone()) != dot {
                return Err(violated(format!("intersection {dot} disagrees with floor sum {formula}")));
            }
            if floor_dot_e > -1 {
                return Err(violated(format!("floor(mD').E = {floor_dot_e} is not negative")));
            }
            let h0_shifted = model.h0(&shifted.scale(m)?);
            let h0_section = model.h0(&section.scale(m)?);
            if h0_shifted >= h0_section {
                return Err(violated(format!("h0(mD') = {h0_shifted} >= h0(mC) = {h0_section}")));
            }
            Ok(ExampleRow { m: m.clone(), floor_dot_e, h0_shifted, h0_section })
        })
        .collect()
}
