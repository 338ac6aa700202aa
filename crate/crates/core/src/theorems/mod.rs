//! Checkers for the volume-preservation equivalences.
//!
//! Theorem A relates `vol(D - E) = vol(D)` to `E <= N_sigma(D)`, Theorem B
//! relates `vol(D + E) = vol(D)` to `Supp E` lying in the divisorial
//! augmented base locus. Clauses i), ii) and v) are decided exactly. The
//! clauses quantifying over all `m > 0` or all `D' ~_R D` are only sampled,
//! so a passing sample never confirms them; a failing one is a witness.

mod corpus;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::scalar::{Scalar, ScalarError};
use crate::surface::{Component, SDivisor, SurfaceError, SurfaceModel};
use crate::toric::{BplusOptions, TDivisor, ToricError};
use crate::Execution;

pub use corpus::{
    corpus_run, generate_instance, CorpusSummary, EMode, EquivalenceStats, InstanceOutcome, Replay,
    CORPUS_PRESETS,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("D is not big")]
    NotBig,
    #[error("E is not effective")]
    NotEffective,
    #[error("D and E live on different varieties")]
    Mismatch,
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub type Result<T, E = CheckError> = std::result::Result<T, E>;

/// A pair `(D, E)` on a toric variety or on a Hirzebruch surface model.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Instance {
    Toric { d: TDivisor, e: TDivisor },
    Surface { model: SurfaceModel, d: SDivisor, e: SDivisor },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Theorem {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    I,
    Ii,
    Iii,
    Iv,
    V,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ClauseValue {
    /// Decided and true.
    Holds,
    /// Decided false, or a sample failed.
    Fails,
    /// Sampled clause with no failing sample.
    NoCounterexample { samples: usize },
    Skipped { reason: String },
}

impl ClauseValue {
    fn decided(b: bool) -> Self {
        if b {
            ClauseValue::Holds
        } else {
            ClauseValue::Fails
        }
    }

    pub fn is_holds(&self) -> bool {
        *self == ClauseValue::Holds
    }

    pub fn is_fails(&self) -> bool {
        *self == ClauseValue::Fails
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Witness {
    /// Two sides of a decided identity.
    Values { lhs: Scalar, rhs: Scalar },
    /// Prime components violating a containment or inequality.
    Components { names: Vec<String> },
    /// A failing sample; `shift` is 0 for `D` itself.
    Sample { m: Scalar, r: Option<Scalar>, shift: usize, lhs: u64, rhs: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ConsistentWithPaper,
    CounterexampleCandidate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub variety: String,
    pub d: String,
    pub e: String,
    pub clauses: BTreeMap<Clause, ClauseValue>,
    pub witnesses: BTreeMap<Clause, Witness>,
    pub verdict: Verdict,
    /// `N_sigma(D + E) = N_sigma(D) + E` with equal sampled `h^0`, when
    /// `Supp E` lies in `Supp N_sigma(D)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negsections2: Option<bool>,
    pub notes: Vec<String>,
}

impl TheoremReport {
    pub fn clause(&self, c: Clause) -> &ClauseValue {
        &self.clauses[&c]
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict == Verdict::ConsistentWithPaper
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    pub m_grid: Vec<Scalar>,
    pub r_grid: Vec<Scalar>,
    /// Random `R`-linear shifts of `D` used for clause iii), besides `D`.
    pub shifts: usize,
    pub seed: u64,
    pub bplus: BplusOptions,
}

impl CheckOptions {
    /// Grid `{1, 2, 3, 5/2}` plus `sqrt(disc)` when `disc > 1`.
    pub fn with_disc(disc: u64) -> Self {
        let mut m_grid: Vec<Scalar> = vec![Scalar::one(), Scalar::from_int(2), Scalar::from_int(3), Scalar::ratio(5, 2)];
        if disc > 1 {
            m_grid.push(Scalar::sqrt(disc));
        }
        CheckOptions {
            m_grid,
            r_grid: vec![Scalar::one(), Scalar::ratio(1, 2)],
            shifts: 2,
            seed: 0,
            bplus: BplusOptions::default(),
        }
    }
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions::with_disc(2)
    }
}

/// The operations the checkers need from a model.
trait Geometry {
    type Div: Clone;
    fn name(&self) -> String;
    fn show(&self, d: &Self::Div) -> String;
    fn add(&self, a: &Self::Div, b: &Self::Div) -> Result<Self::Div>;
    fn sub(&self, a: &Self::Div, b: &Self::Div) -> Result<Self::Div>;
    fn scale(&self, a: &Self::Div, m: &Scalar) -> Result<Self::Div>;
    fn le(&self, a: &Self::Div, b: &Self::Div) -> bool;
    fn is_big(&self, d: &Self::Div) -> Result<bool>;
    fn is_effective(&self, d: &Self::Div) -> bool;
    fn is_zero(&self, d: &Self::Div) -> bool;
    fn compatible(&self, d: &Self::Div, m: &Scalar) -> bool;
    fn support(&self, d: &Self::Div) -> BTreeSet<String>;
    /// Components where `a > b`.
    fn exceeding(&self, a: &Self::Div, b: &Self::Div) -> Vec<String>;
    fn volume(&self, d: &Self::Div) -> Result<Scalar>;
    fn h0(&self, d: &Self::Div) -> u64;
    fn nsigma(&self, d: &Self::Div) -> Result<Self::Div>;
    fn bplus(&self, d: &Self::Div, opts: BplusOptions) -> Result<BTreeSet<String>>;
    fn is_nef(&self, d: &Self::Div) -> Result<bool>;
    /// `D^{n-1} . E` for nef big `D`.
    fn nef_intersection(&self, d: &Self::Div, e: &Self::Div) -> Result<Scalar>;
    /// Differences `D' - D` of random divisors `R`-linearly equivalent to `D`.
    fn shift(&self, rng: &mut ChaCha8Rng) -> Option<Self::Div>;
}

struct Toric<'a>(&'a TDivisor);

impl Geometry for Toric<'_> {
    type Div = TDivisor;

    fn name(&self) -> String {
        self.0.fan().name().to_string()
    }
    fn show(&self, d: &TDivisor) -> String {
        d.to_string()
    }
    fn add(&self, a: &TDivisor, b: &TDivisor) -> Result<TDivisor> {
        Ok(a.try_add(b)?)
    }
    fn sub(&self, a: &TDivisor, b: &TDivisor) -> Result<TDivisor> {
        Ok(a.try_sub(b)?)
    }
    fn scale(&self, a: &TDivisor, m: &Scalar) -> Result<TDivisor> {
        Ok(a.scale(m)?)
    }
    fn le(&self, a: &TDivisor, b: &TDivisor) -> bool {
        a.le(b)
    }
    fn is_big(&self, d: &TDivisor) -> Result<bool> {
        Ok(d.is_big())
    }
    fn is_effective(&self, d: &TDivisor) -> bool {
        d.is_effective()
    }
    fn is_zero(&self, d: &TDivisor) -> bool {
        d.is_zero()
    }
    fn compatible(&self, d: &TDivisor, m: &Scalar) -> bool {
        d.coeffs().iter().all(|a| a.compatible(m))
    }
    fn support(&self, d: &TDivisor) -> BTreeSet<String> {
        d.support().into_iter().map(|r| d.fan().ray_name(r).to_string()).collect()
    }
    fn exceeding(&self, a: &TDivisor, b: &TDivisor) -> Vec<String> {
        (0..a.coeffs().len())
            .filter(|&r| a.coeff(r) > b.coeff(r))
            .map(|r| a.fan().ray_name(r).to_string())
            .collect()
    }
    fn volume(&self, d: &TDivisor) -> Result<Scalar> {
        Ok(d.volume())
    }
    fn h0(&self, d: &TDivisor) -> u64 {
        d.h0()
    }
    fn nsigma(&self, d: &TDivisor) -> Result<TDivisor> {
        Ok(d.sigma_decomposition()?.nsigma)
    }
    fn bplus(&self, d: &TDivisor, opts: BplusOptions) -> Result<BTreeSet<String>> {
        Ok(d.bplus_div(opts)?.into_iter().map(|r| d.fan().ray_name(r).to_string()).collect())
    }
    fn is_nef(&self, d: &TDivisor) -> Result<bool> {
        Ok(d.is_nef()?)
    }
    fn nef_intersection(&self, d: &TDivisor, e: &TDivisor) -> Result<Scalar> {
        Ok(d.intersection_nef_div(e)?)
    }
    fn shift(&self, rng: &mut ChaCha8Rng) -> Option<TDivisor> {
        let fan = self.0.fan();
        let u: Vec<i64> = (0..fan.dim()).map(|_| rng.gen_range(-2..=2)).collect();
        let c = Scalar::ratio(1, rng.gen_range(1..=3));
        TDivisor::principal(fan, &u).scale(&c).ok()
    }
}

struct Surface<'a>(&'a SurfaceModel);

impl Geometry for Surface<'_> {
    type Div = SDivisor;

    fn name(&self) -> String {
        format!("F{} with fibers [{}]", self.0.e(), self.0.fibers().join(", "))
    }
    fn show(&self, d: &SDivisor) -> String {
        d.display(self.0).to_string()
    }
    fn add(&self, a: &SDivisor, b: &SDivisor) -> Result<SDivisor> {
        Ok(a.try_add(b)?)
    }
    fn sub(&self, a: &SDivisor, b: &SDivisor) -> Result<SDivisor> {
        Ok(a.try_sub(b)?)
    }
    fn scale(&self, a: &SDivisor, m: &Scalar) -> Result<SDivisor> {
        Ok(a.scale(m)?)
    }
    fn le(&self, a: &SDivisor, b: &SDivisor) -> bool {
        a.le(b)
    }
    fn is_big(&self, d: &SDivisor) -> Result<bool> {
        Ok(self.0.is_big(d)?)
    }
    fn is_effective(&self, d: &SDivisor) -> bool {
        d.is_effective()
    }
    fn is_zero(&self, d: &SDivisor) -> bool {
        d.is_zero()
    }
    fn compatible(&self, d: &SDivisor, m: &Scalar) -> bool {
        [&d.c_e, &d.c_c].into_iter().chain(&d.fibers).all(|a| a.compatible(m))
    }
    fn support(&self, d: &SDivisor) -> BTreeSet<String> {
        d.support().into_iter().map(|c| self.0.component_name(c).to_string()).collect()
    }
    fn exceeding(&self, a: &SDivisor, b: &SDivisor) -> Vec<String> {
        let comps = [Component::E, Component::C].into_iter().chain((0..a.fibers.len()).map(Component::Fiber));
        comps.filter(|&c| a.coeff(c) > b.coeff(c)).map(|c| self.0.component_name(c).to_string()).collect()
    }
    fn volume(&self, d: &SDivisor) -> Result<Scalar> {
        Ok(self.0.volume(d)?)
    }
    fn h0(&self, d: &SDivisor) -> u64 {
        self.0.h0(d)
    }
    fn nsigma(&self, d: &SDivisor) -> Result<SDivisor> {
        Ok(self.0.nsigma(d)?)
    }
    fn bplus(&self, d: &SDivisor, _opts: BplusOptions) -> Result<BTreeSet<String>> {
        Ok(self.0.bplus_div(d)?.into_iter().map(|c| self.0.component_name(c).to_string()).collect())
    }
    fn is_nef(&self, d: &SDivisor) -> Result<bool> {
        Ok(self.0.is_nef(d)?)
    }
    fn nef_intersection(&self, d: &SDivisor, e: &SDivisor) -> Result<Scalar> {
        Ok(self.0.intersect_divisors(d, e)?)
    }
    fn shift(&self, rng: &mut ChaCha8Rng) -> Option<SDivisor> {
        let k = self.0.fibers().len();
        if k < 2 {
            return None;
        }
        let i = rng.gen_range(0..k);
        let j = (i + rng.gen_range(1..k)) % k;
        let c = Scalar::ratio(1, rng.gen_range(1..=3));
        let mut s = SDivisor::zero(self.0);
        s.fibers[i] = c.clone();
        s.fibers[j] = -c;
        Some(s)
    }
}

const SAMPLING_NOTE: &str = "clauses iii) and iv) are sampled on a finite grid and can only be falsified";

struct Ctx<'g, G: Geometry> {
    geo: &'g G,
    d: &'g G::Div,
    e: &'g G::Div,
    opts: &'g CheckOptions,
}

impl<G: Geometry> Ctx<'_, G> {
    fn preconditions(&self) -> Result<()> {
        if !self.geo.is_big(self.d)? {
            return Err(CheckError::NotBig);
        }
        if !self.geo.is_effective(self.e) {
            return Err(CheckError::NotEffective);
        }
        Ok(())
    }

    /// Samples usable with the coefficients of `D` and `E`.
    fn grid(&self, notes: &mut Vec<String>) -> Vec<Scalar> {
        let (ok, skipped): (Vec<Scalar>, Vec<Scalar>) = self
            .opts
            .m_grid
            .iter()
            .cloned()
            .partition(|m| m.is_positive() && self.geo.compatible(self.d, m) && self.geo.compatible(self.e, m));
        for m in skipped {
            notes.push(format!("sample m = {m} skipped: incompatible with the divisor coefficients"));
        }
        ok
    }

    fn shifted(&self) -> Result<Vec<G::Div>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        let mut out = vec![self.d.clone()];
        for _ in 0..self.opts.shifts {
            if let Some(s) = self.geo.shift(&mut rng) {
                out.push(self.geo.add(self.d, &s)?);
            }
        }
        Ok(out)
    }

    /// Compares `h^0(m base)` with `h^0(m base - mE)` when `rs` is `None`,
    /// else with `h^0(m base + rE)` for each `r`.
    fn sample(
        &self,
        bases: &[G::Div],
        skip: usize,
        grid: &[Scalar],
        rs: Option<&[Scalar]>,
    ) -> Result<(ClauseValue, Option<Witness>)> {
        let mut samples = 0;
        for (shift, base) in bases.iter().enumerate().skip(skip) {
            for m in grid {
                let mb = self.geo.scale(base, m)?;
                let rhs = self.geo.h0(&mb);
                let perturbations: Vec<(Option<Scalar>, G::Div)> = match rs {
                    None => vec![(None, self.geo.sub(&mb, &self.geo.scale(self.e, m)?)?)],
                    Some(rs) => rs
                        .iter()
                        .map(|r| Ok((Some(r.clone()), self.geo.add(&mb, &self.geo.scale(self.e, r)?)?)))
                        .collect::<Result<_>>()?,
                };
                for (r, div) in perturbations {
                    samples += 1;
                    let lhs = self.geo.h0(&div);
                    if lhs != rhs {
                        let w = Witness::Sample { m: m.clone(), r, shift, lhs, rhs };
                        return Ok((ClauseValue::Fails, Some(w)));
                    }
                }
            }
        }
        Ok((ClauseValue::NoCounterexample { samples }, None))
    }

    /// Samples of `h^0(m(D + E)) = h^0(mD)`, the shape of clause iv) of B.
    fn sample_plus_m(&self, grid: &[Scalar]) -> Result<(ClauseValue, Option<Witness>)> {
        let de = self.geo.add(self.d, self.e)?;
        for m in grid {
            let lhs = self.geo.h0(&self.geo.scale(&de, m)?);
            let rhs = self.geo.h0(&self.geo.scale(self.d, m)?);
            if lhs != rhs {
                let w = Witness::Sample { m: m.clone(), r: None, shift: 0, lhs, rhs };
                return Ok((ClauseValue::Fails, Some(w)));
            }
        }
        Ok((ClauseValue::NoCounterexample { samples: grid.len() }, None))
    }

    fn negsections2(&self, grid: &[Scalar]) -> Result<Option<bool>> {
        let n = self.geo.nsigma(self.d)?;
        if !self.geo.support(self.e).is_subset(&self.geo.support(&n)) {
            return Ok(None);
        }
        let de = self.geo.add(self.d, self.e)?;
        let lhs = self.geo.nsigma(&de)?;
        let rhs = self.geo.add(&n, self.e)?;
        if !(self.geo.le(&lhs, &rhs) && self.geo.le(&rhs, &lhs)) {
            return Ok(Some(false));
        }
        for m in grid {
            if self.geo.h0(&self.geo.scale(&de, m)?) != self.geo.h0(&self.geo.scale(self.d, m)?) {
                return Ok(Some(false));
            }
        }
        Ok(Some(true))
    }

    fn report(&self, theorem: Theorem) -> TheoremReport {
        TheoremReport {
            theorem,
            variety: self.geo.name(),
            d: self.geo.show(self.d),
            e: self.geo.show(self.e),
            clauses: BTreeMap::new(),
            witnesses: BTreeMap::new(),
            verdict: Verdict::ConsistentWithPaper,
            negsections2: None,
            notes: vec![SAMPLING_NOTE.to_string()],
        }
    }

    fn theorem_a(&self) -> Result<TheoremReport> {
        self.preconditions()?;
        let mut rep = self.report(Theorem::A);
        let grid = self.grid(&mut rep.notes);

        let vol_d = self.geo.volume(self.d)?;
        let vol_de = self.geo.volume(&self.geo.sub(self.d, self.e)?)?;
        let i = vol_de == vol_d;
        rep.set(Clause::I, ClauseValue::decided(i), (!i).then_some(Witness::Values { lhs: vol_de, rhs: vol_d }));

        let n = self.geo.nsigma(self.d)?;
        let over = self.geo.exceeding(self.e, &n);
        let ii = over.is_empty();
        rep.set(Clause::Ii, ClauseValue::decided(ii), (!ii).then_some(Witness::Components { names: over }));

        let (iii, w) = self.sample(&self.shifted()?, 1, &grid, None)?;
        rep.set(Clause::Iii, iii, w);
        let (iv, w) = self.sample(std::slice::from_ref(self.d), 0, &grid, None)?;
        rep.set(Clause::Iv, iv, w);

        if self.geo.is_nef(self.d)? {
            let v = self.geo.is_zero(self.e);
            let names = self.geo.support(self.e).into_iter().collect();
            rep.set(Clause::V, ClauseValue::decided(v), (!v).then_some(Witness::Components { names }));
        } else {
            rep.skip(Clause::V, "D is not nef");
        }
        rep.finish();
        Ok(rep)
    }

    fn theorem_b(&self) -> Result<TheoremReport> {
        self.preconditions()?;
        let mut rep = self.report(Theorem::B);
        let grid = self.grid(&mut rep.notes);

        let vol_d = self.geo.volume(self.d)?;
        let vol_de = self.geo.volume(&self.geo.add(self.d, self.e)?)?;
        let i = vol_de == vol_d;
        rep.set(Clause::I, ClauseValue::decided(i), (!i).then_some(Witness::Values { lhs: vol_de, rhs: vol_d }));

        let bplus = self.geo.bplus(self.d, self.opts.bplus)?;
        let outside: Vec<String> = self.geo.support(self.e).difference(&bplus).cloned().collect();
        let ii = outside.is_empty();
        rep.set(Clause::Ii, ClauseValue::decided(ii), (!ii).then_some(Witness::Components { names: outside }));

        let (iii, w) = self.sample(&self.shifted()?, 0, &grid, Some(&self.opts.r_grid))?;
        rep.set(Clause::Iii, iii, w);
        let (iv, w) = self.sample_plus_m(&grid)?;
        rep.set(Clause::Iv, iv, w);

        if self.geo.is_nef(self.d)? {
            let dot = self.geo.nef_intersection(self.d, self.e)?;
            let v = dot.is_zero();
            rep.set(Clause::V, ClauseValue::decided(v), (!v).then(|| Witness::Values { lhs: dot, rhs: Scalar::zero() }));
        } else {
            rep.skip(Clause::V, "D is not nef");
        }
        rep.negsections2 = self.negsections2(&grid)?;
        rep.finish();
        Ok(rep)
    }
}

impl TheoremReport {
    fn set(&mut self, c: Clause, v: ClauseValue, w: Option<Witness>) {
        self.clauses.insert(c, v);
        if let Some(w) = w {
            self.witnesses.insert(c, w);
        }
    }

    fn skip(&mut self, c: Clause, reason: &str) {
        self.clauses.insert(c, ClauseValue::Skipped { reason: reason.to_string() });
    }

    /// Counterexample candidate when the decided clauses disagree, or a
    /// sampled clause fails while a decided clause holds.
    fn finish(&mut self) {
        let i = self.clause(Clause::I).is_holds();
        let ii = self.clause(Clause::Ii).is_holds();
        let mut bad = i != ii;
        for c in [Clause::Iii, Clause::Iv] {
            if self.clause(c).is_fails() && (i || ii) {
                bad = true;
            }
        }
        match self.clause(Clause::V) {
            ClauseValue::Holds | ClauseValue::Fails => bad |= self.clause(Clause::V).is_holds() != i,
            _ => {}
        }
        self.verdict = if bad { Verdict::CounterexampleCandidate } else { Verdict::ConsistentWithPaper };
    }
}

fn toric_pair<'a>(d: &'a TDivisor, e: &'a TDivisor) -> Result<Toric<'a>> {
    if d.fan() != e.fan() {
        return Err(CheckError::Mismatch);
    }
    Ok(Toric(d))
}

fn surface_pair<'a>(model: &'a SurfaceModel, d: &SDivisor, e: &SDivisor) -> Result<Surface<'a>> {
    let k = model.fibers().len();
    if d.fibers.len() != k || e.fibers.len() != k {
        return Err(CheckError::Mismatch);
    }
    Ok(Surface(model))
}

/// Theorem A: clauses i) `vol(D - E) = vol(D)`, ii) `E <= N_sigma(D)`,
/// iii) and iv) sampled `h^0` equalities, v) `E = 0` for nef `D`.
pub fn check_theorem_a(inst: &Instance, opts: &CheckOptions) -> Result<TheoremReport> {
    match inst {
        Instance::Toric { d, e } => Ctx { geo: &toric_pair(d, e)?, d, e, opts }.theorem_a(),
        Instance::Surface { model, d, e } => Ctx { geo: &surface_pair(model, d, e)?, d, e, opts }.theorem_a(),
    }
}

/// Theorem B: clauses i) `vol(D + E) = vol(D)`, ii) `Supp E` inside the
/// divisorial augmented base locus, iii) and iv) sampled, v)
/// `D^{n-1} . E = 0` for nef `D`.
pub fn check_theorem_b(inst: &Instance, opts: &CheckOptions) -> Result<TheoremReport> {
    match inst {
        Instance::Toric { d, e } => Ctx { geo: &toric_pair(d, e)?, d, e, opts }.theorem_b(),
        Instance::Surface { model, d, e } => Ctx { geo: &surface_pair(model, d, e)?, d, e, opts }.theorem_b(),
    }
}

/// The negative-part lemma alone: `None` unless `Supp E` lies in
/// `Supp N_sigma(D)`.
pub fn check_negsections2(inst: &Instance, opts: &CheckOptions) -> Result<Option<bool>> {
    let mut notes = Vec::new();
    match inst {
        Instance::Toric { d, e } => {
            let ctx = Ctx { geo: &toric_pair(d, e)?, d, e, opts };
            ctx.preconditions()?;
            ctx.negsections2(&ctx.grid(&mut notes))
        }
        Instance::Surface { model, d, e } => {
            let ctx = Ctx { geo: &surface_pair(model, d, e)?, d, e, opts };
            ctx.preconditions()?;
            ctx.negsections2(&ctx.grid(&mut notes))
        }
    }
}

/// Both reports, with the sampling seed tied to `exec`-independent input.
pub fn check_both(inst: &Instance, opts: &CheckOptions) -> Result<(TheoremReport, TheoremReport)> {
    Ok((check_theorem_a(inst, opts)?, check_theorem_b(inst, opts)?))
}

/// Runs the checkers for several instances, preserving order.
pub fn check_many(
    insts: &[Instance],
    opts: &CheckOptions,
    exec: Execution,
) -> Vec<Result<(TheoremReport, TheoremReport)>> {
    exec.map(insts, |inst| check_both(inst, opts))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::toric::Fan;

    fn s(lit: &str) -> Scalar {
        lit.parse().unwrap()
    }

    fn toric(preset: &str, d: &[(&str, &str)], e: &[(&str, &str)]) -> Instance {
        let fan = Arc::new(Fan::preset(preset).unwrap());
        let mk = |t: &[(&str, &str)]| {
            let t: Vec<(&str, Scalar)> = t.iter().map(|(k, v)| (*k, s(v))).collect();
            TDivisor::from_named(&fan, &t).unwrap()
        };
        Instance::Toric { d: mk(d), e: mk(e) }
    }

    #[test]
    fn a_on_f1_negative_part() {
        let inst = toric("F1", &[("C", "1"), ("E", "1")], &[("E", "1")]);
        let rep = check_theorem_a(&inst, &CheckOptions::default()).unwrap();
        assert!(rep.clause(Clause::I).is_holds());
        assert!(rep.clause(Clause::Ii).is_holds());
        assert!(matches!(rep.clause(Clause::Iv), ClauseValue::NoCounterexample { .. }));
        assert!(matches!(rep.clause(Clause::Iii), ClauseValue::NoCounterexample { .. }));
        assert!(matches!(rep.clause(Clause::V), ClauseValue::Skipped { .. }));
        assert!(rep.is_consistent());
    }

    #[test]
    fn a_on_p2_fraction_of_line() {
        let inst = toric("P2", &[("r2", "1")], &[("r2", "1/3")]);
        let rep = check_theorem_a(&inst, &CheckOptions::default()).unwrap();
        assert_eq!(rep.witnesses[&Clause::I], Witness::Values { lhs: s("4/9"), rhs: s("1") });
        assert!(rep.clause(Clause::Ii).is_fails());
        assert!(rep.clause(Clause::Iv).is_fails());
        assert!(rep.clause(Clause::V).is_fails());
        assert!(rep.is_consistent());
        // m = 3: h0(2H) = 6 < h0(3H) = 10
        let opts = CheckOptions { m_grid: vec![s("3")], ..CheckOptions::default() };
        let rep = check_theorem_a(&inst, &opts).unwrap();
        assert_eq!(
            rep.witnesses[&Clause::Iv],
            Witness::Sample { m: s("3"), r: None, shift: 0, lhs: 6, rhs: 10 }
        );
    }

    #[test]
    fn a_with_zero_e_on_nef() {
        let inst = toric("F1", &[("C", "1")], &[]);
        let rep = check_theorem_a(&inst, &CheckOptions::default()).unwrap();
        for c in [Clause::I, Clause::Ii, Clause::V] {
            assert!(rep.clause(c).is_holds(), "{c:?}");
        }
        assert!(rep.is_consistent());
    }

    #[test]
    fn b_examples() {
        let rep = check_theorem_b(&toric("F1", &[("C", "1")], &[("E", "1")]), &CheckOptions::default()).unwrap();
        for c in [Clause::I, Clause::Ii, Clause::V] {
            assert!(rep.clause(c).is_holds(), "{c:?}");
        }
        assert!(rep.is_consistent());

        let rep = check_theorem_b(&toric("P2", &[("r2", "1")], &[("r0", "1")]), &CheckOptions::default()).unwrap();
        assert_eq!(rep.witnesses[&Clause::I], Witness::Values { lhs: s("4"), rhs: s("1") });
        assert!(rep.clause(Clause::Ii).is_fails());
        assert_eq!(rep.witnesses[&Clause::V], Witness::Values { lhs: s("1"), rhs: s("0") });
        assert!(rep.is_consistent());

        let rep = check_theorem_b(&toric("F2", &[("C", "1"), ("F", "1/2")], &[]), &CheckOptions::default()).unwrap();
        assert!(rep.clauses.values().all(|v| !v.is_fails()));
    }

    #[test]
    fn preconditions() {
        let opts = CheckOptions::default();
        let not_big = toric("F1", &[("F", "1")], &[]);
        assert_eq!(check_theorem_a(&not_big, &opts), Err(CheckError::NotBig));
        let neg_e = toric("F1", &[("C", "1")], &[("E", "-1")]);
        assert_eq!(check_theorem_b(&neg_e, &opts), Err(CheckError::NotEffective));
    }

    #[test]
    fn negsections2_on_f1() {
        let inst = toric("F1", &[("C", "1"), ("E", "1/2")], &[("E", "3/2")]);
        let rep = check_theorem_b(&inst, &CheckOptions::default()).unwrap();
        assert_eq!(rep.negsections2, Some(true));
        assert_eq!(check_negsections2(&inst, &CheckOptions::default()), Ok(Some(true)));
        let inst = toric("F1", &[("C", "1")], &[("E", "1")]);
        assert_eq!(check_negsections2(&inst, &CheckOptions::default()), Ok(None));
    }

    #[test]
    fn surface_instances() {
        let model = SurfaceModel::with_fibers(1, 4);
        let d = SDivisor::from_named(&model, &[("C", s("1")), ("E", s("1"))]).unwrap();
        let e = SDivisor::from_named(&model, &[("E", s("1/2"))]).unwrap();
        let inst = Instance::Surface { model: model.clone(), d, e };
        let opts = CheckOptions::default();
        let a = check_theorem_a(&inst, &opts).unwrap();
        assert!(a.clause(Clause::I).is_holds() && a.clause(Clause::Ii).is_holds() && a.is_consistent());
        let b = check_theorem_b(&inst, &opts).unwrap();
        assert!(b.clause(Clause::I).is_holds() && b.clause(Clause::Ii).is_holds() && b.is_consistent());

        let d = SDivisor::from_named(&model, &[("C", s("1")), ("p1", s("1"))]).unwrap();
        let e = SDivisor::from_named(&model, &[("p2", s("1/2"))]).unwrap();
        let inst = Instance::Surface { model, d, e };
        let b = check_theorem_b(&inst, &opts).unwrap();
        assert!(b.clause(Clause::I).is_fails() && b.clause(Clause::Ii).is_fails() && b.clause(Clause::V).is_fails());
        assert!(b.is_consistent());
    }

    #[test]
    fn report_serializes() {
        let rep = check_theorem_a(&toric("P2", &[("r2", "1")], &[("r2", "1/3")]), &CheckOptions::default()).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["theorem"], "A");
        assert_eq!(json["clauses"]["i"]["status"], "fails");
        assert_eq!(json["witnesses"]["i"]["lhs"], "4/9");
        assert_eq!(json["verdict"], "ConsistentWithPaper");
    }
}
