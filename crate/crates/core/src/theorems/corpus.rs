//! Seeded random instances and aggregate checking.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use super::{check_both, CheckOptions, Clause, Instance, TheoremReport, Verdict};
use crate::problem::ProblemFile;
use crate::scalar::Scalar;
use crate::toric::{BplusOptions, Fan, TDivisor};
use crate::Execution;

pub const CORPUS_PRESETS: [&str; 5] = ["P2", "P1xP1", "F1", "F2", "P3"];

/// How `E` is drawn. The targeted modes make clause ii) true often enough
/// for the equivalences to be exercised in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EMode {
    /// Independent random effective coefficients on a random support.
    Sparse,
    /// A random fraction of `N_sigma(D)` on a random subset of its support.
    UnderNegativePart,
    /// Random positive coefficients on a subset of the augmented base locus.
    OnBaseLocus,
}

/// Random rational in `[-3, 3]` with denominator 1, 2 or 3.
fn coefficient(rng: &mut ChaCha8Rng) -> Scalar {
    let den = rng.gen_range(1..=3);
    Scalar::ratio(rng.gen_range(-3 * den..=3 * den), den)
}

fn positive_coefficient(rng: &mut ChaCha8Rng) -> Scalar {
    let den = rng.gen_range(1..=3);
    Scalar::ratio(rng.gen_range(1..=3 * den), den)
}

fn big_divisor(fan: &Arc<Fan>, rng: &mut ChaCha8Rng) -> TDivisor {
    loop {
        let coeffs = (0..fan.num_rays()).map(|_| coefficient(rng)).collect();
        let d = TDivisor::new(fan, coeffs).expect("rational coefficients");
        if d.is_big() {
            return d;
        }
    }
}

/// Random positive coefficients on a random nonempty subset of `rays`.
fn supported_on(fan: &Arc<Fan>, rays: &[usize], rng: &mut ChaCha8Rng, cap: Option<&TDivisor>) -> TDivisor {
    let mut coeffs = vec![Scalar::zero(); fan.num_rays()];
    let mut chosen: Vec<usize> = rays.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
    if chosen.is_empty() {
        chosen.extend(rays.choose(rng));
    }
    for r in chosen {
        coeffs[r] = match cap {
            Some(n) => n.coeff(r).try_mul(&Scalar::ratio(1, rng.gen_range(1..=3))).expect("rational"),
            None => positive_coefficient(rng),
        };
    }
    TDivisor::new(fan, coeffs).expect("rational coefficients")
}

/// Instance `index` of the corpus for `seed`: independent of every other
/// index, so instances can be generated in any order.
pub fn generate_instance(seed: u64, index: u64, bplus: BplusOptions) -> (Instance, EMode) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let preset = CORPUS_PRESETS.choose(&mut rng).expect("nonempty");
    let fan = Arc::new(Fan::preset(preset).expect("corpus presets are valid"));
    let d = big_divisor(&fan, &mut rng);
    let all: Vec<usize> = (0..fan.num_rays()).collect();
    let mode = [EMode::Sparse, EMode::UnderNegativePart, EMode::OnBaseLocus][(index % 3) as usize];
    let e = match mode {
        EMode::Sparse => supported_on(&fan, &all, &mut rng, None),
        EMode::UnderNegativePart => {
            let n = d.sigma_decomposition().expect("big").nsigma;
            let supp: Vec<usize> = n.support().into_iter().collect();
            if supp.is_empty() {
                TDivisor::zero(&fan)
            } else {
                supported_on(&fan, &supp, &mut rng, Some(&n))
            }
        }
        EMode::OnBaseLocus => match d.bplus_div(bplus) {
            Ok(b) if !b.is_empty() => supported_on(&fan, &b.into_iter().collect::<Vec<_>>(), &mut rng, None),
            _ => TDivisor::zero(&fan),
        },
    };
    (Instance::Toric { d, e }, mode)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EquivalenceStats {
    /// Instances where the decided clauses i) and ii) agree.
    pub agree: usize,
    pub disagree: usize,
    /// Instances where clause ii) holds.
    pub ii_holds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceOutcome {
    pub index: u64,
    pub variety: String,
    pub mode: EMode,
    pub d: String,
    pub e: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_a: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_b: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nef: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Everything needed to rerun a suspicious instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replay {
    pub index: u64,
    pub problem: Value,
    pub report_a: TheoremReport,
    pub report_b: TheoremReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub seed: u64,
    pub count: u64,
    pub consistent: usize,
    pub counterexample_candidates: usize,
    pub errors: usize,
    pub theorem_a: EquivalenceStats,
    pub theorem_b: EquivalenceStats,
    /// Nef instances and how many of them have clause v) agreeing with i).
    pub nef_instances: usize,
    pub nef_v_agrees_b: usize,
    pub negsections2_applicable: usize,
    pub negsections2_held: usize,
    pub instances: Vec<InstanceOutcome>,
    pub counterexamples: Vec<Replay>,
}

impl CorpusSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Generates and checks `count` instances; the summary depends only on
/// `seed`, `count` and `opts`, never on `exec`.
pub fn corpus_run(seed: u64, count: u64, opts: &CheckOptions, exec: Execution) -> CorpusSummary {
    let results = exec.map_range(0..count as usize, |i| {
        let index = i as u64;
        let (inst, mode) = generate_instance(seed, index, opts.bplus);
        let local = CheckOptions { seed: opts.seed ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index, ..opts.clone() };
        let out = check_both(&inst, &local);
        (index, inst, mode, out)
    });

    let mut summary = CorpusSummary {
        seed,
        count,
        consistent: 0,
        counterexample_candidates: 0,
        errors: 0,
        theorem_a: EquivalenceStats::default(),
        theorem_b: EquivalenceStats::default(),
        nef_instances: 0,
        nef_v_agrees_b: 0,
        negsections2_applicable: 0,
        negsections2_held: 0,
        instances: Vec::with_capacity(results.len()),
        counterexamples: Vec::new(),
    };
    for (index, inst, mode, out) in results {
        let Instance::Toric { d, e } = &inst else { unreachable!("corpus instances are toric") };
        let mut outcome = InstanceOutcome {
            index,
            variety: d.fan().name().to_string(),
            mode,
            d: d.to_string(),
            e: e.to_string(),
            verdict_a: None,
            verdict_b: None,
            nef: None,
            error: None,
        };
        match out {
            Err(err) => {
                summary.errors += 1;
                outcome.error = Some(err.to_string());
            }
            Ok((a, b)) => {
                for (rep, stats) in [(&a, &mut summary.theorem_a), (&b, &mut summary.theorem_b)] {
                    let i = rep.clause(Clause::I).is_holds();
                    let ii = rep.clause(Clause::Ii).is_holds();
                    if i == ii {
                        stats.agree += 1;
                    } else {
                        stats.disagree += 1;
                    }
                    stats.ii_holds += ii as usize;
                }
                let nef = !matches!(b.clause(Clause::V), super::ClauseValue::Skipped { .. });
                if nef {
                    summary.nef_instances += 1;
                    if b.clause(Clause::V).is_holds() == b.clause(Clause::I).is_holds() {
                        summary.nef_v_agrees_b += 1;
                    }
                }
                if let Some(held) = b.negsections2 {
                    summary.negsections2_applicable += 1;
                    summary.negsections2_held += held as usize;
                }
                outcome.verdict_a = Some(a.verdict);
                outcome.verdict_b = Some(b.verdict);
                outcome.nef = Some(nef);
                if a.is_consistent() && b.is_consistent() {
                    summary.consistent += 1;
                } else {
                    summary.counterexample_candidates += 1;
                    summary.counterexamples.push(Replay {
                        index,
                        problem: ProblemFile::from_instance(&inst).to_value(),
                        report_a: a,
                        report_b: b,
                    });
                }
            }
        }
        summary.instances.push(outcome);
    }
    summary
}
