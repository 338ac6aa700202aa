//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use proptest::prelude::prop;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use rdiv_core::surface::{self, paper_example, Component, SurfaceModel};
use rdiv_core::theorems::{
    check_negsections2, check_theorem_a, generate_instance, CheckOptions, Clause, Instance,
};
use rdiv_core::toric::BplusOptions;
use rdiv_core::{corpus_run, Execution, Fan, SDivisor, Scalar, TDivisor};

const CORPUS_SEED: u64 = 2024;
const CORPUS_SIZE: u64 = 250;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))?;
    Ok(t)
}

/// `h^0` of the integral class `xE + yF` on `F_e`, counted as lattice
/// points of the toric section polytope.
fn toric_h0_of_class(e: u32, x: i64, y: i64) -> u64 {
    let f = Arc::new(Fan::hirzebruch(e));
    TDivisor::from_named(&f, &[("E", Scalar::from_int(x)), ("F", Scalar::from_int(y))]).unwrap().h0()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut ms: Vec<Scalar> = ["1", "2", "5/2", "sqrt(2)", "3", "7"].iter().map(|l| s(l)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let a = Scalar::ratio(rng.gen_range(0..=40), rng.gen_range(1..=8));
        let b = Scalar::ratio(rng.gen_range(0..=40), rng.gen_range(1..=8));
        let b = if a.is_zero() && b.is_zero() { Scalar::one() } else { b };
        ms.push(&a + &(&b * &Scalar::sqrt(2)));
    }
    let rows = paper_example(1, &ms).map_err(|e| e.to_string())?;

    // independent recomputation: floor per component, then count sections
    // of the integral class on the toric model
    let model = SurfaceModel::with_fibers(1, 4);
    let dp = surface::example_divisor(&model).unwrap();
    let e_class = model.class_of_component(Component::E);
    for (m, row) in ms.iter().zip(&rows) {
        let class = model.class_of(&dp.scale(m).unwrap().floor()).unwrap();
        let dot = model.intersect(&class, &e_class);
        ensure(dot.floor_i64() == row.floor_dot_e && row.floor_dot_e <= -1, || {
            format!("m = {m}: floor(mD').E = {dot}, reported {}", row.floor_dot_e)
        })?;
        let oracle_shifted = toric_h0_of_class(1, class.x.floor_i64(), class.y.floor_i64());
        let mc = m.floor_i64();
        let oracle_section = toric_h0_of_class(1, mc, mc);
        ensure(oracle_shifted == row.h0_shifted && oracle_section == row.h0_section, || {
            format!("m = {m}: oracle h0 {oracle_shifted} / {oracle_section}, reported {} / {}", row.h0_shifted, row.h0_section)
        })?;
        ensure(row.h0_shifted < row.h0_section, || format!("m = {m}: {} >= {}", row.h0_shifted, row.h0_section))?;
    }
    ensure((rows[0].h0_shifted, rows[0].h0_section) == (1, 3), || "anchor h0(D') = 1 < h0(C) = 3 failed".into())?;
    let t = within(start, Duration::from_secs(5))?;
    Ok(format!("{} samples, anchor 1 < 3, {t:.2?}", rows.len()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let opts = CheckOptions::default();
    let idx: Vec<u64> = (0..CORPUS_SIZE).collect();
    let reports = Execution::Parallel.map(&idx, |&i| {
        let (inst, _) = generate_instance(CORPUS_SEED, i, opts.bplus);
        check_theorem_a(&inst, &CheckOptions { seed: i, ..opts.clone() })
    });
    let mut holds = 0;
    for (i, r) in reports.into_iter().enumerate() {
        let r = r.map_err(|e| format!("instance {i}: {e}"))?;
        let (a, b) = (r.clause(Clause::I).is_holds(), r.clause(Clause::Ii).is_holds());
        ensure(a == b, || format!("instance {i}: i) = {a}, ii) = {b}: {}", serde_json::to_string(&r).unwrap()))?;
        holds += a as usize;
    }
    let t = within(start, Duration::from_secs(120))?;
    Ok(format!("{CORPUS_SIZE} instances, i) <=> ii) everywhere ({holds} with both true), {t:.2?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let summary = corpus_run(CORPUS_SEED, CORPUS_SIZE, &CheckOptions::default(), Execution::Parallel);
    ensure(summary.errors == 0, || {
        let e = summary.instances.iter().find(|o| o.error.is_some()).unwrap();
        format!("{} errors, first at {}: {:?}", summary.errors, e.index, e.error)
    })?;
    ensure(summary.theorem_b.disagree == 0, || format!("{} disagreements", summary.theorem_b.disagree))?;
    ensure(summary.nef_instances >= 50, || format!("only {} nef instances", summary.nef_instances))?;
    ensure(summary.nef_v_agrees_b == summary.nef_instances, || {
        format!("v) <=> i) failed on {} nef instances", summary.nef_instances - summary.nef_v_agrees_b)
    })?;
    let t = within(start, Duration::from_secs(300))?;
    Ok(format!(
        "{CORPUS_SIZE} instances ({} with ii) true), {} nef with v) <=> i), {t:.2?}",
        summary.theorem_b.ii_holds, summary.nef_instances
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ms = [10i64, 20, 40, 80];
    let mut worst = 0f64;
    for k in 0..20 {
        let f = fan(if k % 2 == 0 { "P2" } else { "F1" });
        let d = random_big(&mut rng, &f, &[1, 2, 5, 10], 3);
        let vol = d.volume();
        let p = d.polytope();
        let area = shoelace(&p.vertices().unwrap());
        ensure(vol == area.mul_int(2), || format!("{d}: volume {vol} vs shoelace 2*{area}"))?;
        let errors: Vec<Scalar> = ms
            .iter()
            .map(|&m| {
                let h = d.h0_at(&Scalar::from_int(m)).unwrap();
                (&Scalar::ratio(2 * h as i64, m * m) - &vol).abs()
            })
            .collect();
        ensure(errors.windows(2).all(|w| w[1] <= w[0]), || {
            format!("{d}: errors not monotone: {}", errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
        })?;
        let lengths: Vec<Scalar> =
            (0..p.rows().len()).map(|r| p.facet_lattice_volume(r).unwrap()).filter(|l| l.is_positive()).collect();
        let k_const = lengths.iter().max().unwrap().mul_int(lengths.len() as i64);
        let bound = k_const.mul_int(6).div_int(80);
        ensure(errors[3] <= bound, || format!("{d}: error at 80 is {} > {bound}", errors[3]))?;
        worst = worst.max(errors[3].to_f64() / bound.to_f64());
    }
    Ok(format!("20 divisors, monotone errors, worst ratio to bound at m=80: {worst:.3}"))
}

fn criterion_5() -> Outcome {
    let ms = [6i64, 12, 24, 48];
    let mut used = 0;
    let mut index = 0;
    while used < 20 {
        let (inst, _) = generate_instance(CORPUS_SEED, index, BplusOptions::default());
        index += 1;
        let Instance::Toric { d, .. } = inst else { unreachable!() };
        if d.h0_at(&Scalar::from_int(6)).unwrap() == 0 {
            continue;
        }
        used += 1;
        for r in 0..d.fan().num_rays() {
            let sigma = d.sigma(r).map_err(|e| e.to_string())?;
            let vals = d.sigma_limit_oracle(r, &ms).map_err(|e| e.to_string())?;
            ensure(vals.iter().all(|v| *v >= sigma), || format!("{d}, ray {r}: oracle {vals:?} below sigma {sigma}"))?;
            let (g6, g48) = (&vals[0] - &sigma, &vals[3] - &sigma);
            ensure(g48 <= g6, || format!("{d}, ray {r}: gap at 48 is {g48} > gap at 6 {g6}"))?;
        }
    }
    Ok(format!("20 instances (scanned {index}), oracle >= sigma, gaps shrink"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut big = 0;
    for k in 0..50 {
        let e = 1 + (k % 2) as u32;
        let f = Arc::new(Fan::hirzebruch(e));
        let coeffs: Vec<Scalar> = (0..4)
            .map(|_| {
                let a = random_rational(&mut rng, &[1, 2, 3, 4], 3);
                if rng.gen_bool(0.3) {
                    &a + &(&random_rational(&mut rng, &[1, 2], 1) * &Scalar::sqrt(2))
                } else {
                    a
                }
            })
            .collect();
        let t = TDivisor::new(&f, coeffs).unwrap();
        let model = SurfaceModel::from_fan(&f).map_err(|e| e.to_string())?;
        let sd = model.divisor_from_toric(&t).map_err(|e| e.to_string())?;
        for m in ["1", "2", "5/2"] {
            let m = s(m);
            let (a, b) = (t.h0_at(&m).unwrap(), model.h0_at(&sd, &m).unwrap());
            ensure(a == b, || format!("{t} at m = {m}: toric h0 {a}, surface h0 {b}"))?;
        }
        let tv = t.volume();
        if t.is_big() {
            big += 1;
            let z = model.zariski(&sd).map_err(|e| format!("{t}: {e}"))?;
            ensure(z.volume == tv, || format!("{t}: toric volume {tv}, P^2 = {}", z.volume))?;
        } else {
            ensure(tv.is_zero() && model.volume(&sd).unwrap().is_zero(), || format!("{t}: nonzero volume but not big"))?;
        }
    }
    Ok(format!("50 divisors ({big} big), h0 and volume agree"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = CheckOptions::default();
    let mut done = 0;
    let mut surfaces = 0;
    while done < 30 {
        let f = fan(if done % 2 == 0 { "F1" } else { "F2" });
        let d = random_big(&mut rng, &f, &[1, 2, 3], 3);
        let n = d.sigma_decomposition().map_err(|e| e.to_string())?.nsigma;
        if n.is_zero() {
            continue;
        }
        let mut c = vec![Scalar::zero(); f.num_rays()];
        for r in n.support() {
            c[r] = Scalar::ratio(rng.gen_range(1..=9), rng.gen_range(1..=3));
        }
        let e = TDivisor::new(&f, c).unwrap();
        let inst = Instance::Toric { d: d.clone(), e: e.clone() };
        let r = check_negsections2(&inst, &opts).map_err(|e| e.to_string())?;
        ensure(r == Some(true), || format!("D = {d}, E = {e}: {r:?}"))?;

        // the same pair on the surface model
        let model = SurfaceModel::from_fan(&f).unwrap();
        let (sd, se): (SDivisor, SDivisor) =
            (model.divisor_from_toric(&d).unwrap(), model.divisor_from_toric(&e).unwrap());
        let inst = Instance::Surface { model, d: sd, e: se };
        let r = check_negsections2(&inst, &opts).map_err(|e| e.to_string())?;
        ensure(r == Some(true), || format!("surface D = {d}, E = {e}: {r:?}"))?;
        surfaces += 1;
        done += 1;
    }
    Ok(format!("30 toric instances and {surfaces} surface twins satisfy N(D+E) = N(D)+E"))
}

fn fail<T: std::fmt::Debug>(name: &str, e: proptest::test_runner::TestError<T>) -> String {
    format!("{name}: {e}")
}

fn criterion_8() -> Outcome {
    const CASES: u32 = 110;
    let mut total = 0;
    let runner = || {
        TestRunner::new_with_rng(
            Config { cases: CASES, failure_persistence: None, ..Config::default() },
            TestRng::deterministic_rng(RngAlgorithm::ChaCha),
        )
    };

    runner()
        .run(&(divisor_pair(), 1i64..=3, 1i64..=3), |((d, _), p, q)| {
            let lambda = Scalar::ratio(p, q);
            let n = d.fan().dim() as u32;
            proptest::prop_assert_eq!(d.scale(&lambda).unwrap().volume(), &lambda.pow(n) * &d.volume());
            Ok(())
        })
        .map_err(|e| fail("homogeneity", e))?;
    total += CASES;

    runner()
        .run(&(divisor_pair(), prop::sample::select(vec!["1", "2", "5/2", "sqrt(2)"])), |((d, e), m)| {
            let m = s(m);
            let md = d.scale(&m).unwrap();
            let me = e.scale(&m).unwrap();
            let (lo, mid, hi) = (md.try_sub(&me).unwrap().h0(), md.h0(), md.try_add(&me).unwrap().h0());
            proptest::prop_assert!(lo <= mid && mid <= hi, "{} <= {} <= {}", lo, mid, hi);
            Ok(())
        })
        .map_err(|e| fail("h0 monotonicity", e))?;
    total += CASES;

    runner()
        .run(&divisor_pair(), |(d, e)| {
            let (lo, mid, hi) = (d.try_sub(&e).unwrap().volume(), d.volume(), d.try_add(&e).unwrap().volume());
            proptest::prop_assert!(lo <= mid && mid <= hi, "{} <= {} <= {}", lo, mid, hi);
            Ok(())
        })
        .map_err(|e| fail("volume monotonicity", e))?;
    total += CASES;

    runner()
        .run(&big_pair(), |(a, b)| {
            let sum = a.try_add(&b).unwrap();
            for r in 0..a.fan().num_rays() {
                let (x, y, z) = (a.sigma(r).unwrap(), b.sigma(r).unwrap(), sum.sigma(r).unwrap());
                proptest::prop_assert!(!x.is_negative());
                proptest::prop_assert!(z <= &x + &y, "ray {}: {} > {} + {}", r, z, x, y);
            }
            Ok(())
        })
        .map_err(|e| fail("sigma subadditivity", e))?;
    total += CASES;

    runner()
        .run(&quadratic(), |x| {
            let f = Scalar::from_bigint(x.floor());
            proptest::prop_assert!(f <= x && x < &f + &Scalar::one());
            let g = &f + &Scalar::from_bigint((-&x).floor());
            let expected = if x.is_integer() { Scalar::zero() } else { Scalar::from_int(-1) };
            proptest::prop_assert_eq!(g, expected);
            Ok(())
        })
        .map_err(|e| fail("floor identities", e))?;
    total += CASES;

    Ok(format!("{total} randomized cases across 5 properties"))
}


#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("sqrt(2) fiber example on F1", criterion_1),
        ("Theorem A: i) <=> ii) on the corpus", criterion_2),
        ("Theorem B: i) <=> ii), and v) <=> i) when nef", criterion_3),
        ("Hilbert function converges to the volume", criterion_4),
        ("sigma limit oracle bounds sigma from above", criterion_5),
        ("toric and surface models agree on F1, F2", criterion_6),
        ("negative part absorbs E inside its support", criterion_7),
        ("invariant property suites", criterion_8),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let n = k + 1;
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {n}. {name}: {detail}"),
            Err(why) => {
                println!("FAIL {n}. {name}: {why}");
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
