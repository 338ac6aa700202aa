#![allow(dead_code)]

use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rdiv_core::{Fan, Scalar, TDivisor};

pub fn s(lit: &str) -> Scalar {
    lit.parse().unwrap()
}

pub fn fan(name: &str) -> Arc<Fan> {
    Arc::new(Fan::preset(name).unwrap())
}

/// `p/q` with `q` in `1..=3` and `|p/q| <= bound`.
pub fn rational(bound: i64) -> impl Strategy<Value = Scalar> {
    (1i64..=3).prop_flat_map(move |q| (-bound * q..=bound * q).prop_map(move |p| Scalar::ratio(p, q)))
}

pub fn nonneg_rational(bound: i64) -> impl Strategy<Value = Scalar> {
    (1i64..=3).prop_flat_map(move |q| (0..=bound * q).prop_map(move |p| Scalar::ratio(p, q)))
}

/// `a + b sqrt(2)` with small rational `a`, `b`.
pub fn quadratic() -> impl Strategy<Value = Scalar> {
    (rational(20), rational(20), any::<bool>()).prop_map(|(a, b, irr)| {
        if irr {
            &a + &(&b * &Scalar::sqrt(2))
        } else {
            a
        }
    })
}

pub const SMALL_PRESETS: [&str; 4] = ["P2", "P1xP1", "F1", "F2"];

pub fn preset() -> impl Strategy<Value = Arc<Fan>> {
    prop::sample::select(&SMALL_PRESETS[..]).prop_map(fan)
}

pub fn divisor_on(f: Arc<Fan>, coeff: BoxedStrategy<Scalar>) -> impl Strategy<Value = TDivisor> {
    let n = f.num_rays();
    prop::collection::vec(coeff, n).prop_map(move |c| TDivisor::new(&f, c).unwrap())
}

/// `(D, E)` on a random small preset, `E` effective.
pub fn divisor_pair() -> impl Strategy<Value = (TDivisor, TDivisor)> {
    preset().prop_flat_map(|f| {
        (divisor_on(f.clone(), rational(3).boxed()), divisor_on(f, nonneg_rational(2).boxed()))
    })
}

/// Two big divisors on the same random small preset.
pub fn big_pair() -> impl Strategy<Value = (TDivisor, TDivisor)> {
    preset()
        .prop_flat_map(|f| (divisor_on(f.clone(), rational(3).boxed()), divisor_on(f, rational(3).boxed())))
        .prop_filter("both big", |(a, b)| a.is_big() && b.is_big())
}

pub fn random_rational(rng: &mut ChaCha8Rng, dens: &[i64], bound: i64) -> Scalar {
    let q = dens[rng.gen_range(0..dens.len())];
    Scalar::ratio(rng.gen_range(-bound * q..=bound * q), q)
}

/// Random big divisor with coefficients `p/q`, `q` drawn from `dens`.
pub fn random_big(rng: &mut ChaCha8Rng, f: &Arc<Fan>, dens: &[i64], bound: i64) -> TDivisor {
    loop {
        let c = (0..f.num_rays()).map(|_| random_rational(rng, dens, bound)).collect();
        let d = TDivisor::new(f, c).unwrap();
        if d.is_big() {
            return d;
        }
    }
}

/// Area of a convex polygon from its vertices, by the shoelace formula.
pub fn shoelace(verts: &[Vec<Scalar>]) -> Scalar {
    let n = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0].to_f64()).sum::<f64>() / n;
    let cy = verts.iter().map(|v| v[1].to_f64()).sum::<f64>() / n;
    let mut sorted = verts.to_vec();
    sorted.sort_by(|a, b| {
        let ta = (a[1].to_f64() - cy).atan2(a[0].to_f64() - cx);
        let tb = (b[1].to_f64() - cy).atan2(b[0].to_f64() - cx);
        ta.partial_cmp(&tb).unwrap()
    });
    let mut twice = Scalar::zero();
    for i in 0..sorted.len() {
        let (p, q) = (&sorted[i], &sorted[(i + 1) % sorted.len()]);
        twice = &twice + &(&(&p[0] * &q[1]) - &(&p[1] * &q[0]));
    }
    twice.abs().div_int(2)
}
