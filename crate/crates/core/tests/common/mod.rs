//! Brute-force reference implementations shared by the integration tests.
//!
//! These enumerate every symbol pair directly with nalgebra matrices and plain
//! complex arithmetic, independently of the library's buffers, slicing and
//! 2x2 helpers.

#![allow(dead_code)]

use mumimo::channel::{gen_iid_block, transmit, ToneObservation};
use mumimo::constellation::{Constellation, ConstellationKind};
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn vec_of(v: &mumimo::linalg::Vec2) -> Vector2<C> {
    Vector2::new(v.0[0], v.0[1])
}

/// `||y - h1 x1 - s h2 x2||^2 / sigma^2`.
pub fn pair_distance(obs: &ToneObservation, x1: C, x2: C, s: f64) -> f64 {
    let y = vec_of(&obs.y);
    let h1 = vec_of(&obs.chan.h1);
    let h2 = vec_of(&obs.chan.h2);
    let r = y - h1 * x1 - h2 * (x2 * s);
    r.norm_squared() / obs.noise_var
}

/// `min over (x1, x2)` of the pair distance for one tone.
pub fn min_pair_distance(obs: &ToneObservation, ms: &Constellation, mi: &Constellation, s: f64) -> f64 {
    let mut best = f64::INFINITY;
    for &x1 in ms.points() {
        for &x2 in mi.points() {
            best = best.min(pair_distance(obs, x1, x2, s));
        }
    }
    best
}

/// `N ln|M_I| + sum_i min d` for every hypothesis, in `ConstellationKind::ALL` order.
pub fn joint_metrics(obs: &[ToneObservation], ms: &Constellation, s: f64) -> Vec<(ConstellationKind, f64)> {
    ConstellationKind::ALL
        .iter()
        .map(|&k| {
            let mi = Constellation::new(k);
            let acc: f64 = obs.iter().map(|o| min_pair_distance(o, ms, &mi, s)).sum();
            (k, obs.len() as f64 * (k.size() as f64).ln() + acc)
        })
        .collect()
}

/// Argmin; ties go to the smaller alphabet (first in `ALL` order).
pub fn argmin(metrics: &[(ConstellationKind, f64)]) -> ConstellationKind {
    let mut best = metrics[0];
    for &m in &metrics[1..] {
        if m.1 < best.1 {
            best = m;
        }
    }
    best.0
}

/// Nulling vector: the column of `I - h1 h1*/||h1||^2` with the larger norm.
pub fn nulling_vector(obs: &ToneObservation) -> Vector2<C> {
    let h1 = vec_of(&obs.chan.h1);
    let g = Matrix2::identity() - h1 * h1.adjoint() / C::new(h1.norm_squared(), 0.0);
    let c0 = g.column(0).into_owned();
    let c1 = g.column(1).into_owned();
    if c1.norm_squared() > c0.norm_squared() {
        c1
    } else {
        c0
    }
}

/// `N ln|M_I| + sum_i min |g* y - g* h2 s x2|^2 / (sigma^2 ||g||^2)` per hypothesis.
pub fn nulling_metrics(obs: &[ToneObservation], s: f64) -> Vec<(ConstellationKind, f64)> {
    ConstellationKind::ALL
        .iter()
        .map(|&k| {
            let mi = Constellation::new(k);
            let acc: f64 = obs
                .iter()
                .map(|o| {
                    let g = nulling_vector(o);
                    let yt = g.dotc(&vec_of(&o.y));
                    let a = g.dotc(&vec_of(&o.chan.h2)) * s;
                    let var = o.noise_var * g.norm_squared();
                    mi.points()
                        .iter()
                        .map(|&x2| (yt - a * x2).norm_sqr() / var)
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            (k, obs.len() as f64 * (k.size() as f64).ln() + acc)
        })
        .collect()
}

/// Exhaustive max-log LLRs: `min_{bit=0} d - min_{bit=1} d` over all pairs.
pub fn exhaustive_llr(obs: &ToneObservation, ms: &Constellation, mi: &Constellation, s: f64) -> Vec<f64> {
    (0..ms.bits_per_symbol())
        .map(|j| {
            let mut mins = [f64::INFINITY; 2];
            for (i, &x1) in ms.points().iter().enumerate() {
                let b = ms.label_bit(i, j) as usize;
                for &x2 in mi.points() {
                    mins[b] = mins[b].min(pair_distance(obs, x1, x2, s));
                }
            }
            mins[0] - mins[1]
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// One seeded classification instance.
pub struct Instance {
    pub ms: Constellation,
    pub mi: Constellation,
    pub sir_scale: f64,
    pub obs: Vec<ToneObservation>,
}

/// Instance `i` of a seeded family cycling through every
/// (desired, interferer) pair, with SNR uniform in [-5, 25] dB.
pub fn instance(seed: u64, i: usize, n: usize) -> Instance {
    let desired = [ConstellationKind::Qam4, ConstellationKind::Qam16, ConstellationKind::Qam64];
    let ms = Constellation::new(desired[i % 3]);
    let mi = Constellation::new(ConstellationKind::ALL[(i / 3) % 4]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(i as u64));
    let snr_db: f64 = rng.random_range(-5.0..25.0);
    let var = 10f64.powf(-snr_db / 10.0);
    let sir_scale = if i % 5 == 0 { 10f64.powf(-3.0 / 20.0) } else { 1.0 };
    let chans = gen_iid_block(n, &mut rng);
    let obs = chans
        .iter()
        .map(|c| {
            let x1 = ms.point(rng.random_range(0..ms.len()));
            let x2 = mi.point(rng.random_range(0..mi.len()));
            transmit(c, x1, x2, sir_scale, var, &mut rng)
        })
        .collect();
    Instance { ms, mi, sir_scale, obs }
}
