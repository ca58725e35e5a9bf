//! Interferer classification after nulling the desired user.
//!
//! Projecting the received vector onto the orthogonal complement of `h1`
//! leaves a scalar observation `g* y = a x2 + n~` of the interferer alone.

use num_complex::Complex64;

use super::ClassificationResult;
use crate::channel::ToneObservation;
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};

/// `I - h1 h1* / ||h1||^2`.
pub fn projection_matrix(h1: &Vec2) -> Result<Mat2> {
    let energy = h1.norm_sqr();
    if energy == 0.0 || !energy.is_finite() {
        return Err(Error::ZeroChannel { tone: 0 });
    }
    Ok(Mat2::identity() - h1.outer(h1).scale_re(1.0 / energy))
}

/// Nulling vector `g = G c` with `c` the unit vector giving the larger `||G c||`
/// (`e1` on ties).
pub fn nulling_filter(h1: &Vec2) -> Result<Vec2> {
    let proj = projection_matrix(h1)?;
    // ||G e_k||^2 = G_kk for an orthogonal projector
    let k = if proj.0[1][1].re > proj.0[0][0].re { 1 } else { 0 };
    Ok(proj.column(k))
}

/// Scalar interferer observation on one tone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NulledTone {
    pub y: Complex64,
    pub gain: Complex64,
    /// `g* R g = noise_var ||g||^2`.
    pub noise_var: f64,
}

pub fn null_tone(obs: &ToneObservation, sir_scale: f64) -> Result<NulledTone> {
    let g = nulling_filter(&obs.chan.h1).map_err(|_| Error::ZeroChannel {
        tone: obs.chan.tone_index,
    })?;
    Ok(NulledTone {
        y: g.dot(&obs.y),
        gain: g.dot(&obs.chan.h2) * sir_scale,
        noise_var: obs.noise_var * g.norm_sqr(),
    })
}

#[inline]
fn scalar_distance(t: &NulledTone, x2: Complex64) -> f64 {
    (t.y - t.gain * x2).norm_sqr() / t.noise_var
}

fn min_scalar_distance(t: &NulledTone, mi: &Constellation) -> f64 {
    let k = if mi.len() == 1 || t.gain.norm_sqr() == 0.0 {
        0
    } else {
        mi.slice(t.y / t.gain)
    };
    scalar_distance(t, mi.point(k))
}

/// Chooses the hypothesis minimizing `N ln|M_I| + sum_i min |y~ - a x2|^2 / (g* R g)`.
pub fn nulling_classify(
    obs: &[ToneObservation],
    hypotheses: &[Constellation],
    sir_scale: f64,
) -> Result<ClassificationResult> {
    if obs.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let tones: Vec<NulledTone> = obs
        .iter()
        .map(|o| null_tone(o, sir_scale))
        .collect::<Result<_>>()?;
    let n = tones.len() as f64;
    let metrics = hypotheses
        .iter()
        .map(|mi| {
            let acc: f64 = tones.iter().map(|t| min_scalar_distance(t, mi)).sum();
            (mi.kind(), n * (mi.len() as f64).ln() + acc)
        })
        .collect();
    Ok(ClassificationResult::from_metrics(metrics, tones.len()))
}
