//! Linear combiners: pilot-covariance based and interference rejection
//! combining, with max-log soft demapping of the combined scalar.

use num_complex::Complex64;

use crate::channel::{ToneChannel, ToneObservation};
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};

const REGULARIZE_ABOVE_CONDITION: f64 = 1e8;
const REGULARIZATION: f64 = 1e-6;

/// Combining vector and the Gaussian model of its output,
/// `z = w* y ~ CN(gain x1, residual_var)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearWeights {
    pub w: Vec2,
    /// `w* h1`.
    pub gain: Complex64,
    pub residual_var: f64,
}

/// Sample covariance of the pilot residuals `u_p = y_p - h1 x_p`, loaded by
/// `1e-6 trace/2` when its condition number exceeds `1e8`.
pub fn interference_covariance(pilots: &[(Complex64, ToneObservation)]) -> Result<Mat2> {
    if pilots.len() < 2 {
        return Err(Error::TooFewPilots {
            min: 2,
            actual: pilots.len(),
        });
    }
    let mut r = Mat2::default();
    for (x, obs) in pilots {
        let u = obs.y - obs.chan.h1.scale(*x);
        r = r + u.outer(&u);
    }
    let mut r = r.scale_re(1.0 / pilots.len() as f64);
    if r.hermitian_condition() > REGULARIZE_ABOVE_CONDITION {
        let load = REGULARIZATION * r.trace().re / 2.0;
        r = r + Mat2::identity().scale_re(load);
    }
    if r.inverse().is_none() || r.hermitian_condition() == f64::INFINITY {
        return Err(Error::SingularCovariance);
    }
    Ok(r)
}

/// `w = R_uu^{-1} h1` with `residual_var = w* R_uu w`.
pub fn cov_weights(r_uu: &Mat2, h1: &Vec2) -> Result<LinearWeights> {
    let inv = r_uu.inverse().ok_or(Error::SingularCovariance)?;
    let w = inv.mul_vec(h1);
    Ok(LinearWeights {
        w,
        gain: w.dot(h1),
        residual_var: w.dot(&r_uu.mul_vec(&w)).re,
    })
}

/// `w = (s^2 h2 h2* + noise_var I)^{-1} h1` with the interference-plus-noise
/// variance of `w* y`.
pub fn irc_weights(chan: &ToneChannel, sir_scale: f64, noise_var: f64) -> LinearWeights {
    let h1 = &chan.h1;
    let g = chan.h2.scale_re(sir_scale);
    let cov = g.outer(&g) + Mat2::identity().scale_re(noise_var);
    let w = cov.inverse().expect("positive definite for noise_var > 0").mul_vec(h1);
    LinearWeights {
        w,
        gain: w.dot(h1),
        residual_var: w.dot(&cov.mul_vec(&w)).re,
    }
}

#[inline]
pub fn combine(weights: &LinearWeights, y: &Vec2) -> Complex64 {
    weights.w.dot(y)
}

/// Max-log LLRs of the scalar Gaussian model, positive favouring bit 1.
pub fn irc_llr(z: Complex64, weights: &LinearWeights, ms: &Constellation) -> Vec<f64> {
    let m = ms.bits_per_symbol();
    let mut mins = [[f64::INFINITY; 2]; 6];
    for (p, &x) in ms.points().iter().enumerate() {
        let d = (z - weights.gain * x).norm_sqr();
        for (j, slot) in mins.iter_mut().enumerate().take(m) {
            let b = ms.label_bit(p, j) as usize;
            if d < slot[b] {
                slot[b] = d;
            }
        }
    }
    (0..m)
        .map(|j| (mins[j][0] - mins[j][1]) / weights.residual_var)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{BitSign, ConstellationKind};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pilot(y: Vec2, h1: Vec2, x: Complex64) -> (Complex64, ToneObservation) {
        (
            x,
            ToneObservation {
                y,
                chan: ToneChannel {
                    h1,
                    h2: Vec2::zero(),
                    tone_index: 0,
                },
                noise_var: 1.0,
            },
        )
    }

    #[test]
    fn alternating_unit_residuals() {
        let h1 = Vec2::new(c(0.3, -0.2), c(1.1, 0.4));
        let x = c(1.0, 0.0);
        let e1 = Vec2::new(c(1.0, 0.0), c(0.0, 0.0));
        let e2 = Vec2::new(c(0.0, 0.0), c(1.0, 0.0));
        let pilots = [pilot(h1.scale(x) + e1, h1, x), pilot(h1.scale(x) + e2, h1, x)];
        let r = interference_covariance(&pilots).unwrap();
        assert!(r.max_abs_diff(&Mat2::identity().scale_re(0.5)) < 1e-15);
        let w = cov_weights(&r, &h1).unwrap();
        assert!((w.w - h1.scale_re(2.0)).norm_sqr() < 1e-28);
    }

    #[test]
    fn too_few_or_degenerate_pilots() {
        let h1 = Vec2::new(c(1.0, 0.0), c(0.0, 0.0));
        let x = c(1.0, 0.0);
        assert!(matches!(
            interference_covariance(&[pilot(h1, h1, x)]),
            Err(Error::TooFewPilots { .. })
        ));
        let zero = [pilot(h1, h1, x), pilot(h1, h1, x)];
        assert!(matches!(interference_covariance(&zero), Err(Error::SingularCovariance)));
    }

    #[test]
    fn rank_one_covariance_gets_loaded() {
        let h1 = Vec2::new(c(1.0, 0.0), c(0.0, 0.0));
        let x = c(0.0, 0.0);
        let u = Vec2::new(c(1.0, 0.0), c(1.0, 0.0));
        let r = interference_covariance(&[pilot(u, h1, x), pilot(u.scale_re(-1.0), h1, x)]).unwrap();
        assert!(r.hermitian_condition().is_finite());
        assert!((r.0[0][0].re - (1.0 + 1e-6)).abs() < 1e-12);
    }

    #[test]
    fn irc_without_interferer_is_matched_filter() {
        let h1 = Vec2::new(c(0.7, 0.1), c(-0.2, 0.9));
        let chan = ToneChannel { h1, h2: Vec2::zero(), tone_index: 0 };
        let w = irc_weights(&chan, 1.0, 1.0);
        assert!((w.w - h1).norm_sqr() < 1e-30);
    }

    #[test]
    fn irc_orthogonal_users() {
        let h1 = Vec2::new(c(1.0, 0.0), c(0.0, 0.0));
        let h2 = Vec2::new(c(0.0, 0.0), c(1.0, 0.0));
        let w = irc_weights(&ToneChannel { h1, h2, tone_index: 0 }, 1.0, 1.0);
        assert_eq!(w.w, h1);
        assert_eq!(w.gain, c(1.0, 0.0));
        assert_eq!(w.residual_var, 1.0);
    }

    #[test]
    fn llr_on_a_constellation_image_point() {
        let ms = Constellation::new(ConstellationKind::Qam16);
        let weights = LinearWeights {
            w: Vec2::zero(),
            gain: c(0.8, -0.3),
            residual_var: 0.1,
        };
        for p in 0..ms.len() {
            let llr = irc_llr(weights.gain * ms.point(p), &weights, &ms);
            for (j, l) in llr.iter().enumerate() {
                assert_eq!(*l > 0.0, ms.label_bit(p, j) == 1);
            }
        }
    }

    #[test]
    fn qam4_llr_is_exhaustive_two_point_min() {
        let ms = Constellation::new(ConstellationKind::Qam4);
        let weights = LinearWeights {
            w: Vec2::zero(),
            gain: c(1.0, 0.0),
            residual_var: 0.5,
        };
        let z = c(0.31, -0.07);
        let llr = irc_llr(z, &weights, &ms);
        for (j, &got) in llr.iter().enumerate() {
            let best = |sign| {
                ms.bit_partition(j, sign)
                    .unwrap()
                    .subset
                    .iter()
                    .map(|&p| (z - ms.point(p)).norm_sqr())
                    .fold(f64::INFINITY, f64::min)
            };
            let expected = (best(BitSign::Minus) - best(BitSign::Plus)) / 0.5;
            assert!((got - expected).abs() < 1e-12);
        }
        // Gray 4-QAM: the LLR is linear in the component, 2 sqrt(2) Re(z) / var
        let lin = 2.0 * std::f64::consts::SQRT_2 * z.re / 0.5;
        assert!((llr[0] - lin).abs() < 1e-12);
    }

    #[test]
    fn joint_scaling_keeps_the_sign_pattern() {
        let ms = Constellation::new(ConstellationKind::Qam64);
        let weights = LinearWeights {
            w: Vec2::zero(),
            gain: c(0.6, 0.5),
            residual_var: 0.2,
        };
        let z = c(0.42, -0.9);
        let a = 3.7;
        let scaled = LinearWeights {
            gain: weights.gain * a,
            residual_var: weights.residual_var * a * a,
            ..weights
        };
        let l1 = irc_llr(z, &weights, &ms);
        let l2 = irc_llr(z * a, &scaled, &ms);
        for (x, y) in l1.iter().zip(&l2) {
            assert_eq!(x.signum(), y.signum());
        }
    }
}
