//! Perceived payoff: the lens through which an agent views a raw payoff
//! relative to its fairness threshold.
//!
//! The argument is always a disparity `delta = payoff - tau`. The
//! [`LensFamily::ExpValue`] family is an exponential value function that
//! saturates at `1` for gains and at `-lambda` for losses, so a loss always
//! weighs more than an equal gain. Both asymptotes are modeling choices.
//! [`LensFamily::Linear`] is the identity and exists so the fairness
//! utility can be checked against the plain transcendence utility.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STEEPNESS: f64 = 15.0;
pub const DEFAULT_LOSS_AVERSION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LensFamily {
    Linear,
    ExpValue,
}

impl fmt::Display for LensFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LensFamily::Linear => "linear",
            LensFamily::ExpValue => "exp_value",
        })
    }
}

impl FromStr for LensFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(LensFamily::Linear),
            "exp_value" => Ok(LensFamily::ExpValue),
            other => Err(Error::config(
                "payoff.family",
                format!("must be one of linear, exp_value (got `{other}`)"),
            )),
        }
    }
}

/// A validated perceived-payoff function.
///
/// Construct through [`PayoffLens::linear`] or [`PayoffLens::exp_value`];
/// parameter checks happen there so evaluation never fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffLens {
    family: LensFamily,
    loss_aversion: f64,
    steepness: f64,
}

impl PayoffLens {
    pub fn linear() -> Self {
        PayoffLens {
            family: LensFamily::Linear,
            loss_aversion: 1.0,
            steepness: 1.0,
        }
    }

    /// Exponential value function with steepness `k > 0` and loss aversion
    /// `lambda > 1`.
    pub fn exp_value(steepness: f64, loss_aversion: f64) -> Result<Self> {
        if !(steepness.is_finite() && steepness > 0.0) {
            return Err(Error::config("payoff.k", "must be > 0"));
        }
        if !(loss_aversion.is_finite() && loss_aversion > 1.0) {
            return Err(Error::config("payoff.lambda", "must be > 1"));
        }
        Ok(PayoffLens {
            family: LensFamily::ExpValue,
            loss_aversion,
            steepness,
        })
    }

    /// Builds a lens of the given family. `Linear` ignores both parameters.
    pub fn new(family: LensFamily, steepness: f64, loss_aversion: f64) -> Result<Self> {
        match family {
            LensFamily::Linear => Ok(Self::linear()),
            LensFamily::ExpValue => Self::exp_value(steepness, loss_aversion),
        }
    }

    pub fn family(&self) -> LensFamily {
        self.family
    }

    pub fn loss_aversion(&self) -> f64 {
        self.loss_aversion
    }

    pub fn steepness(&self) -> f64 {
        self.steepness
    }

    /// Largest magnitude the lens can return for a disparity in `[-1, 1]`.
    pub fn magnitude_bound(&self) -> f64 {
        match self.family {
            LensFamily::Linear => 1.0,
            LensFamily::ExpValue => self.loss_aversion.max(1.0),
        }
    }
}

impl Default for PayoffLens {
    fn default() -> Self {
        PayoffLens {
            family: LensFamily::ExpValue,
            loss_aversion: DEFAULT_LOSS_AVERSION,
            steepness: DEFAULT_STEEPNESS,
        }
    }
}

/// Evaluates `f(delta)`.
pub fn perceived_payoff(lens: &PayoffLens, delta: f64) -> f64 {
    debug_assert!(delta.is_finite(), "disparity must be finite");
    match lens.family {
        LensFamily::Linear => delta,
        LensFamily::ExpValue => {
            let k = lens.steepness;
            if delta >= 0.0 {
                -(-k * delta).exp_m1()
            } else {
                lens.loss_aversion * (k * delta).exp_m1()
            }
        }
    }
}

/// `|f(-delta)| - |f(delta)|` for `delta > 0`. Positive for every valid
/// exponential lens.
pub fn loss_aversion_gap(lens: &PayoffLens, delta: f64) -> Result<f64> {
    if lens.family == LensFamily::Linear {
        return Err(Error::LossAversionUndefined);
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "loss aversion gap needs delta > 0 (got {delta})"
        )));
    }
    Ok(perceived_payoff(lens, -delta).abs() - perceived_payoff(lens, delta).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lens_8_2() -> PayoffLens {
        PayoffLens::exp_value(8.0, 2.0).unwrap()
    }

    // Midpoint-rule integral of f' from 0 to delta; independent of the
    // closed form used above.
    fn integrate_derivative(k: f64, lambda: f64, delta: f64) -> f64 {
        let n = 200_000;
        let h = delta / n as f64;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                let slope = if t >= 0.0 {
                    k * (-k * t).exp()
                } else {
                    lambda * k * (k * t).exp()
                };
                slope * h
            })
            .sum()
    }

    #[test]
    fn linear_is_identity() {
        assert_eq!(perceived_payoff(&PayoffLens::linear(), 0.3), 0.3);
        assert_eq!(perceived_payoff(&PayoffLens::linear(), -0.7), -0.7);
    }

    #[test]
    fn exp_value_zero_is_zero() {
        assert_eq!(perceived_payoff(&lens_8_2(), 0.0), 0.0);
        assert_eq!(perceived_payoff(&PayoffLens::default(), 0.0), 0.0);
    }

    #[test]
    fn exp_value_loss_matches_closed_form_and_quadrature() {
        let v = perceived_payoff(&lens_8_2(), -0.1);
        assert!((v - (-1.101_342_071_765_556_8)).abs() < 1e-12);
        let quad = integrate_derivative(8.0, 2.0, -0.1);
        assert!((v - quad).abs() < 1e-8, "{v} vs {quad}");
    }

    #[test]
    fn gap_examples() {
        let g = loss_aversion_gap(&lens_8_2(), 0.1).unwrap();
        assert!((g - 0.550_671_035_882_778_4).abs() < 1e-12);
        let lens = PayoffLens::exp_value(4.0, 3.0).unwrap();
        let g = loss_aversion_gap(&lens, 0.5).unwrap();
        assert!((g - 1.729_329_433_526_774_6).abs() < 1e-12);
        let g = loss_aversion_gap(&lens, 1e-12).unwrap();
        assert!(g > 0.0 && g < 1e-9);
    }

    #[test]
    fn gap_rejects_linear_and_nonpositive_delta() {
        let err = loss_aversion_gap(&PayoffLens::linear(), 0.2).unwrap_err();
        assert_eq!(err.to_string(), "loss aversion undefined for symmetric family");
        assert!(loss_aversion_gap(&lens_8_2(), 0.0).is_err());
        assert!(loss_aversion_gap(&lens_8_2(), -0.1).is_err());
    }

    #[test]
    fn construction_validates_parameters() {
        let err = PayoffLens::exp_value(8.0, 0.5).unwrap_err();
        assert_eq!(err.to_string(), "payoff.lambda must be > 1");
        assert!(PayoffLens::exp_value(8.0, 1.0).is_err());
        let err = PayoffLens::exp_value(0.0, 2.0).unwrap_err();
        assert_eq!(err.to_string(), "payoff.k must be > 0");
        assert!(PayoffLens::exp_value(f64::NAN, 2.0).is_err());
        // linear ignores whatever parameters it is handed
        assert!(PayoffLens::new(LensFamily::Linear, -1.0, 0.0).is_ok());
    }

    #[test]
    fn bounded_by_asymptotes() {
        let lens = lens_8_2();
        for i in -100..=100 {
            let v = perceived_payoff(&lens, i as f64 / 100.0);
            assert!(v > -2.0 && v < 1.0, "{v}");
        }
    }

    #[test]
    fn s_shape_second_differences() {
        let lens = lens_8_2();
        let h = 1e-3;
        let f = |x: f64| perceived_payoff(&lens, x);
        for i in 1..1000 {
            let x = i as f64 * 1e-3;
            if x - h > 0.0 {
                assert!(f(x + h) - 2.0 * f(x) + f(x - h) < 0.0, "not concave at {x}");
            }
            if -x + h < 0.0 {
                assert!(f(-x + h) - 2.0 * f(-x) + f(-x - h) > 0.0, "not convex at {}", -x);
            }
        }
    }

    fn any_exp_lens() -> impl Strategy<Value = PayoffLens> {
        (0.1f64..20.0, 1.0001f64..10.0).prop_map(|(k, l)| PayoffLens::exp_value(k, l).unwrap())
    }

    proptest! {
        #[test]
        fn strictly_increasing(lens in any_exp_lens(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
            prop_assume!((a - b).abs() > 1e-6);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(perceived_payoff(&lens, lo) < perceived_payoff(&lens, hi));
        }

        #[test]
        fn losses_outweigh_gains(lens in any_exp_lens(), delta in 1e-6f64..=1.0) {
            prop_assert!(loss_aversion_gap(&lens, delta).unwrap() > 0.0);
        }

        #[test]
        fn linear_reduces_exactly(delta in -5.0f64..5.0) {
            prop_assert_eq!(perceived_payoff(&PayoffLens::linear(), delta), delta);
        }
    }
}
