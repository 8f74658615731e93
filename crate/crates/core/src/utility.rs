//! Utility of a system state for a transcendent agent.
//!
//! Three forms: the general attenuation-weighted utility over an identity
//! set, the two-player Ultimatum Game specialisation, and the same
//! specialisation with every payoff viewed through a [`PayoffLens`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::identity::{attenuation_factor, AspectId, SenseOfSelf};
use crate::payoff::{perceived_payoff, PayoffLens};

/// Raw payoff per aspect, in units of the shared resource (normalised to 1).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PayoffVector(BTreeMap<AspectId, f64>);

impl PayoffVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, aspect: impl Into<AspectId>, payoff: f64) -> Self {
        self.0.insert(aspect.into(), payoff);
        self
    }

    pub fn get(&self, aspect: &AspectId) -> Option<f64> {
        self.0.get(aspect).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AspectId, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl<K: Into<AspectId>> FromIterator<(K, f64)> for PayoffVector {
    fn from_iter<I: IntoIterator<Item = (K, f64)>>(iter: I) -> Self {
        PayoffVector(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

/// An agent's own share of the unit resource; the partner gets the rest.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Split(f64);

impl Split {
    pub fn new(own_share: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&own_share) {
            return Err(Error::InvalidArgument(format!(
                "split share must lie in [0, 1] (got {own_share})"
            )));
        }
        Ok(Split(own_share))
    }

    pub fn own_share(self) -> f64 {
        self.0
    }

    pub fn partner_share(self) -> f64 {
        1.0 - self.0
    }

    /// The same split seen from the partner's side.
    pub fn flipped(self) -> Split {
        Split(1.0 - self.0)
    }
}

/// Attenuation-weighted average of the payoffs of every aspect in the
/// identity set.
pub fn ct_utility(sense: &SenseOfSelf, payoffs: &PayoffVector) -> Result<f64> {
    for (id, _) in payoffs.iter() {
        sense.aspect(id)?;
    }
    let mut weighted = 0.0;
    let mut total_weight = 0.0;
    for aspect in sense.aspects() {
        let payoff = payoffs
            .get(aspect.id())
            .ok_or_else(|| Error::MissingPayoff(aspect.id().to_string()))?;
        let w = attenuation_factor(sense.gamma(), aspect.distance());
        weighted += w * payoff;
        total_weight += w;
    }
    // the self aspect always contributes weight 1
    Ok(weighted / total_weight)
}

/// Two-player utility without a fairness lens: own payoff plus the
/// attenuated partner payoff, normalised.
pub fn baseline_ug_utility(gamma: f64, distance: f64, own: f64, partner: f64) -> f64 {
    let w = attenuation_factor(gamma, distance);
    (own + w * partner) / (1.0 + w)
}

/// Two-player utility with both payoffs viewed through `lens` relative to
/// the same threshold `tau`. The agent assumes its partner shares its
/// threshold.
pub fn fair_ug_utility(
    gamma: f64,
    distance: f64,
    tau: f64,
    lens: &PayoffLens,
    own: f64,
    partner: f64,
) -> f64 {
    fair_ug_utility_split_tau(gamma, distance, tau, tau, lens, own, partner)
}

/// As [`fair_ug_utility`] but with separate thresholds for the own and the
/// partner term.
pub fn fair_ug_utility_split_tau(
    gamma: f64,
    distance: f64,
    own_tau: f64,
    partner_tau: f64,
    lens: &PayoffLens,
    own: f64,
    partner: f64,
) -> f64 {
    let w = attenuation_factor(gamma, distance);
    (perceived_payoff(lens, own - own_tau) + w * perceived_payoff(lens, partner - partner_tau))
        / (1.0 + w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::Aspect;
    use proptest::prelude::*;

    fn lens_8_2() -> PayoffLens {
        PayoffLens::exp_value(8.0, 2.0).unwrap()
    }

    #[test]
    fn ct_utility_examples() {
        let solo = SenseOfSelf::new(0.3).unwrap();
        let p = PayoffVector::new().with("self", 0.42);
        assert_eq!(ct_utility(&solo, &p).unwrap(), 0.42);

        let p = PayoffVector::new().with("self", 0.8).with("other", 0.2);
        let full = SenseOfSelf::dyad(1.0, "other", 1.0).unwrap();
        assert!((ct_utility(&full, &p).unwrap() - 0.5).abs() < 1e-15);
        let half = SenseOfSelf::dyad(0.5, "other", 1.0).unwrap();
        assert!((ct_utility(&half, &p).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn ct_utility_over_larger_identity_set() {
        let sense = SenseOfSelf::new(0.5)
            .unwrap()
            .with_aspect(Aspect::new("kin", 1.0).unwrap())
            .unwrap()
            .with_aspect(Aspect::new("town", 2.0).unwrap())
            .unwrap();
        let p = PayoffVector::new()
            .with("self", 1.0)
            .with("kin", 0.0)
            .with("town", 0.4);
        // (1 + 0.5*0 + 0.25*0.4) / 1.75
        assert!((ct_utility(&sense, &p).unwrap() - 1.1 / 1.75).abs() < 1e-15);
    }

    #[test]
    fn ct_utility_rejects_mismatched_payoffs() {
        let sense = SenseOfSelf::dyad(0.5, "other", 1.0).unwrap();
        let missing = PayoffVector::new().with("self", 1.0);
        assert!(matches!(
            ct_utility(&sense, &missing),
            Err(Error::MissingPayoff(ref id)) if id == "other"
        ));
        let extra = PayoffVector::new()
            .with("self", 1.0)
            .with("other", 0.0)
            .with("stranger", 0.0);
        assert!(matches!(
            ct_utility(&sense, &extra),
            Err(Error::UnknownAspect(_))
        ));
    }

    #[test]
    fn baseline_examples() {
        for x in [0.0, 0.3, 0.77, 1.0] {
            for d in [0.0, 1.0, 2.4] {
                assert!((baseline_ug_utility(1.0, d, x, 1.0 - x) - 0.5).abs() < 1e-15);
            }
        }
        assert!((baseline_ug_utility(0.5, 1.0, 0.8, 0.2) - 0.6).abs() < 1e-15);
        assert_eq!(baseline_ug_utility(0.0, 1.0, 0.37, 0.63), 0.37);
        assert!((baseline_ug_utility(1e-12, 1.0, 0.37, 0.63) - 0.37).abs() < 1e-11);
    }

    #[test]
    fn fair_examples() {
        let u = fair_ug_utility(0.3, 1.7, 0.0, &PayoffLens::linear(), 0.8, 0.2);
        assert!((u - baseline_ug_utility(0.3, 1.7, 0.8, 0.2)).abs() < 1e-15);

        let u = fair_ug_utility(0.7, 0.0, 0.5, &lens_8_2(), 0.5, 0.5);
        assert_eq!(u, 0.0);

        // (f(0.4) + 0.4 f(0.2)) / 1.4
        let u = fair_ug_utility(0.4, 1.0, 0.2, &lens_8_2(), 0.6, 0.4);
        assert!((u - 0.913_199_420_588_408_3).abs() < 1e-12, "{u}");
    }

    #[test]
    fn rejection_state_collapses_to_lens_at_minus_tau() {
        let lens = lens_8_2();
        for (g, d, tau) in [(0.4, 1.0, 0.2), (0.9, 0.3, 0.7), (0.1, 2.0, 0.0)] {
            let u = fair_ug_utility(g, d, tau, &lens, 0.0, 0.0);
            assert!((u - perceived_payoff(&lens, -tau)).abs() < 1e-15);
        }
    }

    #[test]
    fn split_accessors() {
        let s = Split::new(0.3).unwrap();
        assert_eq!(s.partner_share(), 0.7);
        assert_eq!(s.flipped().own_share(), 0.7);
        assert!(Split::new(1.01).is_err());
    }

    #[test]
    fn equal_split_is_the_only_zero_at_d0_half_tau() {
        let lens = PayoffLens::default();
        for i in 0..=100 {
            let s = i as f64 / 100.0;
            let u = fair_ug_utility(0.5, 0.0, 0.5, &lens, s, 1.0 - s);
            if i == 50 {
                assert_eq!(u, 0.0);
            } else {
                assert!(u < 0.0, "s={s} u={u}");
            }
        }
    }

    proptest! {
        #[test]
        fn baseline_agrees_with_general_form(g in 0.0f64..=1.0, d in 0.0f64..5.0, x in 0.0f64..=1.0) {
            let sense = SenseOfSelf::dyad(g, "other", d).unwrap();
            let p = PayoffVector::new().with("self", x).with("other", 1.0 - x);
            let general = ct_utility(&sense, &p).unwrap();
            prop_assert!((general - baseline_ug_utility(g, d, x, 1.0 - x)).abs() < 1e-12);
        }

        #[test]
        fn baseline_is_a_convex_combination(g in 0.0f64..=1.0, d in 0.0f64..5.0, x in 0.0f64..=1.0) {
            let u = baseline_ug_utility(g, d, x, 1.0 - x);
            prop_assert!(u >= x.min(1.0 - x) - 1e-15 && u <= x.max(1.0 - x) + 1e-15);
        }

        #[test]
        fn d0_is_symmetric(g in 0.0f64..=1.0, tau in 0.0f64..=1.0, s in 0.0f64..=1.0) {
            let lens = PayoffLens::default();
            let a = fair_ug_utility(g, 0.0, tau, &lens, s, 1.0 - s);
            let b = fair_ug_utility(g, 0.0, tau, &lens, 1.0 - s, s);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn fair_utility_bounded(g in 0.0f64..=1.0, d in 0.0f64..5.0, tau in 0.0f64..=1.0, s in 0.0f64..=1.0,
                                k in 0.1f64..30.0, l in 1.001f64..6.0) {
            let lens = PayoffLens::exp_value(k, l).unwrap();
            let u = fair_ug_utility(g, d, tau, &lens, s, 1.0 - s);
            prop_assert!(u.abs() <= lens.magnitude_bound());
        }

        #[test]
        fn advantaged_side_turns_positive_with_distance(s in 0.55f64..=1.0) {
            // tau = 0.5: at d = 0 the advantaged split is disliked; once
            // gamma^d drops under f(delta)/|f(-delta)| it is liked.
            let lens = PayoffLens::default();
            let g = 0.5;
            prop_assert!(fair_ug_utility(g, 0.0, 0.5, &lens, s, 1.0 - s) < 0.0);
            let gain = perceived_payoff(&lens, s - 0.5);
            let loss = perceived_payoff(&lens, 0.5 - s).abs();
            let d_switch = (gain / loss).ln() / g.ln();
            prop_assert!(fair_ug_utility(g, d_switch + 0.1, 0.5, &lens, s, 1.0 - s) > 0.0);
        }
    }
}
