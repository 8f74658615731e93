//! An agent's sense of self: transcendence level, identity set and the
//! semantic distance to each aspect, plus the fairness threshold the agent
//! applies toward an aspect.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of the distinguished self aspect.
pub const SELF_ASPECT: &str = "self";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AspectId(String);

impl AspectId {
    pub fn new(id: impl Into<String>) -> Self {
        AspectId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AspectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AspectId {
    fn from(s: &str) -> Self {
        AspectId::new(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aspect {
    id: AspectId,
    distance: f64,
    /// Reserved for per-aspect thresholds. No shipped operation reads it;
    /// agent-based mode keeps its single threshold in [`FairnessMode`].
    fixed_tau: Option<f64>,
}

impl Aspect {
    pub fn new(id: impl Into<AspectId>, distance: f64) -> Result<Self> {
        let id = id.into();
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "aspect `{id}` distance must be finite and >= 0 (got {distance})"
            )));
        }
        Ok(Aspect {
            id,
            distance,
            fixed_tau: None,
        })
    }

    pub fn with_fixed_tau(mut self, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidArgument(format!(
                "aspect `{}` fixed_tau must lie in [0, 1] (got {tau})",
                self.id
            )));
        }
        self.fixed_tau = Some(tau);
        Ok(self)
    }

    pub fn id(&self) -> &AspectId {
        &self.id
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn fixed_tau(&self) -> Option<f64> {
        self.fixed_tau
    }
}

/// Transcendence level and identity set of one agent.
///
/// The self aspect is always present, always first and always at distance
/// zero. Aspect ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseOfSelf {
    gamma: f64,
    aspects: Vec<Aspect>,
}

impl SenseOfSelf {
    /// A sense of self that identifies only with itself.
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidArgument(format!(
                "gamma must lie in [0, 1] (got {gamma})"
            )));
        }
        Ok(SenseOfSelf {
            gamma,
            aspects: vec![Aspect::new(SELF_ASPECT, 0.0)?],
        })
    }

    /// Adds an aspect to the identity set.
    pub fn with_aspect(mut self, aspect: Aspect) -> Result<Self> {
        if self.aspects.iter().any(|a| a.id == aspect.id) {
            return Err(Error::InvalidArgument(format!(
                "duplicate aspect id `{}`",
                aspect.id
            )));
        }
        self.aspects.push(aspect);
        Ok(self)
    }

    /// The two-aspect identity used by the game engine: self plus one
    /// partner at distance `distance`.
    pub fn dyad(gamma: f64, partner: impl Into<AspectId>, distance: f64) -> Result<Self> {
        Self::new(gamma)?.with_aspect(Aspect::new(partner, distance)?)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn aspects(&self) -> &[Aspect] {
        &self.aspects
    }

    pub fn self_aspect(&self) -> &Aspect {
        &self.aspects[0]
    }

    pub fn aspect(&self, id: &AspectId) -> Result<&Aspect> {
        self.aspects
            .iter()
            .find(|a| &a.id == id)
            .ok_or_else(|| Error::UnknownAspect(id.to_string()))
    }

    /// `gamma^d` toward the aspect, with `gamma^0 = 1` even for `gamma = 0`.
    pub fn attenuation(&self, aspect: &AspectId) -> Result<f64> {
        Ok(attenuation_factor(self.gamma, self.aspect(aspect)?.distance))
    }

    /// Fairness threshold this agent applies toward `aspect` under `mode`.
    pub fn effective_tau(&self, mode: &FairnessMode, aspect: &AspectId) -> Result<f64> {
        let aspect = self.aspect(aspect)?;
        Ok(mode.tau_for(self.gamma, aspect.distance))
    }
}

/// `gamma^d` with the convention that a zero distance always weighs 1.
pub fn attenuation_factor(gamma: f64, distance: f64) -> f64 {
    if distance == 0.0 {
        1.0
    } else {
        gamma.powf(distance)
    }
}

/// Association-based threshold `1 - gamma^d`.
pub fn association_tau(gamma: f64, distance: f64) -> f64 {
    1.0 - attenuation_factor(gamma, distance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FairnessMode {
    /// No fairness lens; utilities use raw payoffs.
    Baseline,
    /// One threshold for every aspect.
    AgentBased(f64),
    /// Threshold derived per aspect from the attenuation factor.
    AssociationBased,
}

impl FairnessMode {
    pub fn agent_based(tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidArgument(format!(
                "agent-based tau must lie in [0, 1] (got {tau})"
            )));
        }
        Ok(FairnessMode::AgentBased(tau))
    }

    pub fn kind(&self) -> ModeKind {
        match self {
            FairnessMode::Baseline => ModeKind::Baseline,
            FairnessMode::AgentBased(_) => ModeKind::AgentTau,
            FairnessMode::AssociationBased => ModeKind::Association,
        }
    }

    pub fn tau_for(&self, gamma: f64, distance: f64) -> f64 {
        match *self {
            FairnessMode::Baseline => 0.0,
            FairnessMode::AgentBased(tau) => tau,
            FairnessMode::AssociationBased => association_tau(gamma, distance),
        }
    }
}

/// Config-facing name of a [`FairnessMode`] without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    Baseline,
    AgentTau,
    Association,
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeKind::Baseline => "baseline",
            ModeKind::AgentTau => "agent_tau",
            ModeKind::Association => "association",
        })
    }
}

impl FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "baseline" => Ok(ModeKind::Baseline),
            "agent_tau" => Ok(ModeKind::AgentTau),
            "association" => Ok(ModeKind::Association),
            other => Err(format!(
                "must be one of baseline, agent_tau, association (got `{other}`)"
            )),
        }
    }
}
