//! Ultimatum Game engine.
//!
//! The allocator scans a discrete split grid and proposes its
//! utility-maximising own share. The recipient accepts when the utility of
//! its share reaches the acceptance threshold (zero by default). The
//! allocator does not anticipate rejection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identity::{AspectId, FairnessMode, SenseOfSelf};
use crate::payoff::PayoffLens;
use crate::utility::{baseline_ug_utility, fair_ug_utility_split_tau, Split};

pub const PARTNER_ASPECT: &str = "partner";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Minimise `|s - 0.5|`, then the lowest own share.
    #[default]
    ClosestToEqual,
    LowestOwnShare,
    HighestOwnShare,
}

impl fmt::Display for TieBreak {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreak::ClosestToEqual => "closest_to_equal",
            TieBreak::LowestOwnShare => "lowest_own_share",
            TieBreak::HighestOwnShare => "highest_own_share",
        })
    }
}

impl FromStr for TieBreak {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "closest_to_equal" => Ok(TieBreak::ClosestToEqual),
            "lowest_own_share" => Ok(TieBreak::LowestOwnShare),
            "highest_own_share" => Ok(TieBreak::HighestOwnShare),
            other => Err(format!(
                "must be one of closest_to_equal, lowest_own_share, highest_own_share (got `{other}`)"
            )),
        }
    }
}

/// Which threshold the own-payoff term uses under association-based
/// fairness. `Partner` applies the partner-derived threshold to both terms;
/// `Zero` uses the threshold toward self (always 0) for the own term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfTau {
    #[default]
    Partner,
    Zero,
}

impl fmt::Display for SelfTau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelfTau::Partner => "partner",
            SelfTau::Zero => "zero",
        })
    }
}

impl FromStr for SelfTau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "partner" => Ok(SelfTau::Partner),
            "zero" => Ok(SelfTau::Zero),
            other => Err(format!("must be one of partner, zero (got `{other}`)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameConfig {
    grid_step: f64,
    cells: usize,
    pub accept_threshold: f64,
    pub tie_break: TieBreak,
    tolerance: f64,
    pub association_self_tau: SelfTau,
}

pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            grid_step: DEFAULT_GRID_STEP,
            cells: 100,
            accept_threshold: 0.0,
            tie_break: TieBreak::default(),
            tolerance: DEFAULT_TOLERANCE,
            association_self_tau: SelfTau::default(),
        }
    }
}

impl GameConfig {
    /// Validates `grid_step` (must split `[0, 1]` into a whole number of
    /// cells) and `tolerance` (must be positive).
    pub fn new(grid_step: f64, tolerance: f64) -> Result<Self> {
        if !(tolerance.is_finite() && tolerance > 0.0) {
            return Err(Error::config("game.tolerance", "must be > 0"));
        }
        let cells = grid_cells(grid_step, tolerance)
            .ok_or_else(|| Error::config("game.grid_step", "must lie in (0, 0.5] and divide 1 into whole cells"))?;
        Ok(GameConfig {
            grid_step,
            cells,
            tolerance,
            ..Default::default()
        })
    }

    pub fn with_grid_step(self, grid_step: f64) -> Result<Self> {
        let mut cfg = GameConfig::new(grid_step, self.tolerance)?;
        cfg.accept_threshold = self.accept_threshold;
        cfg.tie_break = self.tie_break;
        cfg.association_self_tau = self.association_self_tau;
        Ok(cfg)
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Split grid `{0, step, ..., 1}`, ascending. Points are computed as
    /// `i / n` so that e.g. `0.5` lands exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.cells;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    /// Nearest grid point to `share`.
    pub fn snap(&self, share: f64) -> f64 {
        let n = self.cells as f64;
        (share.clamp(0.0, 1.0) * n).round() / n
    }
}

fn grid_cells(step: f64, tolerance: f64) -> Option<usize> {
    if !(step.is_finite() && step > 0.0 && step <= 0.5) {
        return None;
    }
    let n = (1.0 / step).round();
    ((n * step - 1.0).abs() <= tolerance).then_some(n as usize)
}

/// One player of the game: a self/partner identity, a fairness mode and a
/// payoff lens.
#[derive(Debug, Clone, PartialEq)]
pub struct PlayerSpec {
    sense: SenseOfSelf,
    pub mode: FairnessMode,
    pub lens: PayoffLens,
}

impl PlayerSpec {
    pub fn new(gamma: f64, distance: f64, mode: FairnessMode, lens: PayoffLens) -> Result<Self> {
        Ok(PlayerSpec {
            sense: SenseOfSelf::dyad(gamma, PARTNER_ASPECT, distance)?,
            mode,
            lens,
        })
    }

    pub fn baseline(gamma: f64, distance: f64) -> Result<Self> {
        Self::new(gamma, distance, FairnessMode::Baseline, PayoffLens::default())
    }

    pub fn sense(&self) -> &SenseOfSelf {
        &self.sense
    }

    pub fn gamma(&self) -> f64 {
        self.sense.gamma()
    }

    pub fn distance(&self) -> f64 {
        self.sense.aspects()[1].distance()
    }

    /// Threshold this player applies toward its partner.
    pub fn partner_tau(&self) -> f64 {
        self.sense
            .effective_tau(&self.mode, &AspectId::from(PARTNER_ASPECT))
            .expect("dyad always holds the partner aspect")
    }

    /// Utility of an arbitrary payoff pair (own, partner), including the
    /// rejection state `(0, 0)`.
    pub fn utility_of_payoffs(&self, cfg: &GameConfig, own: f64, partner: f64) -> f64 {
        let (gamma, d) = (self.gamma(), self.distance());
        match self.mode {
            FairnessMode::Baseline => baseline_ug_utility(gamma, d, own, partner),
            FairnessMode::AgentBased(_) | FairnessMode::AssociationBased => {
                let partner_tau = self.partner_tau();
                let own_tau = match (self.mode, cfg.association_self_tau) {
                    (FairnessMode::AssociationBased, SelfTau::Zero) => 0.0,
                    _ => partner_tau,
                };
                fair_ug_utility_split_tau(gamma, d, own_tau, partner_tau, &self.lens, own, partner)
            }
        }
    }
}

/// Utility to `player` of receiving `own` while its partner receives the
/// rest.
pub fn utility_of_split(player: &PlayerSpec, cfg: &GameConfig, own: f64) -> f64 {
    player.utility_of_payoffs(cfg, own, 1.0 - own)
}

/// Utility-maximising own share among `candidates`, with ties (within
/// tolerance of the maximum) broken by `cfg.tie_break`.
pub fn best_among(player: &PlayerSpec, cfg: &GameConfig, candidates: &[f64]) -> Option<(Split, f64)> {
    let scored: Vec<(f64, f64)> = candidates
        .iter()
        .map(|&s| (s, utility_of_split(player, cfg, s)))
        .collect();
    let max = scored.iter().map(|&(_, u)| u).fold(f64::NEG_INFINITY, f64::max);
    let ties = scored.iter().filter(|&&(_, u)| u >= max - cfg.tolerance);
    let pick = match cfg.tie_break {
        TieBreak::LowestOwnShare => ties.min_by(|a, b| a.0.total_cmp(&b.0)),
        TieBreak::HighestOwnShare => ties.max_by(|a, b| a.0.total_cmp(&b.0)),
        TieBreak::ClosestToEqual => ties.min_by(|a, b| {
            let (da, db) = ((a.0 - 0.5).abs(), (b.0 - 0.5).abs());
            if (da - db).abs() <= 1e-12 {
                a.0.total_cmp(&b.0)
            } else {
                da.total_cmp(&db)
            }
        }),
    }?;
    Some((Split::new(pick.0).ok()?, pick.1))
}

/// The allocator's proposal: its best own share on the configured grid.
pub fn best_split(player: &PlayerSpec, cfg: &GameConfig) -> (Split, f64) {
    best_among(player, cfg, &cfg.grid()).expect("grid is never empty")
}

/// Smallest of `candidates` (taken in the given order) the player would
/// accept as its own share.
pub fn min_acceptable_among(player: &PlayerSpec, cfg: &GameConfig, candidates: &[f64]) -> Option<Split> {
    candidates
        .iter()
        .copied()
        .find(|&s| accepts(player, cfg, s))
        .and_then(|s| Split::new(s).ok())
}

/// Smallest grid share the player would accept. Shares above it are not
/// necessarily acceptable: with a high threshold the utility curve can dip
/// again.
pub fn min_acceptable_split(player: &PlayerSpec, cfg: &GameConfig) -> Option<Split> {
    min_acceptable_among(player, cfg, &cfg.grid())
}

pub fn accepts(player: &PlayerSpec, cfg: &GameConfig, offered: f64) -> bool {
    utility_of_split(player, cfg, offered) >= cfg.accept_threshold - cfg.tolerance
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    /// Allocator's own share.
    pub proposed_split: Split,
    pub accepted: bool,
    pub payoff_allocator: f64,
    pub payoff_recipient: f64,
    pub util_allocator: f64,
    pub util_recipient: f64,
}

/// One round: the allocator proposes its best split and the recipient
/// responds.
pub fn play(allocator: &PlayerSpec, recipient: &PlayerSpec, cfg: &GameConfig) -> Outcome {
    let (proposal, _) = best_split(allocator, cfg);
    play_proposal(allocator, recipient, cfg, proposal)
}

/// Resolves a fixed proposal (allocator's own share).
pub fn play_proposal(
    allocator: &PlayerSpec,
    recipient: &PlayerSpec,
    cfg: &GameConfig,
    proposal: Split,
) -> Outcome {
    let accepted = accepts(recipient, cfg, proposal.partner_share());
    let (payoff_allocator, payoff_recipient) = if accepted {
        (proposal.own_share(), proposal.partner_share())
    } else {
        (0.0, 0.0)
    };
    Outcome {
        proposed_split: proposal,
        accepted,
        payoff_allocator,
        payoff_recipient,
        util_allocator: allocator.utility_of_payoffs(cfg, payoff_allocator, payoff_recipient),
        util_recipient: recipient.utility_of_payoffs(cfg, payoff_recipient, payoff_allocator),
    }
}
