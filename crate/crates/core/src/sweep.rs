//! Parameter sweeps that tabulate utility curves, acceptance matrices,
//! association-threshold curves and settled game states.
//!
//! Cells are evaluated in parallel on the current rayon pool and sorted by
//! their coordinates before being returned, so the result never depends on
//! the thread count.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{accepts, best_among, min_acceptable_among, play, utility_of_split, GameConfig, PlayerSpec};
use crate::identity::{association_tau, FairnessMode};

const AXIS_TOLERANCE: f64 = 1e-9;

/// An evenly spaced, inclusive range of parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    name: String,
    min: f64,
    max: f64,
    step: f64,
    cells: usize,
}

impl Axis {
    /// `min == max` gives a single-point axis.
    pub fn new(name: impl Into<String>, min: f64, max: f64, step: f64) -> Result<Self> {
        let name = name.into();
        let bad = |reason: String| Error::Axis {
            axis: name.clone(),
            reason,
        };
        if !(min.is_finite() && max.is_finite() && step.is_finite()) {
            return Err(bad("bounds and step must be finite".into()));
        }
        if min > max {
            return Err(bad(format!("min {min} exceeds max {max}")));
        }
        if step <= 0.0 {
            return Err(bad(format!("step must be > 0 (got {step})")));
        }
        let span = max - min;
        let n = (span / step).round();
        if (n * step - span).abs() > AXIS_TOLERANCE * span.max(1.0) {
            return Err(bad(format!(
                "step {step} does not divide [{min}, {max}] into whole cells"
            )));
        }
        Ok(Axis {
            name,
            min,
            max,
            step,
            cells: n as usize,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.cells;
        if n == 0 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        (0..=n)
            .map(|i| if i == n { self.max } else { self.min + span * i as f64 / n as f64 })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Allocator,
    Recipient,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Allocator => "allocator",
            Role::Recipient => "recipient",
        })
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "allocator" => Ok(Role::Allocator),
            "recipient" => Ok(Role::Recipient),
            other => Err(format!("must be one of allocator, recipient (got `{other}`)")),
        }
    }
}

/// A per-player parameter that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlayerParam {
    #[serde(rename = "d")]
    Distance,
    Gamma,
    Tau,
}

impl fmt::Display for PlayerParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlayerParam::Distance => "d",
            PlayerParam::Gamma => "gamma",
            PlayerParam::Tau => "tau",
        })
    }
}

impl FromStr for PlayerParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "d" | "distance" => Ok(PlayerParam::Distance),
            "gamma" => Ok(PlayerParam::Gamma),
            "tau" => Ok(PlayerParam::Tau),
            other => Err(format!("must be one of d, gamma, tau (got `{other}`)")),
        }
    }
}

impl PlayerParam {
    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &PlayerSpec, value: f64) -> Result<PlayerSpec> {
        match self {
            PlayerParam::Distance => PlayerSpec::new(base.gamma(), value, base.mode, base.lens),
            PlayerParam::Gamma => PlayerSpec::new(value, base.distance(), base.mode, base.lens),
            PlayerParam::Tau => match base.mode {
                FairnessMode::AgentBased(_) => PlayerSpec::new(
                    base.gamma(),
                    base.distance(),
                    FairnessMode::agent_based(value)?,
                    base.lens,
                ),
                _ => Err(Error::InvalidArgument(
                    "varying tau requires fairness_mode agent_tau".into(),
                )),
            },
        }
    }
}

/// A parameter of one of the two players, e.g. `recipient.gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridParam {
    pub role: Role,
    pub param: PlayerParam,
}

impl fmt::Display for GridParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.role, self.param)
    }
}

impl FromStr for GridParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (role, param) = s
            .split_once('.')
            .ok_or_else(|| format!("expected <role>.<param> (got `{s}`)"))?;
        Ok(GridParam {
            role: role.parse()?,
            param: param.parse()?,
        })
    }
}

impl Serialize for GridParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GridParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKind {
    UtilityCurves,
    AcceptanceMatrix,
    TauCurves,
    GameGrid,
}

/// Utility of one player over a split axis, one curve per value of
/// `param`.
#[derive(Debug, Clone)]
pub struct CurveSweep {
    pub subject: PlayerSpec,
    pub cfg: GameConfig,
    pub param: PlayerParam,
    pub param_axis: Axis,
    pub split_axis: Axis,
}

/// Acceptance of each offered share (columns) at each distance (rows).
#[derive(Debug, Clone)]
pub struct MatrixSweep {
    pub subject: PlayerSpec,
    pub cfg: GameConfig,
    pub d_axis: Axis,
    pub split_axis: Axis,
}

/// `1 - gamma^d` over a distance axis for each gamma.
#[derive(Debug, Clone)]
pub struct TauSweep {
    pub gammas: Vec<f64>,
    pub d_axis: Axis,
}

/// Full games over a two-parameter grid.
#[derive(Debug, Clone)]
pub struct GameGridSweep {
    pub allocator: PlayerSpec,
    pub recipient: PlayerSpec,
    pub cfg: GameConfig,
    pub axis1: (GridParam, Axis),
    pub axis2: (GridParam, Axis),
}

#[derive(Debug, Clone)]
pub enum SweepSpec {
    UtilityCurves(CurveSweep),
    AcceptanceMatrix(MatrixSweep),
    TauCurves(TauSweep),
    GameGrid(GameGridSweep),
}

impl SweepSpec {
    pub fn kind(&self) -> SweepKind {
        match self {
            SweepSpec::UtilityCurves(_) => SweepKind::UtilityCurves,
            SweepSpec::AcceptanceMatrix(_) => SweepKind::AcceptanceMatrix,
            SweepSpec::TauCurves(_) => SweepKind::TauCurves,
            SweepSpec::GameGrid(_) => SweepKind::GameGrid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue {
    Real(f64),
    Flag(bool),
    Game { proposed_split: f64, accepted: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Markers {
    pub is_best_split: bool,
    pub is_min_acceptable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub coordinates: Vec<(String, f64)>,
    pub value: CellValue,
    /// Only set on utility-curve cells.
    pub markers: Option<Markers>,
}

impl SweepCell {
    pub fn coordinate(&self, name: &str) -> Option<f64> {
        self.coordinates
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    pub fn real(&self) -> Option<f64> {
        match self.value {
            CellValue::Real(v) => Some(v),
            _ => None,
        }
    }

    pub fn flag(&self) -> Option<bool> {
        match self.value {
            CellValue::Flag(v) => Some(v),
            _ => None,
        }
    }
}

fn cmp_coordinates(a: &SweepCell, b: &SweepCell) -> Ordering {
    a.coordinates
        .iter()
        .zip(&b.coordinates)
        .map(|((_, x), (_, y))| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn sorted(mut cells: Vec<SweepCell>) -> Vec<SweepCell> {
    cells.sort_by(cmp_coordinates);
    cells
}

/// Pointwise min/max utility over all curves at one split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint {
    pub split: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone)]
pub struct CurveTable {
    pub param: PlayerParam,
    pub cells: Vec<SweepCell>,
    pub envelope: Vec<EnvelopePoint>,
}

pub fn utility_curves(spec: &CurveSweep) -> Result<CurveTable> {
    let splits = spec.split_axis.values();
    let players = spec
        .param_axis
        .values()
        .into_iter()
        .map(|v| Ok((v, spec.param.apply(&spec.subject, v)?)))
        .collect::<Result<Vec<_>>>()?;
    let name = spec.param.to_string();

    let per_curve: Vec<Vec<SweepCell>> = players
        .par_iter()
        .map(|(value, player)| {
            let best = best_among(player, &spec.cfg, &splits).map(|(s, _)| s.own_share());
            let min_ok = min_acceptable_among(player, &spec.cfg, &splits).map(|s| s.own_share());
            splits
                .iter()
                .map(|&s| SweepCell {
                    coordinates: vec![(name.clone(), *value), ("split".to_string(), s)],
                    value: CellValue::Real(utility_of_split(player, &spec.cfg, s)),
                    markers: Some(Markers {
                        is_best_split: best == Some(s),
                        is_min_acceptable: min_ok == Some(s),
                    }),
                })
                .collect()
        })
        .collect();
    let cells = sorted(per_curve.into_iter().flatten().collect());

    let envelope = splits
        .iter()
        .map(|&s| {
            let column = cells
                .iter()
                .filter(|c| c.coordinate("split") == Some(s))
                .filter_map(SweepCell::real);
            let (min, max) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), u| {
                (lo.min(u), hi.max(u))
            });
            EnvelopePoint { split: s, min, max }
        })
        .collect();

    Ok(CurveTable {
        param: spec.param,
        cells,
        envelope,
    })
}

pub fn acceptance_matrix(spec: &MatrixSweep) -> Result<Vec<SweepCell>> {
    let splits = spec.split_axis.values();
    let rows = spec
        .d_axis
        .values()
        .into_iter()
        .map(|d| Ok((d, PlayerParam::Distance.apply(&spec.subject, d)?)))
        .collect::<Result<Vec<_>>>()?;
    let cells = rows
        .par_iter()
        .flat_map_iter(|(d, player)| {
            splits.iter().map(move |&s| SweepCell {
                coordinates: vec![("d".to_string(), *d), ("split".to_string(), s)],
                value: CellValue::Flag(accepts(player, &spec.cfg, s)),
                markers: None,
            })
        })
        .collect();
    Ok(sorted(cells))
}

pub fn tau_curves(spec: &TauSweep) -> Result<Vec<SweepCell>> {
    if let Some(g) = spec.gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::config("sweep.gammas", format!("entries must lie in [0, 1] (got {g})")));
    }
    let ds = spec.d_axis.values();
    let cells = spec
        .gammas
        .par_iter()
        .flat_map_iter(|&g| {
            ds.iter().map(move |&d| SweepCell {
                coordinates: vec![("gamma".to_string(), g), ("d".to_string(), d)],
                value: CellValue::Real(association_tau(g, d)),
                markers: None,
            })
        })
        .collect();
    Ok(sorted(cells))
}

pub fn game_grid(spec: &GameGridSweep) -> Result<Vec<SweepCell>> {
    let (p1, ax1) = &spec.axis1;
    let (p2, ax2) = &spec.axis2;
    if p1 == p2 {
        return Err(Error::Axis {
            axis: p2.to_string(),
            reason: "both grid axes vary the same parameter".into(),
        });
    }
    let mut points = Vec::with_capacity(ax1.len() * ax2.len());
    for v1 in ax1.values() {
        for v2 in ax2.values() {
            let mut allocator = spec.allocator.clone();
            let mut recipient = spec.recipient.clone();
            for (param, value) in [(p1, v1), (p2, v2)] {
                let target = match param.role {
                    Role::Allocator => &mut allocator,
                    Role::Recipient => &mut recipient,
                };
                *target = param.param.apply(target, value)?;
            }
            points.push((v1, v2, allocator, recipient));
        }
    }
    let cells = points
        .par_iter()
        .map(|(v1, v2, allocator, recipient)| {
            let o = play(allocator, recipient, &spec.cfg);
            SweepCell {
                coordinates: vec![("axis1".to_string(), *v1), ("axis2".to_string(), *v2)],
                value: CellValue::Game {
                    proposed_split: o.proposed_split.own_share(),
                    accepted: o.accepted,
                },
                markers: None,
            }
        })
        .collect();
    Ok(sorted(cells))
}
