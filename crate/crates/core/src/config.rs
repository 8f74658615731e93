//! Run configuration.
//!
//! The file is sectioned key/value text (TOML syntax) with sections `game`,
//! `agent.allocator`, `agent.recipient`, `payoff`, `sweep` and `output`.
//! Every key is optional; unknown keys are rejected. [`FileConfig`] mirrors
//! the file one-to-one, [`RunConfig`] is the validated result with every
//! default filled in. [`RunConfig::to_file`] turns it back into a complete
//! [`FileConfig`], which is what `--print-config` prints.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameConfig, PlayerSpec, SelfTau, TieBreak, DEFAULT_GRID_STEP, DEFAULT_TOLERANCE};
use crate::identity::{FairnessMode, ModeKind};
use crate::output::Format;
use crate::payoff::{LensFamily, PayoffLens, DEFAULT_LOSS_AVERSION, DEFAULT_STEEPNESS};
use crate::sweep::{Axis, CurveSweep, GameGridSweep, GridParam, MatrixSweep, PlayerParam, Role, TauSweep};

pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_DISTANCE: f64 = 1.0;
pub const DEFAULT_TAU: f64 = 0.5;
pub const DEFAULT_MATRIX_SPLIT_STEP: f64 = 0.05;
pub const DEFAULT_GAMMAS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<AgentSections>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff: Option<PayoffSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accept_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tie_break: Option<TieBreak>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub association_self_tau: Option<SelfTau>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSections {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocator: Option<AgentSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipient: Option<AgentSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fairness_mode: Option<ModeKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<LensFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<Role>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_param: Option<PlayerParam>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve_split_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_split_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis1: Option<GridParam>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis1_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis1_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis1_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis2: Option<GridParam>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis2_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis2_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_axis2_step: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl FileConfig {
    /// Parses config text. `origin` only labels error messages.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|span| line_column(text, span.start))
                .unwrap_or((0, 0));
            Error::Parse {
                path: origin.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values always serialize")
    }

    pub fn game_mut(&mut self) -> &mut GameSection {
        self.game.get_or_insert_with(Default::default)
    }

    pub fn agent_mut(&mut self, role: Role) -> &mut AgentSection {
        let agents = self.agent.get_or_insert_with(Default::default);
        match role {
            Role::Allocator => agents.allocator.get_or_insert_with(Default::default),
            Role::Recipient => agents.recipient.get_or_insert_with(Default::default),
        }
    }

    pub fn payoff_mut(&mut self) -> &mut PayoffSection {
        self.payoff.get_or_insert_with(Default::default)
    }

    pub fn sweep_mut(&mut self) -> &mut SweepSection {
        self.sweep.get_or_insert_with(Default::default)
    }

    pub fn output_mut(&mut self) -> &mut OutputSection {
        self.output.get_or_insert_with(Default::default)
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Validated settings for one player.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSettings {
    pub gamma: f64,
    pub distance: f64,
    pub fairness_mode: ModeKind,
    /// Only read when `fairness_mode` is `agent_tau`.
    pub tau: f64,
}

impl AgentSettings {
    pub fn mode(&self) -> FairnessMode {
        match self.fairness_mode {
            ModeKind::Baseline => FairnessMode::Baseline,
            ModeKind::AgentTau => FairnessMode::AgentBased(self.tau),
            ModeKind::Association => FairnessMode::AssociationBased,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub subject: Role,
    pub curve_param: PlayerParam,
    pub curve_axis: Axis,
    pub curve_split_axis: Axis,
    pub d_axis: Axis,
    pub matrix_split_axis: Axis,
    pub gammas: Vec<f64>,
    pub grid_axis1: (GridParam, Axis),
    pub grid_axis2: (GridParam, Axis),
    raw: SweepSection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub path: PathBuf,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub game: GameConfig,
    pub allocator: AgentSettings,
    pub recipient: AgentSettings,
    pub payoff: PayoffLens,
    pub sweep: SweepSettings,
    pub output: OutputSettings,
}

fn unit_interval(field: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must lie in [0, 1] (got {v})")))
    }
}

fn nonnegative(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be finite and >= 0 (got {v})")))
    }
}

fn resolve_agent(role: Role, section: Option<&AgentSection>) -> Result<AgentSettings> {
    let s = section.cloned().unwrap_or_default();
    let key = |k: &str| format!("agent.{role}.{k}");
    Ok(AgentSettings {
        gamma: unit_interval(&key("gamma"), s.gamma.unwrap_or(DEFAULT_GAMMA))?,
        distance: nonnegative(&key("distance"), s.distance.unwrap_or(DEFAULT_DISTANCE))?,
        fairness_mode: s.fairness_mode.unwrap_or(ModeKind::Baseline),
        tau: unit_interval(&key("tau"), s.tau.unwrap_or(DEFAULT_TAU))?,
    })
}

fn param_axis_defaults(param: PlayerParam) -> (f64, f64, f64) {
    match param {
        PlayerParam::Distance => (0.0, 2.4, 0.2),
        PlayerParam::Gamma => (0.2, 0.8, 0.2),
        PlayerParam::Tau => (0.1, 0.9, 0.2),
    }
}

fn axis(field: &str, name: &str, min: f64, max: f64, step: f64) -> Result<Axis> {
    Axis::new(name, min, max, step).map_err(|e| match e {
        Error::Axis { reason, .. } => Error::config(field, reason),
        other => other,
    })
}

fn resolve_sweep(s: Option<&SweepSection>, grid_step: f64) -> Result<SweepSettings> {
    let s = s.cloned().unwrap_or_default();
    let curve_param = s.curve_param.unwrap_or(PlayerParam::Distance);
    let (cmin, cmax, cstep) = param_axis_defaults(curve_param);
    let g1 = s.grid_axis1.unwrap_or(GridParam {
        role: Role::Allocator,
        param: PlayerParam::Gamma,
    });
    let g2 = s.grid_axis2.unwrap_or(GridParam {
        role: Role::Recipient,
        param: PlayerParam::Gamma,
    });
    if g1 == g2 {
        return Err(Error::config("sweep.grid_axis2", format!("must differ from sweep.grid_axis1 (both `{g1}`)")));
    }
    let (a1min, a1max, a1step) = param_axis_defaults(g1.param);
    let (a2min, a2max, a2step) = param_axis_defaults(g2.param);
    let gammas = s.gammas.clone().unwrap_or_else(|| DEFAULT_GAMMAS.to_vec());
    if gammas.is_empty() {
        return Err(Error::config("sweep.gammas", "must not be empty"));
    }
    for g in &gammas {
        unit_interval("sweep.gammas", *g)?;
    }
    let d_min = nonnegative("sweep.d_min", s.d_min.unwrap_or(0.0))?;
    let resolved = SweepSection {
        subject: Some(s.subject.unwrap_or(Role::Recipient)),
        curve_param: Some(curve_param),
        curve_min: Some(s.curve_min.unwrap_or(cmin)),
        curve_max: Some(s.curve_max.unwrap_or(cmax)),
        curve_step: Some(s.curve_step.unwrap_or(cstep)),
        curve_split_step: Some(s.curve_split_step.unwrap_or(grid_step)),
        d_min: Some(d_min),
        d_max: Some(s.d_max.unwrap_or(2.4)),
        d_step: Some(s.d_step.unwrap_or(0.2)),
        matrix_split_step: Some(s.matrix_split_step.unwrap_or(DEFAULT_MATRIX_SPLIT_STEP)),
        gammas: Some(gammas.clone()),
        grid_axis1: Some(g1),
        grid_axis1_min: Some(s.grid_axis1_min.unwrap_or(a1min)),
        grid_axis1_max: Some(s.grid_axis1_max.unwrap_or(a1max)),
        grid_axis1_step: Some(s.grid_axis1_step.unwrap_or(a1step)),
        grid_axis2: Some(g2),
        grid_axis2_min: Some(s.grid_axis2_min.unwrap_or(a2min)),
        grid_axis2_max: Some(s.grid_axis2_max.unwrap_or(a2max)),
        grid_axis2_step: Some(s.grid_axis2_step.unwrap_or(a2step)),
    };
    let r = &resolved;
    let split_axis = |field: &str, step: f64| axis(field, "split", 0.0, 1.0, step);
    Ok(SweepSettings {
        subject: r.subject.unwrap(),
        curve_param,
        curve_axis: axis(
            "sweep.curve",
            &curve_param.to_string(),
            r.curve_min.unwrap(),
            r.curve_max.unwrap(),
            r.curve_step.unwrap(),
        )?,
        curve_split_axis: split_axis("sweep.curve_split_step", r.curve_split_step.unwrap())?,
        d_axis: axis("sweep.d", "d", d_min, r.d_max.unwrap(), r.d_step.unwrap())?,
        matrix_split_axis: split_axis("sweep.matrix_split_step", r.matrix_split_step.unwrap())?,
        gammas,
        grid_axis1: (
            g1,
            axis(
                "sweep.grid_axis1",
                &g1.to_string(),
                r.grid_axis1_min.unwrap(),
                r.grid_axis1_max.unwrap(),
                r.grid_axis1_step.unwrap(),
            )?,
        ),
        grid_axis2: (
            g2,
            axis(
                "sweep.grid_axis2",
                &g2.to_string(),
                r.grid_axis2_min.unwrap(),
                r.grid_axis2_max.unwrap(),
                r.grid_axis2_step.unwrap(),
            )?,
        ),
        raw: resolved,
    })
}

impl RunConfig {
    /// Validates `file` and applies every default.
    pub fn resolve(file: &FileConfig) -> Result<Self> {
        let g = file.game.clone().unwrap_or_default();
        let mut game = GameConfig::new(
            g.grid_step.unwrap_or(DEFAULT_GRID_STEP),
            g.tolerance.unwrap_or(DEFAULT_TOLERANCE),
        )?;
        let threshold = g.accept_threshold.unwrap_or(0.0);
        if !threshold.is_finite() {
            return Err(Error::config("game.accept_threshold", "must be finite"));
        }
        game.accept_threshold = threshold;
        game.tie_break = g.tie_break.unwrap_or_default();
        game.association_self_tau = g.association_self_tau.unwrap_or_default();

        let agents = file.agent.clone().unwrap_or_default();
        let allocator = resolve_agent(Role::Allocator, agents.allocator.as_ref())?;
        let recipient = resolve_agent(Role::Recipient, agents.recipient.as_ref())?;

        let p = file.payoff.clone().unwrap_or_default();
        let payoff = PayoffLens::new(
            p.family.unwrap_or(LensFamily::ExpValue),
            p.k.unwrap_or(DEFAULT_STEEPNESS),
            p.lambda.unwrap_or(DEFAULT_LOSS_AVERSION),
        )?;
        let sweep = resolve_sweep(file.sweep.as_ref(), game.grid_step())?;
        let o = file.output.clone().unwrap_or_default();
        let output = OutputSettings {
            path: o.path.unwrap_or_else(|| PathBuf::from("-")),
            format: o.format.unwrap_or_default(),
        };
        Ok(RunConfig {
            game,
            allocator,
            recipient,
            payoff,
            sweep,
            output,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::resolve(&FileConfig::read(path)?)
    }

    /// Complete config with every key present.
    pub fn to_file(&self) -> FileConfig {
        let agent = |a: &AgentSettings| AgentSection {
            gamma: Some(a.gamma),
            distance: Some(a.distance),
            fairness_mode: Some(a.fairness_mode),
            tau: Some(a.tau),
        };
        FileConfig {
            game: Some(GameSection {
                grid_step: Some(self.game.grid_step()),
                accept_threshold: Some(self.game.accept_threshold),
                tie_break: Some(self.game.tie_break),
                tolerance: Some(self.game.tolerance()),
                association_self_tau: Some(self.game.association_self_tau),
            }),
            agent: Some(AgentSections {
                allocator: Some(agent(&self.allocator)),
                recipient: Some(agent(&self.recipient)),
            }),
            payoff: Some(PayoffSection {
                family: Some(self.payoff.family()),
                k: Some(self.payoff.steepness()),
                lambda: Some(self.payoff.loss_aversion()),
            }),
            sweep: Some(self.sweep.raw.clone()),
            output: Some(OutputSection {
                path: Some(self.output.path.clone()),
                format: Some(self.output.format),
            }),
        }
    }

    fn player(&self, a: &AgentSettings) -> PlayerSpec {
        PlayerSpec::new(a.gamma, a.distance, a.mode(), self.payoff).expect("validated at load time")
    }

    pub fn allocator_spec(&self) -> PlayerSpec {
        self.player(&self.allocator)
    }

    pub fn recipient_spec(&self) -> PlayerSpec {
        self.player(&self.recipient)
    }

    pub fn subject_spec(&self) -> PlayerSpec {
        match self.sweep.subject {
            Role::Allocator => self.allocator_spec(),
            Role::Recipient => self.recipient_spec(),
        }
    }

    pub fn curve_sweep(&self) -> CurveSweep {
        CurveSweep {
            subject: self.subject_spec(),
            cfg: self.game,
            param: self.sweep.curve_param,
            param_axis: self.sweep.curve_axis.clone(),
            split_axis: self.sweep.curve_split_axis.clone(),
        }
    }

    pub fn matrix_sweep(&self) -> MatrixSweep {
        MatrixSweep {
            subject: self.subject_spec(),
            cfg: self.game,
            d_axis: self.sweep.d_axis.clone(),
            split_axis: self.sweep.matrix_split_axis.clone(),
        }
    }

    pub fn tau_sweep(&self) -> TauSweep {
        TauSweep {
            gammas: self.sweep.gammas.clone(),
            d_axis: self.sweep.d_axis.clone(),
        }
    }

    pub fn game_grid_sweep(&self) -> GameGridSweep {
        GameGridSweep {
            allocator: self.allocator_spec(),
            recipient: self.recipient_spec(),
            cfg: self.game,
            axis1: self.sweep.grid_axis1.clone(),
            axis2: self.sweep.grid_axis2.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::resolve(&FileConfig::parse(text, Path::new("test.toml"))?)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg.game.grid_step(), 0.01);
        assert_eq!(cfg.game.tolerance(), 1e-9);
        assert_eq!(cfg.game.accept_threshold, 0.0);
        assert_eq!(cfg.game.tie_break, TieBreak::ClosestToEqual);
        assert_eq!(cfg.allocator.fairness_mode, ModeKind::Baseline);
        assert_eq!(cfg.payoff, PayoffLens::default());
        assert_eq!(cfg.sweep.subject, Role::Recipient);
        assert_eq!(cfg.sweep.curve_split_axis.values().len(), 101);
        assert_eq!(cfg.output.format, Format::Auto);
    }

    #[test]
    fn sections_are_read() {
        let cfg = parse(
            r#"
[game]
grid_step = 0.05
tie_break = "lowest_own_share"

[agent.recipient]
gamma = 0.8
distance = 2.0
fairness_mode = "agent_tau"
tau = 0.3

[payoff]
family = "linear"
"#,
        )
        .unwrap();
        assert_eq!(cfg.game.grid().len(), 21);
        assert_eq!(cfg.game.tie_break, TieBreak::LowestOwnShare);
        assert_eq!(cfg.recipient.mode(), FairnessMode::AgentBased(0.3));
        assert_eq!(cfg.recipient.distance, 2.0);
        assert_eq!(cfg.allocator.gamma, DEFAULT_GAMMA);
        assert_eq!(cfg.payoff.family(), LensFamily::Linear);
    }

    #[test]
    fn invalid_values_name_the_field() {
        let msg = |t: &str| parse(t).unwrap_err().to_string();
        assert_eq!(msg("[payoff]\nlambda = 0.5"), "payoff.lambda must be > 1");
        assert!(msg("[agent.allocator]\ngamma = 1.2").starts_with("agent.allocator.gamma must lie in [0, 1]"));
        assert!(msg("[agent.recipient]\ndistance = -1").starts_with("agent.recipient.distance"));
        assert!(msg("[game]\ngrid_step = 0.03").starts_with("game.grid_step"));
        assert!(msg("[sweep]\ngammas = []").starts_with("sweep.gammas"));
        assert!(msg("[sweep]\ngrid_axis2 = \"allocator.gamma\"").starts_with("sweep.grid_axis2"));
        assert!(msg("[sweep]\nd_max = 1.0\nd_step = 0.3").starts_with("sweep.d"));
    }

    #[test]
    fn unknown_key_reports_position() {
        let err = parse("[game]\ngrid_step = 0.1\ngird = 3\n").unwrap_err();
        match &err {
            Error::Parse { line, .. } => assert_eq!(*line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_file_is_config_error() {
        let err = RunConfig::load(Path::new("/nonexistent/transcend.toml")).unwrap_err();
        assert!(matches!(err, Error::ConfigRead { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn printed_config_round_trips() {
        for text in [
            "",
            "[payoff]\nfamily = \"linear\"",
            "[sweep]\ncurve_param = \"tau\"\n[agent.recipient]\nfairness_mode = \"agent_tau\"",
            "[game]\ngrid_step = 0.1\nassociation_self_tau = \"zero\"\n[output]\nformat = \"json\"",
        ] {
            let cfg = parse(text).unwrap();
            let dumped = cfg.to_file().to_toml();
            let again = parse(&dumped).unwrap();
            assert_eq!(cfg, again, "{dumped}");
            assert_eq!(again.to_file().to_toml(), dumped);
        }
    }
}
