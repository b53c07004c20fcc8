//! Scenario files and per-kind parameters.
//!
//! ```toml
//! kind = "net"
//! seed = 7
//! format = "csv"
//! out = "out/net"
//!
//! [net]
//! fixture = "walk"
//! snapshot_every = 30
//! loss = 0.1
//! ```
//!
//! Command-line flags override file values; anything left unset takes the
//! documented default.

use super::{CliError, OutputFormat};
use crate::format::read_text;
use crate::net::SyncMode;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Skin,
    Codec,
    Net,
    Soft,
    Rope,
    Knot,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Skin => "skin",
            Kind::Codec => "codec",
            Kind::Net => "net",
            Kind::Soft => "soft",
            Kind::Rope => "rope",
            Kind::Knot => "knot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum NetMode {
    SnapshotOnly,
    SnapshotDelta,
    Gated,
}

impl From<NetMode> for SyncMode {
    fn from(m: NetMode) -> Self {
        match m {
            NetMode::SnapshotOnly => SyncMode::SnapshotOnly,
            NetMode::SnapshotDelta => SyncMode::SnapshotDelta,
            NetMode::Gated => SyncMode::Gated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SoftDrill {
    /// Fall onto the ground, streamed as SOFTBODY messages.
    Drop,
    /// Seeded random displacement, then free recovery.
    Perturb,
    /// Centre handle drives the body to a target.
    Steer,
    /// End slabs pulled apart with tearing.
    Tear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RopeDrill {
    /// Pinned at node 0 under gravity.
    Hang,
    /// Tied to a body particle and pulled by the far end.
    Suture,
    /// One rope forced down through another.
    Cross,
}

/// Declares a parameter set: every field optional, usable both as clap
/// flags and as a scenario-file table.
macro_rules! params {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $field:ident: $ty:ty,)* }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$fm])* #[arg(long)] #[serde(default)] pub $field: Option<$ty>,)*
        }

        impl $name {
            /// Field-wise merge; values set on `self` win.
            pub fn or(self, other: Self) -> Self {
                Self { $($field: self.$field.or(other.$field),)* }
            }
        }
    };
}

params!(SkinParams {
    /// Model directory, model file or built-in name [default: arm].
    model: String,
    /// `identity` (bind pose, no deformation) or `frame:K` of the track [default: identity].
    pose: String,
    /// Track for `frame:K` poses [default: the model argument].
    track: String,
});

params!(CodecParams {
    /// Track directory, track file or built-in name [default: walk].
    track: String,
    /// Model for vertex errors [default: the track's sibling model.toml].
    model: String,
    /// Max skinned-vertex error, model units [default: 1e-3].
    epsilon: f64,
});

params!(NetParams {
    /// Skeletal fixture directory or built-in name [default: walk].
    fixture: String,
    /// Sync mode [default: gated].
    #[arg(value_enum)]
    mode: NetMode,
    /// Sender ticks [default: 600].
    ticks: usize,
    /// Snapshot cadence in ticks [default: 30].
    snapshot_every: usize,
    /// Loss probability per message [default: 0].
    loss: f64,
    /// One-way latency [default: 40].
    latency_ms: f64,
    /// Uniform jitter half-width [default: 10].
    jitter_ms: f64,
    /// Bone change that marks it dirty in snapshot_delta mode [default: 1e-4].
    delta_threshold: f64,
    /// Keyframe gate for gated mode, model units [default: 2e-3].
    gate_epsilon: f64,
    /// Jitter-buffer delay [default: two snapshot intervals].
    delay_ms: f64,
});

params!(SoftParams {
    /// Procedure [default: drop].
    #[arg(value_enum)]
    drill: SoftDrill,
    /// Body file or built-in name [default: jello, bar for tear].
    body: String,
    /// Steps [default: 240].
    steps: usize,
    /// Time step in seconds [default: 1/60].
    dt: f64,
    /// SOFTBODY residual threshold for drop, model units [default: 1e-2].
    threshold: f64,
    /// Perturbation half-width [default: 0.1].
    amplitude: f64,
    /// Centre target for steer, `x,y,z` [default: 1,0.5,0].
    #[arg(value_delimiter = ',', num_args = 3)]
    target: Vec<f64>,
    /// Servo strength for steer, 1/s [default: 10].
    strength: f64,
    /// Tear strain threshold [default: 1.5].
    tear_threshold: f64,
    /// Grab target distance for tear [default: 1].
    pull: f64,
});

params!(RopeParams {
    /// Procedure [default: hang].
    #[arg(value_enum)]
    drill: RopeDrill,
    /// Rope file or built-in name [default: hanging, crossing_a for cross].
    rope: String,
    /// Lower rope for cross [default: crossing_b].
    other: String,
    /// Body for suture [default: jello].
    body: String,
    /// Body particle tied in suture [default: 0].
    particle: usize,
    /// Attachment compliance [default: 0].
    compliance: f64,
    /// How far the suture rope's free end is pulled [default: 0.3].
    distance: f64,
    /// How far the upper rope is pushed down in cross [default: 0.05].
    depth: f64,
    /// Steps [default: 600 for hang, 240 otherwise].
    steps: usize,
    /// Time step in seconds [default: 1/120].
    dt: f64,
});

params!(KnotParams {
    /// Knot rope file or built-in name [default: trefoil].
    rope: String,
    /// Steps [default: 1000].
    steps: usize,
    /// Time step in seconds [default: 1/120].
    dt: f64,
    /// End pull speed [default: 0.1].
    speed: f64,
    /// Pull duration before holding, seconds [default: 5].
    ramp_s: f64,
});

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub kind: Kind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub skin: Option<SkinParams>,
    #[serde(default)]
    pub codec: Option<CodecParams>,
    #[serde(default)]
    pub net: Option<NetParams>,
    #[serde(default)]
    pub soft: Option<SoftParams>,
    #[serde(default)]
    pub rope: Option<RopeParams>,
    #[serde(default)]
    pub knot: Option<KnotParams>,
}

/// Parameters of one kind.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Skin(SkinParams),
    Codec(CodecParams),
    Net(NetParams),
    Soft(SoftParams),
    Rope(RopeParams),
    Knot(KnotParams),
}

impl Params {
    pub fn kind(&self) -> Kind {
        match self {
            Params::Skin(_) => Kind::Skin,
            Params::Codec(_) => Kind::Codec,
            Params::Net(_) => Kind::Net,
            Params::Soft(_) => Kind::Soft,
            Params::Rope(_) => Kind::Rope,
            Params::Knot(_) => Kind::Knot,
        }
    }

    pub fn empty(kind: Kind) -> Self {
        match kind {
            Kind::Skin => Params::Skin(Default::default()),
            Kind::Codec => Params::Codec(Default::default()),
            Kind::Net => Params::Net(Default::default()),
            Kind::Soft => Params::Soft(Default::default()),
            Kind::Rope => Params::Rope(Default::default()),
            Kind::Knot => Params::Knot(Default::default()),
        }
    }

    /// Field-wise merge of two parameter sets of the same kind.
    pub fn or(self, other: Params) -> Result<Params, CliError> {
        Ok(match (self, other) {
            (Params::Skin(a), Params::Skin(b)) => Params::Skin(a.or(b)),
            (Params::Codec(a), Params::Codec(b)) => Params::Codec(a.or(b)),
            (Params::Net(a), Params::Net(b)) => Params::Net(a.or(b)),
            (Params::Soft(a), Params::Soft(b)) => Params::Soft(a.or(b)),
            (Params::Rope(a), Params::Rope(b)) => Params::Rope(a.or(b)),
            (Params::Knot(a), Params::Knot(b)) => Params::Knot(a.or(b)),
            (a, b) => {
                return Err(CliError::Config(format!(
                    "scenario is a {} run but {} parameters were given",
                    b.kind().name(),
                    a.kind().name()
                )))
            }
        })
    }
}

/// A fully assembled run request.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: Params,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: PathBuf,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Config(format!("scenario: {e}")))?;
        let present = [
            (Kind::Skin, file.skin.is_some()),
            (Kind::Codec, file.codec.is_some()),
            (Kind::Net, file.net.is_some()),
            (Kind::Soft, file.soft.is_some()),
            (Kind::Rope, file.rope.is_some()),
            (Kind::Knot, file.knot.is_some()),
        ];
        if let Some((k, _)) = present.iter().find(|(k, p)| *p && *k != file.kind) {
            return Err(CliError::Config(format!(
                "scenario kind is {} but it has a [{}] table",
                file.kind.name(),
                k.name()
            )));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_text(path)?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn params(&self) -> Params {
        match self.kind {
            Kind::Skin => Params::Skin(self.skin.clone().unwrap_or_default()),
            Kind::Codec => Params::Codec(self.codec.clone().unwrap_or_default()),
            Kind::Net => Params::Net(self.net.clone().unwrap_or_default()),
            Kind::Soft => Params::Soft(self.soft.clone().unwrap_or_default()),
            Kind::Rope => Params::Rope(self.rope.clone().unwrap_or_default()),
            Kind::Knot => Params::Knot(self.knot.clone().unwrap_or_default()),
        }
    }
}

/// Overrides from the command line, applied over an optional scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub params: Option<Params>,
    pub seed: Option<u64>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

impl Scenario {
    pub fn assemble(file: Option<ScenarioFile>, cli: Overrides) -> Result<Scenario, CliError> {
        let params = match (&cli.params, &file) {
            (Some(p), Some(f)) => p.clone().or(f.params())?,
            (Some(p), None) => p.clone(),
            (None, Some(f)) => f.params(),
            (None, None) => return Err(CliError::Config("give a run kind or --scenario".into())),
        };
        let kind = params.kind();
        let seed = cli.seed.or(file.as_ref().and_then(|f| f.seed)).unwrap_or(0);
        let format = cli.format.or(file.as_ref().and_then(|f| f.format)).unwrap_or_default();
        let out = cli
            .out
            .or(file.as_ref().and_then(|f| f.out.clone()))
            .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
        Ok(Scenario { params, seed, format, out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = ScenarioFile::parse("kind = \"net\"\nseed = 3\n[net]\nloss = 0.2\nticks = 90\n").unwrap();
        let cli = Overrides {
            params: Some(Params::Net(NetParams { loss: Some(0.1), ..Default::default() })),
            seed: None,
            ..Default::default()
        };
        let s = Scenario::assemble(Some(file), cli).unwrap();
        assert_eq!(s.seed, 3);
        assert_eq!(s.out, PathBuf::from("out/net"));
        let Params::Net(p) = s.params else { panic!("net params") };
        assert_eq!((p.loss, p.ticks), (Some(0.1), Some(90)));
    }

    #[test]
    fn rejects_mismatched_tables_and_unknown_fields() {
        assert!(ScenarioFile::parse("kind = \"net\"\n[soft]\nsteps = 3\n").is_err());
        assert!(ScenarioFile::parse("kind = \"net\"\n[net]\nlos = 0.1\n").is_err());
        let file = ScenarioFile::parse("kind = \"net\"\n").unwrap();
        let cli = Overrides { params: Some(Params::empty(Kind::Soft)), ..Default::default() };
        assert!(matches!(Scenario::assemble(Some(file), cli), Err(CliError::Config(_))));
    }
}
