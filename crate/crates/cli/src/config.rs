use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use geocatch::geometry::{Point2, Scene, DEFAULT_OUTER_RADIUS};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// `x,y` on the command line, `[x, y]` in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct Pt(pub f64, pub f64);

impl FromStr for Pt {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
        Ok(Pt(parse(x)?, parse(y)?))
    }
}

impl From<Pt> for Point2 {
    fn from(p: Pt) -> Point2 {
        Point2::new(p.0, p.1)
    }
}

/// Flags shared by every subcommand. Every one of them may also be set in the
/// `--config` file under the same name (`T` as `T`, dashes as underscores).
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Scene as inline JSON, a JSON file, or one of torus|rectangle|disk|obstacle.
    #[arg(long)]
    pub scene: Option<String>,
    /// Ball radius.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Ball speed bound.
    #[arg(long)]
    pub v: Option<f64>,
    /// Obstacle radius of the three-disc scene.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Horizon of the traced geodesics.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Horizon of the ball path.
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub grid_pos: Option<usize>,
    /// Grid directions.
    #[arg(long)]
    pub grid_ang: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON file with default values for any flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scene: Option<serde_json::Value>,
    pub eps: Option<f64>,
    pub v: Option<f64>,
    pub r0: Option<f64>,
    pub horizon: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub grid_pos: Option<usize>,
    pub grid_ang: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub start: Option<Pt>,
    pub angle: Option<f64>,
    pub word: Option<String>,
    pub max_bounces: Option<usize>,
    pub ball: Option<String>,
    pub path: Option<PathBuf>,
    pub center: Option<Pt>,
    pub radius: Option<f64>,
    pub alpha: Option<f64>,
    pub theta0: Option<f64>,
    pub n: Option<usize>,
    pub reach: Option<f64>,
    pub evader: Option<bool>,
}

/// Flag value, else config-file value, else default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Flags merged with the config file.
pub struct Resolved {
    pub common: Common,
    pub file: FileConfig,
    pub scene: Scene,
}

impl Resolved {
    pub fn new(common: Common, default_scene: Scene) -> Result<Resolved, Failure> {
        let file = match &common.config {
            Some(p) => {
                let text = read(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Failure::invalid(format!("config {}: {e}", p.display())))?
            }
            None => FileConfig::default(),
        };
        let scene = match (&common.scene, &file.scene) {
            (Some(s), _) => parse_scene(s)?,
            (None, Some(serde_json::Value::String(s))) => parse_scene(s)?,
            (None, Some(v)) => serde_json::from_value(v.clone()).map_err(|e| Failure::invalid(format!("scene: {e}")))?,
            (None, None) => default_scene,
        };
        let scene = match (common.r0.or(file.r0), scene) {
            (None, s) => s,
            (Some(r0), Scene::Obstacle(o)) => Scene::obstacle(r0, o.outer_radius)?,
            (Some(_), _) => return Err(Failure::invalid("--r0 applies only to the obstacle scene")),
        };
        Ok(Resolved { common, file, scene })
    }

    pub fn eps(&self, default: f64) -> f64 {
        pick(self.common.eps, self.file.eps, default)
    }

    pub fn v(&self, default: f64) -> f64 {
        pick(self.common.v, self.file.v, default)
    }

    pub fn horizon(&self, default: f64) -> f64 {
        pick(self.common.horizon, self.file.horizon, default)
    }

    pub fn t(&self, default: f64) -> f64 {
        pick(self.common.t, self.file.t, default)
    }

    pub fn grid_pos(&self, default: usize) -> usize {
        pick(self.common.grid_pos, self.file.grid_pos, default)
    }

    pub fn grid_ang(&self, default: usize) -> usize {
        pick(self.common.grid_ang, self.file.grid_ang, default)
    }

    pub fn seed(&self) -> u64 {
        pick(self.common.seed, self.file.seed, 0)
    }

    pub fn out(&self) -> PathBuf {
        pick(self.common.out.clone(), self.file.out.clone(), PathBuf::from("out"))
    }
}

pub fn read(p: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(p).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))
}

/// Inline JSON, a named default scene, or a path to a JSON file.
pub fn parse_scene(s: &str) -> Result<Scene, Failure> {
    let text = match s.trim() {
        "torus" => return Ok(Scene::torus(1.0)?),
        "rectangle" => return Ok(Scene::rectangle(2.0, 1.0)?),
        "disk" => return Ok(Scene::disk(1.0)?),
        "obstacle" => return Ok(Scene::obstacle(geocatch::geometry::DEFAULT_R0, DEFAULT_OUTER_RADIUS)?),
        t if t.starts_with('{') => t.to_string(),
        t => read(Path::new(t))?,
    };
    serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("scene: {e}")))
}

/// Rejects non-positive and non-finite values.
pub fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::invalid(format!("{name} must be positive, got {x}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub config: C,
    pub result: R,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!("0.5, -1".parse::<Pt>().unwrap(), Pt(0.5, -1.0));
        assert!("0.5".parse::<Pt>().is_err());
    }

    #[test]
    fn flag_beats_file_beats_default() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None::<i32>, None, 3), 3);
    }

    #[test]
    fn scenes_parse() {
        assert_eq!(parse_scene("torus").unwrap(), Scene::torus(1.0).unwrap());
        let s = parse_scene(r#"{"kind":"obstacle","r0":0.1,"outer_radius":2}"#).unwrap();
        assert_eq!(s.as_obstacle().unwrap().r0, 0.1);
        assert!(parse_scene(r#"{"kind":"disk","radius":-1}"#).is_err());
    }
}
