//! Run configuration: defaults, then a `key = value` file, then flags.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use sigchange::atlas::{ManifoldSpec, Topology};
use sigchange::causal::{CausalKind, CurveMix};
use sigchange::geometry::DEFAULT_TOL_DEG;
use sigchange::prescription::{TOL_GRAD, TOL_TANGENT};
use sigchange::{MetricSpec, ScalarField, TangentVector, ChartPoint, VectorField, Window};

/// Default norm drift that ends a geodesic trace. Large enough to let a
/// trace run into a degeneracy locus, small enough to stop at the unresolved
/// step where the rotating metric's geodesics blow up.
pub const GEODESIC_NORM_GUARD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Flat,
    Rotating,
    Crosscap,
    Transformed,
}

impl Model {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "flat" => Model::Flat,
            "rotating" => Model::Rotating,
            "crosscap" => Model::Crosscap,
            "transformed" => Model::Transformed,
            _ => bail!("unknown model `{s}` (expected flat, rotating, crosscap or transformed)"),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    /// Base metric of a transformed model.
    pub base: Model,
    pub angle_rate: f64,
    pub f: String,
    pub v: Option<String>,
    pub topology: Topology,
    pub window: Option<Window>,
    pub grid_n: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seams_out: Option<PathBuf>,
    pub tol_deg: f64,
    pub tol_tangent: f64,
    pub tol_grad: f64,
    pub dlambda: f64,
    pub lambda_max: f64,
    /// Geodesics stop once the norm of the velocity drifts this far.
    pub norm_guard: Option<f64>,
    /// `t, x, vt, vx`
    pub init: [f64; 4],
    pub stripe: i64,
    pub curves: usize,
    pub kind: CausalKind,
    pub mix: CurveMix,
    pub order: Option<u8>,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::Rotating,
            base: Model::Rotating,
            angle_rate: PI,
            f: "t^2 + x^2".into(),
            v: None,
            topology: Topology::Plane,
            window: None,
            grid_n: None,
            seed: 0,
            out: None,
            svg: None,
            seams_out: None,
            tol_deg: DEFAULT_TOL_DEG,
            tol_tangent: TOL_TANGENT,
            tol_grad: TOL_GRAD,
            dlambda: 1e-3,
            lambda_max: 10.0,
            norm_guard: Some(GEODESIC_NORM_GUARD),
            init: [0.0, 0.0, 1.0, 0.0],
            stripe: 0,
            curves: 200,
            kind: CausalKind::Timelike,
            mix: CurveMix::Both,
            order: None,
            samples: 101,
        }
    }
}

fn floats(value: &str, n: usize, what: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("{what}: expected {n} comma-separated numbers, got `{value}`"))?;
    if parts.len() != n {
        bail!("{what}: expected {n} comma-separated numbers, got `{value}`");
    }
    Ok(parts)
}

fn positive(value: &str, key: &str) -> Result<f64> {
    let v: f64 = value.trim().parse().with_context(|| format!("{key}: not a number: `{value}`"))?;
    if !(v > 0.0) || !v.is_finite() {
        bail!("{key} must be positive, got {v}");
    }
    Ok(v)
}

impl RunConfig {
    /// Applies one setting. Keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "model" => self.model = Model::parse(v)?,
            "base" => self.base = Model::parse(v)?,
            "angle-rate" => self.angle_rate = v.parse().with_context(|| format!("angle-rate: `{v}`"))?,
            "f" => {
                ScalarField::parse(v).with_context(|| format!("f: `{v}`"))?;
                self.f = v.to_string();
            }
            "V" => {
                VectorField::parse(v).with_context(|| format!("V: `{v}`"))?;
                self.v = Some(v.to_string());
            }
            "topology" => self.topology = v.parse().map_err(|e| anyhow!("topology: {e}"))?,
            "window" => {
                let w = floats(v, 4, "window")?;
                self.window = Some(Window::new(w[0], w[1], w[2], w[3])?);
            }
            "grid" => {
                let n: usize = v.parse().with_context(|| format!("grid: `{v}`"))?;
                if n < 8 {
                    bail!("grid must be at least 8, got {n}");
                }
                self.grid_n = Some(n);
            }
            "seed" => self.seed = v.parse().with_context(|| format!("seed: `{v}`"))?,
            "out" => self.out = Some(PathBuf::from(v)),
            "svg" => self.svg = Some(PathBuf::from(v)),
            "seams" => self.seams_out = Some(PathBuf::from(v)),
            "tol-deg" => self.tol_deg = positive(v, key)?,
            "tol-tangent" => self.tol_tangent = positive(v, key)?,
            "tol-grad" => self.tol_grad = positive(v, key)?,
            "dlambda" => self.dlambda = positive(v, key)?,
            "lambda-max" => self.lambda_max = positive(v, key)?,
            "norm-guard" => self.norm_guard = if v == "off" { None } else { Some(positive(v, key)?) },
            "init" => {
                let w = floats(v, 4, "init")?;
                self.init = [w[0], w[1], w[2], w[3]];
            }
            "stripe" => self.stripe = v.parse().with_context(|| format!("stripe: `{v}`"))?,
            "curves" => {
                let n: usize = v.parse().with_context(|| format!("curves: `{v}`"))?;
                if n == 0 {
                    bail!("curves must be at least 1");
                }
                self.curves = n;
            }
            "kind" => {
                self.kind = match v {
                    "timelike" => CausalKind::Timelike,
                    "null" => CausalKind::Null,
                    "spacelike" => CausalKind::Spacelike,
                    _ => bail!("kind: expected timelike, null or spacelike, got `{v}`"),
                }
            }
            "mix" => {
                self.mix = match v {
                    "geodesics" => CurveMix::Geodesics,
                    "polylines" => CurveMix::Polylines,
                    "both" => CurveMix::Both,
                    _ => bail!("mix: expected geodesics, polylines or both, got `{v}`"),
                }
            }
            "order" => {
                self.order = Some(match v {
                    "0" => 0,
                    "1" => 1,
                    _ => bail!("order must be 0 or 1, got `{v}`"),
                })
            }
            "samples" => {
                let n: usize = v.parse().with_context(|| format!("samples: `{v}`"))?;
                if n < 2 {
                    bail!("samples must be at least 2");
                }
                self.samples = n;
            }
            _ => bail!("unknown configuration key `{key}`"),
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}:{}: expected key = value", path.display(), lineno + 1))?;
            self.set(k.trim(), v)
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    fn base_metric(&self, m: Model) -> Result<MetricSpec> {
        Ok(match m {
            Model::Flat => MetricSpec::FlatMinkowski,
            Model::Rotating => MetricSpec::RotatingMinkowski {
                angle_rate: self.angle_rate,
            },
            Model::Crosscap => MetricSpec::CrosscapQuadratic,
            Model::Transformed => bail!("the base of a transformed model cannot itself be transformed"),
        })
    }

    /// Time-orientation / transformation field: `--V`, else a default fitted to the base.
    pub fn vector_field(&self) -> Result<VectorField> {
        if let Some(v) = &self.v {
            return Ok(VectorField::parse(v)?);
        }
        let base = if self.model == Model::Transformed { self.base } else { self.model };
        Ok(match base {
            Model::Rotating => VectorField::rotating_unit_timelike(),
            _ => VectorField::coordinate_time(),
        })
    }

    pub fn scalar_field(&self) -> Result<ScalarField> {
        Ok(ScalarField::parse(&self.f)?)
    }

    pub fn metric(&self) -> Result<MetricSpec> {
        match self.model {
            Model::Transformed => Ok(MetricSpec::Transformed {
                base: Box::new(self.base_metric(self.base)?),
                f: self.scalar_field()?,
                v: self.vector_field()?,
            }),
            m => self.base_metric(m),
        }
    }

    pub fn manifold(&self) -> ManifoldSpec {
        ManifoldSpec::new(self.topology)
    }

    pub fn window_or(&self, default: Window) -> Window {
        self.window.unwrap_or(default)
    }

    pub fn grid_or(&self, default: usize) -> usize {
        self.grid_n.unwrap_or(default)
    }

    pub fn init_vector(&self) -> TangentVector {
        let [t, x, vt, vx] = self.init;
        TangentVector::new(ChartPoint::new(t, x), vt, vx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let mut c = RunConfig::default();
        assert!(matches!(c.metric().unwrap(), MetricSpec::RotatingMinkowski { .. }));
        c.set("model", "transformed").unwrap();
        c.set("f", "t^2 + 2*x^2").unwrap();
        c.set("window", "-1, 1, -2, 2").unwrap();
        assert!(matches!(c.metric().unwrap(), MetricSpec::Transformed { .. }));
        assert_eq!(c.window.unwrap().x_min, -2.0);
        assert!(c.set("grid", "4").is_err());
        assert!(c.set("window", "1,0,0,1").is_err());
        assert!(c.set("f", "t +").is_err());
        assert!(c.set("tol-deg", "0").is_err());
        assert!(c.set("nonsense", "1").is_err());
        c.set("norm-guard", "off").unwrap();
        assert_eq!(c.norm_guard, None);
    }

    #[test]
    fn config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "# comment\nmodel = crosscap\n\ngrid=64 # inline\nseed = 9\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!((c.model, c.grid_n, c.seed), (Model::Crosscap, Some(64), 9));
        fs::write(&path, "model crosscap\n").unwrap();
        let err = RunConfig::default().apply_file(&path).unwrap_err();
        assert!(format!("{err:#}").contains(":1"));
    }
}
