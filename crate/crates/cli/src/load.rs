use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use roebench::double::DoubleMetric;
use roebench::inverse::{MulTable, PartialBijection};
use roebench::metric::{CoarseConfig, MetricTower};
use roebench::roe::{BandOperator, SupportMask};
use roebench::schema::{self, BaseRef, DoubleSpec, MaskSpec, OperatorSpec, PbSpec, SpaceSpec, TableSpec};
use roebench::Dist;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Settings shared by every command and embedded in every report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    /// Level parameters for generator spaces, overriding the input files.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u32>>,
    /// Trailing levels over which distortion profiles must be stable.
    #[arg(long, global = true, default_value_t = 3)]
    pub window: usize,
    /// Value a witness family must grow past.
    #[arg(long = "growth-threshold", global = true, default_value = "16")]
    pub growth_threshold: Dist,
}

impl Default for Config {
    fn default() -> Self {
        let c = CoarseConfig::default();
        Config { levels: None, window: c.window, growth_threshold: c.growth_threshold }
    }
}

impl Config {
    pub fn coarse(&self) -> Result<CoarseConfig> {
        if self.window == 0 {
            bail!("--window must be positive");
        }
        if !self.growth_threshold.is_positive() {
            bail!("--growth-threshold must be positive");
        }
        Ok(CoarseConfig { window: self.window, growth_threshold: self.growth_threshold })
    }

    /// `levels` when given, `default` otherwise.
    pub fn levels_or(&self, default: &[u32]) -> Vec<u32> {
        self.levels.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Space,
    Double,
    Pb,
    Table,
    Mask,
    Operator,
}

impl Kind {
    /// Guesses the kind of a document from its top-level keys.
    pub fn detect(v: &Value) -> Option<Kind> {
        let obj = v.as_object()?;
        let has = |k: &str| obj.contains_key(k);
        Some(if has("cross") {
            Kind::Double
        } else if has("generator") || has("matrix") {
            Kind::Space
        } else if has("elements") {
            Kind::Table
        } else if has("entries") {
            Kind::Operator
        } else if has("n") {
            Kind::Pb
        } else if has("pairs") {
            Kind::Mask
        } else {
            return None;
        })
    }
}

/// Reads inputs relative to a directory and applies the level override.
pub struct Loader<'a> {
    dir: PathBuf,
    config: &'a Config,
}

impl<'a> Loader<'a> {
    pub fn new(dir: impl Into<PathBuf>, config: &'a Config) -> Loader<'a> {
        Loader { dir: dir.into(), config }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    pub fn read(&self, p: &Path) -> Result<String> {
        let path = self.resolve(p);
        fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
    }

    fn parse<T: serde::de::DeserializeOwned>(&self, p: &Path, text: &str) -> Result<T> {
        schema::parse(text).map_err(|e| anyhow!("{}: {e}", p.display()))
    }

    pub fn kind(&self, p: &Path, forced: Option<Kind>) -> Result<Kind> {
        if let Some(k) = forced {
            return Ok(k);
        }
        let v: Value = self.parse(p, &self.read(p)?)?;
        Kind::detect(&v)
            .ok_or_else(|| anyhow!("{}: cannot tell what this document describes; pass --kind", p.display()))
    }

    fn space_spec(&self, p: &Path, text: &str) -> Result<SpaceSpec> {
        let spec: SpaceSpec = self.parse(p, text)?;
        Ok(match &self.config.levels {
            Some(l) => spec.with_levels(l.clone()),
            None => spec,
        })
    }

    pub fn space(&self, p: &Path) -> Result<Arc<MetricTower>> {
        let spec = self.space_spec(p, &self.read(p)?)?;
        let tower = spec.build().map_err(|e| anyhow!("{}: {e}", p.display()))?;
        Ok(Arc::new(tower))
    }

    pub fn double(&self, p: &Path) -> Result<DoubleMetric> {
        let mut spec: DoubleSpec = self.parse(p, &self.read(p)?)?;
        if let (BaseRef::Inline(s), Some(l)) = (&spec.base, &self.config.levels) {
            spec.base = BaseRef::Inline(s.clone().with_levels(l.clone()));
        }
        let here = self.resolve(p);
        let dir = here.parent().map(Path::to_path_buf).unwrap_or_default();
        let resolve = |rel: &str| -> roebench::Result<SpaceSpec> {
            let path = Path::new(rel);
            let path = if path.is_absolute() { path.to_path_buf() } else { dir.join(path) };
            let text = fs::read_to_string(&path).map_err(|e| roebench::Error::Schema {
                pointer: "/base".into(),
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            let spec: SpaceSpec = schema::parse(&text).map_err(|e| match e {
                roebench::Error::Schema { pointer, message } => {
                    roebench::Error::Schema { pointer, message: format!("{message} (in {})", path.display()) }
                }
                other => other,
            })?;
            Ok(match &self.config.levels {
                Some(l) => spec.with_levels(l.clone()),
                None => spec,
            })
        };
        spec.build(&resolve).map_err(|e| anyhow!("{}: {e}", p.display()))
    }

    /// Several doubles that must share one base.
    pub fn doubles(&self, ps: &[PathBuf]) -> Result<Vec<DoubleMetric>> {
        let ds = ps.iter().map(|p| self.double(p)).collect::<Result<Vec<_>>>()?;
        if let Some(first) = ds.first() {
            for (p, d) in ps.iter().zip(&ds) {
                if **d.base() != **first.base() {
                    bail!("{}: base differs from that of {}", p.display(), ps[0].display());
                }
            }
        }
        Ok(ds)
    }

    pub fn pb(&self, p: &Path) -> Result<PartialBijection> {
        let spec: PbSpec = self.parse(p, &self.read(p)?)?;
        spec.build().map_err(|e| anyhow!("{}: {e}", p.display()))
    }

    pub fn table(&self, p: &Path) -> Result<MulTable> {
        let spec: TableSpec = self.parse(p, &self.read(p)?)?;
        spec.build().map_err(|e| anyhow!("{}: {e}", p.display()))
    }

    pub fn mask(&self, p: &Path) -> Result<SupportMask> {
        let spec: MaskSpec = self.parse(p, &self.read(p)?)?;
        spec.build().map_err(|e| anyhow!("{}: {e}", p.display()))
    }

    pub fn operator(&self, p: &Path) -> Result<BandOperator> {
        let spec: OperatorSpec = self.parse(p, &self.read(p)?)?;
        spec.build().map_err(|e| anyhow!("{}: {e}", p.display()))
    }
}
