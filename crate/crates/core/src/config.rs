//! Run configuration: TOML with dotted sections (`optomech.kappa`,
//! `geometry.R_nm`, ...). Every key is optional and falls back to the
//! default parameter set unless `use_defaults = false`, in which case every
//! key must be given.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::axion::{Couplings, Geometry, MaterialSet};
use crate::constraint::{MassGrid, Regime};
use crate::error::{Error, Result};
use crate::metrology::{DetectionMode, NoiseParams};
use crate::optomech::OptomechParams;
use crate::units::{ConstantsMode, PhysConstants};

/// Plate-sphere geometry in SI lengths (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometrySi {
    pub radius: f64,
    pub width: f64,
    pub coating: f64,
    pub separation: f64,
}

impl Default for GeometrySi {
    fn default() -> Self {
        GeometrySi {
            radius: 10e-9,
            width: 100e-6,
            coating: 200e-9,
            separation: 300e-9,
        }
    }
}

impl GeometrySi {
    pub fn to_natural(&self, k: &PhysConstants) -> Result<Geometry> {
        Geometry::from_si(self.radius, self.width, self.coating, self.separation, k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub optomech: OptomechParams,
    pub geometry: GeometrySi,
    pub noise: NoiseParams,
    pub detection: DetectionMode,
    pub couplings: Couplings,
    pub regimes: Vec<Regime>,
    pub mass_grid: MassGrid,
    pub constants_mode: ConstantsMode,
    /// Optional material-table override, resolved against the config file's directory.
    pub materials_file: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            optomech: OptomechParams::nominal(),
            geometry: GeometrySi::default(),
            noise: NoiseParams::nominal(),
            detection: DetectionMode::Linewidth,
            couplings: Couplings::equal(0.1, 1e-10),
            regimes: vec![Regime::Equal],
            mass_grid: MassGrid::default(),
            constants_mode: ConstantsMode::Printed,
            materials_file: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn constants(&self) -> PhysConstants {
        PhysConstants::new(self.constants_mode)
    }

    pub fn geometry_natural(&self) -> Result<Geometry> {
        self.geometry.to_natural(&self.constants())
    }

    /// Material table for the active constants mode, with any override file applied.
    pub fn materials(&self) -> Result<MaterialSet> {
        let k = self.constants();
        let mut m = MaterialSet::for_mode(&k);
        if let Some(path) = &self.materials_file {
            m.apply_table_file(path, &k)?;
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.optomech.validate()?;
        self.noise.validate()?;
        self.couplings.validate()?;
        self.mass_grid.validate()?;
        self.geometry_natural()?;
        if self.regimes.is_empty() {
            return Err(Error::Config("no regime selected".into()));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let Some(m) = &cfg.materials_file {
            if m.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.materials_file = Some(base.join(m));
            }
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut flat = BTreeMap::new();
        flatten("", &table, &mut flat);
        let mut r = Reader {
            text,
            strict: false,
            values: flat,
        };
        r.strict = !r.boolean("use_defaults", true)?;

        let d = RunConfig::default();
        let o = d.optomech;
        let omega0 = r.positive("optomech.omega0", o.omega0)?;
        let q = r.positive("optomech.Q", o.q)?;
        let omega_m = r.positive("optomech.omega_m", omega0)?;
        let optomech = OptomechParams {
            omega0,
            omega_m,
            kappa: r.positive("optomech.kappa", o.kappa)?,
            gamma_m: r.positive("optomech.gamma_m", omega0 / q)?,
            detuning: r.real("optomech.Delta", o.detuning)?,
            g: r.real("optomech.g", o.g)?,
            e_pu: r.nonnegative("optomech.E_pu", o.e_pu)?,
            e_pr: r.nonnegative("optomech.E_pr", o.e_pr)?,
            q,
            m_s: r.positive("optomech.m_s_kg", o.m_s)?,
        };

        let g = d.geometry;
        let geometry = GeometrySi {
            radius: r.scaled("geometry.R_nm", g.radius, 1e9, false)?,
            width: r.scaled("geometry.D_um", g.width, 1e6, true)?,
            coating: r.scaled("geometry.t_nm", g.coating, 1e9, false)?,
            separation: r.scaled("geometry.a_nm", g.separation, 1e9, false)?,
        };

        let n = d.noise;
        let noise = NoiseParams {
            m_eff: r.positive("noise.M_eff_kg", n.m_eff)?,
            omega0: r.positive("noise.omega0", omega0)?,
            q: r.positive("noise.Q", q)?,
            delta_f: r.positive("noise.Delta_f", n.delta_f)?,
            temperature: r.nonnegative("noise.T", n.temperature)?,
            x2_mean: r.scaled("noise.x2_mean_nm2", n.x2_mean, 1e18, false)?,
        };
        let detection = r.parsed("noise.mode", d.detection)?;

        let c = d.couplings;
        let couplings = Couplings {
            m_a: r.positive("couplings.m_a", c.m_a)?,
            gp2_over_4pi: r.nonnegative("couplings.gp2_over_4pi", c.gp2_over_4pi)?,
            gn2_over_4pi: r.nonnegative("couplings.gn2_over_4pi", c.gn2_over_4pi)?,
        };

        let m = d.mass_grid;
        let mass_grid = MassGrid {
            lo: r.positive("mass_grid.lo", m.lo)?,
            hi: r.positive("mass_grid.hi", m.hi)?,
            points_per_decade: r.count("mass_grid.points_per_decade", m.points_per_decade)?,
        };

        let regimes = match r.text("regime")? {
            None => d.regimes,
            Some((s, line)) => parse_regimes(&s).map_err(|e| r.with_line(line, e))?,
        };
        let constants_mode = r.parsed("constants_mode", d.constants_mode)?;
        let materials_file = r.text_optional("materials_file")?.map(PathBuf::from);
        let output_dir = match r.text("output_dir")? {
            Some((s, _)) => PathBuf::from(s),
            None => d.output_dir,
        };

        if let Some(key) = r.values.keys().next() {
            let line = r.line_of(key);
            return Err(Error::Config(format!("unknown key `{key}`{}", at(line))));
        }

        let cfg = RunConfig {
            optomech,
            geometry,
            noise,
            detection,
            couplings,
            regimes,
            mass_grid,
            constants_mode,
            materials_file,
            output_dir,
        };
        cfg.validate().map_err(|e| match e {
            Error::Usage(_) | Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })?;
        Ok(cfg)
    }
}

/// "proton", "neutron", "equal" or "all".
pub fn parse_regimes(s: &str) -> Result<Vec<Regime>> {
    if s == "all" {
        Ok(Regime::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, toml::Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

fn at(line: Option<usize>) -> String {
    line.map(|l| format!(" (line {l})")).unwrap_or_default()
}

struct Reader<'a> {
    text: &'a str,
    strict: bool,
    values: BTreeMap<String, toml::Value>,
}

impl Reader<'_> {
    /// First line that assigns `key`, either as a dotted key or as the
    /// last component inside its `[section]`.
    fn line_of(&self, key: &str) -> Option<usize> {
        let (section, leaf) = key.rsplit_once('.').unwrap_or(("", key));
        let assigns = |line: &str, name: &str| {
            line.strip_prefix(name)
                .map(|rest| rest.trim_start().starts_with('='))
                .unwrap_or(false)
        };
        let mut current = String::new();
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(h) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = h.trim().to_string();
                continue;
            }
            let full = if current.is_empty() {
                line.to_string()
            } else {
                format!("{current}.{line}")
            };
            if assigns(&full, key) || (current == section && assigns(line, leaf)) {
                return Some(i + 1);
            }
        }
        None
    }

    fn with_line(&self, line: Option<usize>, e: Error) -> Error {
        Error::Config(format!("{e}{}", at(line)))
    }

    fn take(&mut self, key: &str) -> Result<Option<(toml::Value, Option<usize>)>> {
        match self.values.remove(key) {
            Some(v) => Ok(Some((v, self.line_of(key)))),
            None if self.strict => Err(Error::Config(format!(
                "missing key `{key}` (use_defaults = false)"
            ))),
            None => Ok(None),
        }
    }

    fn number(
        &mut self,
        key: &str,
        default: f64,
        check: fn(f64) -> bool,
        rule: &str,
    ) -> Result<f64> {
        let Some((v, line)) = self.take(key)? else {
            return Ok(default);
        };
        let x = match v {
            toml::Value::Float(f) => f,
            toml::Value::Integer(i) => i as f64,
            other => {
                return Err(Error::Config(format!(
                    "`{key}` must be a number, got {}{}",
                    other.type_str(),
                    at(line)
                )))
            }
        };
        if !x.is_finite() || !check(x) {
            return Err(Error::Config(format!("`{key}` = {x} {rule}{}", at(line))));
        }
        Ok(x)
    }

    fn real(&mut self, key: &str, default: f64) -> Result<f64> {
        self.number(key, default, |_| true, "must be finite")
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64> {
        self.number(key, default, |x| x > 0.0, "must be positive")
    }

    fn nonnegative(&mut self, key: &str, default: f64) -> Result<f64> {
        self.number(key, default, |x| x >= 0.0, "must be nonnegative")
    }

    /// A value given in scaled units (nm, um, nm^2), returned in SI as
    /// value / divisor. Absent keys return `default_si` untouched.
    fn scaled(
        &mut self,
        key: &str,
        default_si: f64,
        divisor: f64,
        allow_zero: bool,
    ) -> Result<f64> {
        let v = if allow_zero {
            self.nonnegative(key, f64::NAN)?
        } else {
            self.positive(key, f64::NAN)?
        };
        Ok(if v.is_nan() { default_si } else { v / divisor })
    }

    fn count(&mut self, key: &str, default: usize) -> Result<usize> {
        let Some((v, line)) = self.take(key)? else {
            return Ok(default);
        };
        match v {
            toml::Value::Integer(i) if i >= 0 => Ok(i as usize),
            other => Err(Error::Config(format!(
                "`{key}` must be a nonnegative integer, got {other}{}",
                at(line)
            ))),
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.values.remove(key) {
            None => Ok(default),
            Some(toml::Value::Boolean(b)) => Ok(b),
            Some(other) => Err(Error::Config(format!(
                "`{key}` must be true or false, got {other}{}",
                at(self.line_of(key))
            ))),
        }
    }

    fn text(&mut self, key: &str) -> Result<Option<(String, Option<usize>)>> {
        match self.take(key)? {
            None => Ok(None),
            Some((toml::Value::String(s), line)) => Ok(Some((s, line))),
            Some((other, line)) => Err(Error::Config(format!(
                "`{key}` must be a string, got {}{}",
                other.type_str(),
                at(line)
            ))),
        }
    }

    /// A string key that may be absent even in strict mode.
    fn text_optional(&mut self, key: &str) -> Result<Option<String>> {
        let strict = std::mem::replace(&mut self.strict, false);
        let r = self.text(key).map(|o| o.map(|(s, _)| s));
        self.strict = strict;
        r
    }

    fn parsed<T: std::str::FromStr<Err = Error>>(&mut self, key: &str, default: T) -> Result<T> {
        match self.text(key)? {
            None => Ok(default),
            Some((s, line)) => s.parse().map_err(|e| self.with_line(line, e)),
        }
    }
}
