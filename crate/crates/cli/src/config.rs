//! Run settings: command-line flags, INI config file, environment, defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use lattice_decomp::Units;

pub const TOL_ENV: &str = "LATTICE_DECOMP_TOL";
pub const MAX_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

type Res<T> = Result<T, ConfigError>;

/// `[section]` → key → (line, value).
#[derive(Debug, Default, Clone)]
pub struct IniFile {
    path: PathBuf,
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

const SECTIONS: [&str; 7] = [
    "common",
    "decompose",
    "mi-sweep",
    "fisher-sweep",
    "bounds-check",
    "group-demo",
    "verify",
];

impl IniFile {
    pub fn load(path: &Path) -> Res<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: cannot read config: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Res<Self> {
        let mut ini = IniFile {
            path: path.to_path_buf(),
            sections: BTreeMap::new(),
        };
        let mut current = "common".to_string();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    ConfigError(format!(
                        "{}:{line_no}: malformed section header '{line}'",
                        path.display()
                    ))
                })?;
                let name = name.trim();
                if !SECTIONS.contains(&name) {
                    return Err(ConfigError(format!(
                        "{}:{line_no}: unknown section '[{name}]'",
                        path.display()
                    )));
                }
                current = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!(
                    "{}:{line_no}: expected 'key = value', got '{line}'",
                    path.display()
                ))
            })?;
            let key = key.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError(format!(
                    "{}:{line_no}: unknown key '{key}' in [{current}]",
                    path.display()
                )));
            }
            let section = ini.sections.entry(current.clone()).or_default();
            if let Some((first, _)) = section.get(&key) {
                return Err(ConfigError(format!(
                    "{}:{line_no}: key '{key}' repeats line {first} in [{current}]",
                    path.display()
                )));
            }
            section.insert(key, (line_no, value.trim().to_string()));
        }
        Ok(ini)
    }

    fn lookup(&self, command: &str, key: &str) -> Option<Value> {
        for section in [command, "common"] {
            if let Some((line, v)) = self.sections.get(section).and_then(|s| s.get(key)) {
                return Some(Value {
                    text: v.clone(),
                    origin: format!("{}:{line}: key '{key}'", self.path.display()),
                });
            }
        }
        None
    }
}

const KEYS: [&str; 18] = [
    "model",
    "params",
    "lattice-scale",
    "domain",
    "grid",
    "tol",
    "units",
    "out",
    "seed",
    "jobs",
    "ambient",
    "sublattice",
    "modulus",
    "generator",
    "window",
    "pmf",
    "widen",
    "length",
];

/// A raw setting and where it came from, for error messages.
#[derive(Debug, Clone)]
pub struct Value {
    pub text: String,
    pub origin: String,
}

impl Value {
    fn error(&self, msg: impl fmt::Display) -> ConfigError {
        ConfigError(format!("{}: {msg} (got '{}')", self.origin, self.text))
    }

    fn f64(&self) -> Res<f64> {
        let v: f64 = self
            .text
            .trim()
            .parse()
            .map_err(|_| self.error("expected a number"))?;
        if !v.is_finite() {
            return Err(self.error("expected a finite number"));
        }
        Ok(v)
    }

    fn positive(&self) -> Res<f64> {
        let v = self.f64()?;
        if v <= 0.0 {
            return Err(self.error("must be positive"));
        }
        Ok(v)
    }

    fn list(&self) -> Res<Vec<f64>> {
        let out = self
            .text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.error("expected a comma-separated list of numbers"))
            })
            .collect::<Res<Vec<f64>>>()?;
        Ok(out)
    }

    fn int_rows(&self) -> Res<Vec<Vec<i64>>> {
        self.text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<i64>()
                            .map_err(|_| self.error("expected integer rows like '1,0;0,1'"))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Everything flags can set; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub values: BTreeMap<&'static str, String>,
    pub config: Option<PathBuf>,
    pub widen: Vec<String>,
}

impl Overrides {
    pub fn set(&mut self, key: &'static str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key, v);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Gaussian,
    Exponential,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Gaussian => "gaussian",
            ModelKind::Exponential => "exponential",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    Centered,
    Left,
    Offset(f64),
}

impl DomainSpec {
    /// Left endpoint of `[ℓ, ℓ + α)`.
    pub fn left(&self, alpha: f64) -> f64 {
        match *self {
            DomainSpec::Centered => -0.5 * alpha,
            DomainSpec::Left => 0.0,
            DomainSpec::Offset(l) => l,
        }
    }
}

/// Inclusive grid `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| round12(self.start + i as f64 * self.step))
            .collect()
    }
}

pub fn round12(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambient {
    Lattice,
    Code,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupPmf {
    Uniform,
    Geometric(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupSettings {
    pub ambient: Ambient,
    /// Sublattice columns (lattice) or generator rows (code).
    pub generator: Vec<Vec<i64>>,
    pub modulus: i64,
    pub length: usize,
    /// Uniform support `{0, …, window-1}^n` for lattices.
    pub window: i64,
    pub pmf: GroupPmf,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub model: ModelKind,
    pub params: Option<Vec<f64>>,
    pub lattice_scale: f64,
    pub domain: DomainSpec,
    pub grid: Option<Grid>,
    pub tol: f64,
    pub tol_given: bool,
    pub units: Units,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    pub group: GroupSettings,
    pub widen: Vec<(String, f64)>,
}

pub fn default_tol(command: &str) -> f64 {
    match command {
        "mi-sweep" => 1e-8,
        _ => 1e-10,
    }
}

pub const SUITES: [&str; 6] = [
    "tiling",
    "normalization",
    "entropy",
    "bounds",
    "fisher",
    "group",
];

/// Merges flags > config file > environment > defaults and validates.
pub fn resolve(command: &str, flags: &Overrides, env_tol: Option<String>) -> Res<Settings> {
    let ini = match &flags.config {
        Some(p) => IniFile::load(p)?,
        None => IniFile::default(),
    };
    let get = |key: &'static str| -> Option<Value> {
        flags
            .values
            .get(key)
            .map(|v| Value {
                text: v.clone(),
                origin: format!("--{key}"),
            })
            .or_else(|| ini.lookup(command, key))
    };

    let model = match get("model") {
        None => ModelKind::Gaussian,
        Some(v) => match v.text.trim() {
            "gaussian" => ModelKind::Gaussian,
            "exponential" => ModelKind::Exponential,
            _ => return Err(v.error("model must be 'gaussian' or 'exponential'")),
        },
    };
    let params = get("params").map(|v| v.list()).transpose()?;
    let lattice_scale = match get("lattice-scale") {
        Some(v) => v.positive()?,
        None => 1.0,
    };
    let domain = match get("domain") {
        None => match model {
            ModelKind::Gaussian => DomainSpec::Centered,
            ModelKind::Exponential => DomainSpec::Left,
        },
        Some(v) => match v.text.trim() {
            "centered" => DomainSpec::Centered,
            "left" => DomainSpec::Left,
            _ => DomainSpec::Offset(
                v.f64()
                    .map_err(|_| v.error("domain must be 'centered', 'left' or a number"))?,
            ),
        },
    };
    let grid = get("grid").map(|v| parse_grid(&v)).transpose()?;
    let tol_value = get("tol").or_else(|| {
        env_tol.map(|t| Value {
            text: t,
            origin: TOL_ENV.to_string(),
        })
    });
    let tol_given = tol_value.is_some();
    let tol = match tol_value {
        Some(v) => {
            let t = v.f64()?;
            if !(t > 0.0 && t <= MAX_TOL) {
                return Err(v.error(format!("tol must lie in (0, {MAX_TOL}]")));
            }
            t
        }
        None => default_tol(command),
    };
    let units = match get("units") {
        None => Units::Nats,
        Some(v) => v
            .text
            .trim()
            .parse()
            .map_err(|_| v.error("units must be 'nats' or 'bits'"))?,
    };
    let out = get("out")
        .map(|v| PathBuf::from(v.text.trim()))
        .unwrap_or_else(|| PathBuf::from("."));
    let seed = match get("seed") {
        None => 0x5eed,
        Some(v) => v
            .text
            .trim()
            .parse()
            .map_err(|_| v.error("seed must be a non-negative integer"))?,
    };
    let jobs = match get("jobs") {
        None => 1,
        Some(v) => match v.text.trim().parse::<usize>() {
            Ok(j) if j >= 1 => j,
            _ => return Err(v.error("jobs must be a positive integer")),
        },
    };
    if let Some(p) = &params {
        if p.iter().any(|&v| v <= 0.0) {
            return Err(get("params")
                .unwrap()
                .error("rates and variances must be positive"));
        }
    }
    let group = resolve_group(&get)?;
    let mut widen = Vec::new();
    let widen_values = if flags.widen.is_empty() {
        get("widen")
            .map(|v| {
                v.text
                    .split(',')
                    .map(|s| Value {
                        text: s.trim().to_string(),
                        origin: v.origin.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default()
    } else {
        flags
            .widen
            .iter()
            .map(|s| Value {
                text: s.clone(),
                origin: "--widen".into(),
            })
            .collect::<Vec<_>>()
    };
    for v in widen_values {
        let (suite, t) = v
            .text
            .split_once('=')
            .ok_or_else(|| v.error("expected SUITE=TOL"))?;
        if !SUITES.contains(&suite.trim()) {
            return Err(v.error(format!(
                "unknown suite (expected one of {})",
                SUITES.join(", ")
            )));
        }
        let t: f64 = t
            .trim()
            .parse()
            .ok()
            .filter(|t: &f64| *t > 0.0 && t.is_finite())
            .ok_or_else(|| v.error("tolerance must be a positive number"))?;
        widen.push((suite.trim().to_string(), t));
    }
    Ok(Settings {
        model,
        params,
        lattice_scale,
        domain,
        grid,
        tol,
        tol_given,
        units,
        out,
        seed,
        jobs,
        group,
        widen,
    })
}

fn parse_grid(v: &Value) -> Res<Grid> {
    let parts: Vec<&str> = v.text.split(':').collect();
    if parts.len() != 3 {
        return Err(v.error("grid must be start:stop:step"));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| v.error("grid must be start:stop:step"))
    };
    let g = Grid {
        start: num(parts[0])?,
        stop: num(parts[1])?,
        step: num(parts[2])?,
    };
    if !(g.start < g.stop) {
        return Err(v.error("grid start must be below stop"));
    }
    if !(g.step > 0.0) {
        return Err(v.error("grid step must be positive"));
    }
    if (g.stop - g.start) / g.step > 1e6 {
        return Err(v.error("grid has more than a million points"));
    }
    Ok(g)
}

fn resolve_group(get: &dyn Fn(&'static str) -> Option<Value>) -> Res<GroupSettings> {
    let ambient = match get("ambient") {
        None => Ambient::Lattice,
        Some(v) => match v.text.trim() {
            "lattice" => Ambient::Lattice,
            "code" => Ambient::Code,
            _ => return Err(v.error("ambient must be 'lattice' or 'code'")),
        },
    };
    let modulus = match get("modulus") {
        None => 2,
        Some(v) => match v.text.trim().parse::<i64>() {
            Ok(q) if q >= 2 => q,
            _ => return Err(v.error("modulus must be an integer >= 2")),
        },
    };
    let generator = match (get("sublattice"), get("generator"), ambient) {
        (Some(v), _, Ambient::Lattice) => v.int_rows()?,
        (_, Some(v), Ambient::Code) => v.int_rows()?,
        (None, _, Ambient::Lattice) => vec![vec![4]],
        (_, None, Ambient::Code) => vec![vec![1, 1, 1]],
    };
    let length = match get("length") {
        None => generator.first().map_or(1, |r| r.len()),
        Some(v) => match v.text.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => return Err(v.error("length must be a positive integer")),
        },
    };
    let window = match get("window") {
        None => 8,
        Some(v) => match v.text.trim().parse::<i64>() {
            Ok(w) if w >= 1 => w,
            _ => return Err(v.error("window must be a positive integer")),
        },
    };
    let pmf = match get("pmf") {
        None => GroupPmf::Uniform,
        Some(v) => {
            let t = v.text.trim();
            if t == "uniform" {
                GroupPmf::Uniform
            } else if let Some(r) = t.strip_prefix("geometric:") {
                match r.trim().parse::<f64>() {
                    Ok(r) if r > 0.0 && r < 1.0 => GroupPmf::Geometric(r),
                    _ => return Err(v.error("geometric ratio must lie in (0, 1)")),
                }
            } else {
                return Err(v.error("pmf must be 'uniform' or 'geometric:R'"));
            }
        }
    };
    Ok(GroupSettings {
        ambient,
        generator,
        modulus,
        length,
        window,
        pmf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&'static str, &str)]) -> Overrides {
        let mut o = Overrides::default();
        for (k, v) in pairs {
            o.set(k, Some(v.to_string()));
        }
        o
    }

    #[test]
    fn defaults_per_command() {
        let s = resolve("mi-sweep", &Overrides::default(), None).unwrap();
        assert_eq!(s.tol, 1e-8);
        assert_eq!(s.model, ModelKind::Gaussian);
        assert_eq!(s.domain, DomainSpec::Centered);
        let s = resolve("bounds-check", &flags(&[("model", "exponential")]), None).unwrap();
        assert_eq!(s.tol, 1e-10);
        assert_eq!(s.domain, DomainSpec::Left);
    }

    #[test]
    fn precedence_flag_config_env() {
        let dir = std::env::temp_dir().join(format!("ld-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.ini");
        std::fs::write(&path, "[common]\ntol = 1e-6\n[mi-sweep]\ntol = 1e-7\n").unwrap();
        let mut o = Overrides {
            config: Some(path.clone()),
            ..Overrides::default()
        };
        assert_eq!(
            resolve("mi-sweep", &o, Some("1e-5".into())).unwrap().tol,
            1e-7
        );
        assert_eq!(
            resolve("decompose", &o, Some("1e-5".into())).unwrap().tol,
            1e-6
        );
        o.set("tol", Some("1e-9".into()));
        assert_eq!(resolve("mi-sweep", &o, None).unwrap().tol, 1e-9);
        let o = Overrides::default();
        assert_eq!(
            resolve("mi-sweep", &o, Some("1e-5".into())).unwrap().tol,
            1e-5
        );
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn validation_messages_name_line_and_key() {
        let p = Path::new("run.ini");
        let err = IniFile::parse("[mi-sweep]\n\ngridd = 1:2:3\n", p).unwrap_err();
        assert!(
            err.0.contains("run.ini:3") && err.0.contains("gridd"),
            "{err}"
        );
        let err = IniFile::parse("[nope]\n", p).unwrap_err();
        assert!(err.0.contains("run.ini:1"), "{err}");
        let err = IniFile::parse("tol\n", p).unwrap_err();
        assert!(err.0.contains("run.ini:1"), "{err}");
    }

    #[test]
    fn grid_and_tol_checks() {
        for g in ["1:1:0.1", "2:1:0.1", "0:1:0", "0:1:-1", "0:1", "a:1:0.1"] {
            let e = resolve("mi-sweep", &flags(&[("grid", g)]), None).unwrap_err();
            assert!(e.0.starts_with("--grid"), "{e}");
        }
        for t in ["0", "-1e-8", "0.5", "nan", "x"] {
            assert!(resolve("mi-sweep", &flags(&[("tol", t)]), None).is_err());
        }
        assert!(resolve("mi-sweep", &flags(&[("tol", "1e-2")]), None).is_ok());
        let e = resolve("mi-sweep", &Overrides::default(), Some("abc".into())).unwrap_err();
        assert!(e.0.contains(TOL_ENV));
    }

    #[test]
    fn grid_points_are_rounded_and_inclusive() {
        let g = Grid {
            start: 0.05,
            stop: 3.0,
            step: 0.01,
        };
        let p = g.points();
        assert_eq!(p.len(), 296);
        assert_eq!(p[33], 0.38);
        assert_eq!(*p.last().unwrap(), 3.0);
    }

    #[test]
    fn group_settings() {
        let s = resolve(
            "group-demo",
            &flags(&[
                ("ambient", "code"),
                ("generator", "1,1,1"),
                ("modulus", "2"),
            ]),
            None,
        )
        .unwrap();
        assert_eq!(s.group.ambient, Ambient::Code);
        assert_eq!(s.group.length, 3);
        let e = resolve("group-demo", &flags(&[("sublattice", "2,x;0,2")]), None).unwrap_err();
        assert!(e.0.contains("--sublattice"));
        let e = resolve(
            "verify",
            &Overrides {
                widen: vec!["bogus=1".into()],
                ..Overrides::default()
            },
            None,
        )
        .unwrap_err();
        assert!(e.0.contains("--widen"));
    }
}
