//! Experiment manifests and the sectioned `key = value` format they are
//! written in.
//!
//! ```text
//! # comments start with '#'
//! [gram]              # section name selects the experiment
//! n = 1
//! k = 2, 4, 8
//! Z = i; 1+2i         # ';' separates list items, keys may repeat
//! Z = [[i, 0.1], [0.1, 2i]]
//! mode = 1,0          # r_1..r_n, s_1..s_n
//! tol = 1e-9
//!
//! [output]
//! out = results
//! ```
//!
//! Values are only checked once the whole document is read, because which
//! keys are allowed depends on the experiment; every error still points at
//! the line (or flag) it came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use agq_core::linalg::CMatrix;
use agq_core::{FourierMode, SiegelPoint, TangentDirection, C64};

use crate::error::{CliError, Location, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentId {
    Gram,
    ToeplitzCompare,
    HeatIdentity,
    Covariance,
    TraceLemma,
    Bms,
    PairingLimit,
    StarFit,
    Flatness,
    Tqft,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Gram,
        ExperimentId::ToeplitzCompare,
        ExperimentId::HeatIdentity,
        ExperimentId::Covariance,
        ExperimentId::TraceLemma,
        ExperimentId::Bms,
        ExperimentId::PairingLimit,
        ExperimentId::StarFit,
        ExperimentId::Flatness,
        ExperimentId::Tqft,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Gram => "gram",
            ExperimentId::ToeplitzCompare => "toeplitz-compare",
            ExperimentId::HeatIdentity => "heat-identity",
            ExperimentId::Covariance => "covariance",
            ExperimentId::TraceLemma => "trace-lemma",
            ExperimentId::Bms => "bms",
            ExperimentId::PairingLimit => "pairing-limit",
            ExperimentId::StarFit => "star-fit",
            ExperimentId::Flatness => "flatness",
            ExperimentId::Tqft => "tqft",
        }
    }

    /// Named tolerances and their defaults for a given dimension.
    pub fn tolerance_defaults(self, n: usize) -> &'static [(&'static str, f64)] {
        match self {
            ExperimentId::Gram if n == 1 => &[("tol", 1e-8)],
            ExperimentId::Gram => &[("tol", 1e-7)],
            ExperimentId::ToeplitzCompare => &[("tol", 1e-8)],
            ExperimentId::HeatIdentity => &[("tol", 1e-12), ("tol_fd", 1e-8)],
            ExperimentId::Covariance => &[("min_difference", 1e-2), ("tol", 1e-9)],
            ExperimentId::TraceLemma => &[("tol", 1e-10), ("tol_zero", 1e-12)],
            ExperimentId::Bms => &[("ratio_max", 0.7), ("ratio_min", 0.3)],
            ExperimentId::PairingLimit => &[("min_order", 0.9), ("tol", 1e-10)],
            ExperimentId::StarFit => &[("min_order", 0.9), ("tol", 0.02)],
            ExperimentId::Flatness => &[("tol", 1e-10), ("tol_fd", 1e-5)],
            ExperimentId::Tqft => &[("tol", 1e-10)],
        }
    }

    fn uses_levels(self) -> bool {
        self != ExperimentId::Flatness
    }

    fn uses_modes(self) -> bool {
        !matches!(self, ExperimentId::Gram | ExperimentId::HeatIdentity)
    }

    fn uses_grid(self) -> bool {
        matches!(self, ExperimentId::Gram | ExperimentId::ToeplitzCompare)
    }

    fn default_levels(self, n: usize) -> Vec<u32> {
        match self {
            ExperimentId::Bms | ExperimentId::PairingLimit => vec![8, 16, 32, 64, 128],
            ExperimentId::StarFit => vec![16, 24, 32, 48, 64, 96, 128],
            ExperimentId::Gram | ExperimentId::ToeplitzCompare if n >= 2 => vec![1, 2],
            ExperimentId::HeatIdentity if n >= 2 => vec![1, 2, 4],
            _ => vec![2, 4, 8, 16],
        }
    }

    fn default_modes(self, n: usize) -> Vec<FourierMode> {
        let unit = |slot: usize| {
            let mut e = vec![0; 2 * n];
            e[slot] = 1;
            let s = e.split_off(n);
            FourierMode::new(e, s)
        };
        match self {
            ExperimentId::ToeplitzCompare | ExperimentId::Covariance if n == 1 => {
                FourierMode::all_within(1, 3)
            }
            ExperimentId::ToeplitzCompare | ExperimentId::Covariance => {
                FourierMode::all_within(n, 1)
            }
            ExperimentId::TraceLemma if n == 1 => FourierMode::all_within(1, 2),
            ExperimentId::TraceLemma => FourierMode::all_within(n, 1),
            ExperimentId::Bms | ExperimentId::PairingLimit => vec![unit(0)],
            ExperimentId::StarFit => vec![unit(0), unit(n)],
            ExperimentId::Flatness if n <= 2 => FourierMode::all_within(n, 3),
            ExperimentId::Flatness => FourierMode::all_within(n, 1),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = ExperimentId::ALL.iter().map(|id| id.as_str()).collect();
                format!(
                    "unknown experiment '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Tangent directions swept by the flatness experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirectionSet {
    /// `∂/∂Z_ii`.
    Diagonal,
    /// Every holomorphic and antiholomorphic `∂/∂Z_ij`, `i ≤ j`.
    All,
}

impl DirectionSet {
    pub fn directions(self, n: usize) -> Vec<TangentDirection> {
        match self {
            DirectionSet::Diagonal => (0..n)
                .map(|i| TangentDirection::holomorphic(i, i))
                .collect(),
            DirectionSet::All => TangentDirection::all(n),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            DirectionSet::Diagonal => "diagonal",
            DirectionSet::All => "all",
        }
    }
}

/// A validated experiment description with every default filled in.
#[derive(Debug, Clone)]
pub struct ExperimentManifest {
    pub experiment: ExperimentId,
    pub n: usize,
    pub k_values: Vec<u32>,
    pub points: Vec<SiegelPoint>,
    pub modes: Vec<FourierMode>,
    pub tolerances: BTreeMap<&'static str, f64>,
    /// Quadrature nodes per coordinate; `None` picks the certified minimum.
    pub grid: Option<usize>,
    pub directions: DirectionSet,
    /// Output directory. Not part of the canonical form.
    pub out: Option<PathBuf>,
}

impl ExperimentManifest {
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// Deterministic `key = value` rendering of everything that affects the
    /// results; it parses back to the same manifest.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("experiment", self.experiment.to_string());
        line("n", self.n.to_string());
        if self.experiment.uses_levels() {
            line("k", join(self.k_values.iter().map(u32::to_string), ", "));
        }
        for p in &self.points {
            line("Z", format_point(p));
        }
        for m in &self.modes {
            line("mode", format_mode(m));
        }
        if let Some(g) = self.grid {
            line("grid", g.to_string());
        }
        if self.experiment == ExperimentId::Flatness {
            line("directions", self.directions.as_str().into());
        }
        for (k, v) in &self.tolerances {
            line(k, format!("{v:?}"));
        }
        out
    }
}

fn join(items: impl Iterator<Item = String>, sep: &str) -> String {
    items.collect::<Vec<_>>().join(sep)
}

/// `a+bi` with shortest round-trip components.
pub fn format_complex(c: C64) -> String {
    if c.im.is_sign_negative() {
        format!("{:?}-{:?}i", c.re, -c.im)
    } else {
        format!("{:?}+{:?}i", c.re, c.im)
    }
}

/// A scalar for `n = 1`, otherwise a row list.
pub fn format_point(p: &SiegelPoint) -> String {
    let z = p.z();
    if p.dim() == 1 {
        return format_complex(z[(0, 0)]);
    }
    let rows: Vec<String> = (0..p.dim())
        .map(|i| {
            format!(
                "[{}]",
                join((0..p.dim()).map(|j| format_complex(z[(i, j)])), ", ")
            )
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

/// `r_1,...,r_n,s_1,...,s_n`.
pub fn format_mode(m: &FourierMode) -> String {
    join(m.r().iter().chain(m.s()).map(i64::to_string), ",")
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("malformed number '{s}'"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number '{s}'"))
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`; exponents are allowed.
pub fn parse_complex(text: &str) -> std::result::Result<C64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = s.strip_suffix('i') else {
        return parse_real(&s).map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (parse_real(&body[..p])?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other).map_err(|_| format!("malformed complex number '{text}'"))?,
    };
    Ok(C64::new(re, im))
}

/// A scalar, or a square row list `[[a, b], [c, d]]`.
pub fn parse_matrix(text: &str) -> std::result::Result<CMatrix, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if !s.starts_with('[') {
        return parse_complex(&s).map(|z| CMatrix::from_element(1, 1, z));
    }
    let inner = s
        .strip_prefix("[[")
        .and_then(|r| r.strip_suffix("]]"))
        .ok_or_else(|| format!("malformed matrix '{text}' (expected [[a, b], [c, d]])"))?;
    let rows = inner
        .split("],[")
        .map(|row| {
            row.split(',')
                .map(parse_complex)
                .collect::<std::result::Result<Vec<_>, _>>()
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("matrix '{text}' is not square"));
    }
    let flat: Vec<C64> = rows.into_iter().flatten().collect();
    Ok(CMatrix::from_row_slice(n, n, &flat))
}

pub fn parse_point(text: &str) -> std::result::Result<SiegelPoint, String> {
    SiegelPoint::new(parse_matrix(text)?).map_err(|e| e.to_string())
}

/// `r_1,...,r_n,s_1,...,s_n`.
pub fn parse_mode(text: &str) -> std::result::Result<FourierMode, String> {
    let mut entries = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("malformed integer '{}'", t.trim()))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if entries.is_empty() || entries.len() % 2 != 0 {
        return Err(format!(
            "mode '{text}' needs an even number of integers (r then s)"
        ));
    }
    let s = entries.split_off(entries.len() / 2);
    Ok(FourierMode::new(entries, s))
}

pub fn parse_levels(text: &str) -> std::result::Result<Vec<u32>, String> {
    let ks = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<u32>() {
                Ok(k) if k > 0 => Ok(k),
                _ => Err(format!("level '{t}' is not a positive integer")),
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(ks)
}

#[derive(Debug, Clone)]
struct Entry {
    location: Location,
    key: String,
    value: String,
}

/// Raw entries in document order, command-line overrides last.
#[derive(Debug, Clone, Default)]
pub struct ConfigDocument {
    entries: Vec<Entry>,
}

const LIST_KEYS: [&str; 2] = ["Z", "mode"];

impl ConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDocument::default();
        let mut seen_experiment = false;
        for (idx, raw) in text.lines().enumerate() {
            let location = Location::Line(idx + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| {
                        CliError::config(&location, format!("malformed section header '{line}'"))
                    })?
                    .trim();
                match name {
                    "output" | "experiment" => {}
                    _ => {
                        ExperimentId::from_str(name).map_err(|e| CliError::config(&location, e))?;
                        if seen_experiment {
                            return Err(CliError::config(
                                &location,
                                "only one experiment section per configuration",
                            ));
                        }
                        seen_experiment = true;
                        doc.entries.push(Entry {
                            location,
                            key: "experiment".into(),
                            value: name.into(),
                        });
                    }
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(&location, format!("expected 'key = value', got '{line}'"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(CliError::config(
                    &location,
                    format!("expected 'key = value', got '{line}'"),
                ));
            }
            if key == "experiment" {
                if seen_experiment {
                    return Err(CliError::config(&location, "experiment given twice"));
                }
                seen_experiment = true;
            } else if !LIST_KEYS.contains(&key) && doc.entries.iter().any(|e| e.key == key) {
                return Err(CliError::config(
                    &location,
                    format!("duplicate key '{key}'"),
                ));
            }
            doc.entries.push(Entry {
                location,
                key: key.into(),
                value: value.into(),
            });
        }
        Ok(doc)
    }

    /// Replaces every file entry for `key` with `values` given on the
    /// command line as `--flag`.
    pub fn override_with(&mut self, key: &str, flag: &str, values: &[String]) {
        if values.is_empty() {
            return;
        }
        self.entries.retain(|e| e.key != key);
        for v in values {
            self.entries.push(Entry {
                location: Location::Flag(flag.into()),
                key: key.into(),
                value: v.clone(),
            });
        }
    }

    pub fn into_manifest(self) -> Result<ExperimentManifest> {
        let experiment_entry = self
            .entries
            .iter()
            .find(|e| e.key == "experiment")
            .ok_or_else(|| CliError::Usage("configuration names no experiment".into()))?;
        let experiment = ExperimentId::from_str(&experiment_entry.value)
            .map_err(|e| CliError::config(&experiment_entry.location, e))?;

        let mut n: Option<(usize, Location)> = None;
        let mut k_values = None;
        let mut points = Vec::new();
        let mut modes = Vec::new();
        let mut grid = None;
        let mut directions = DirectionSet::Diagonal;
        let mut out = None;
        let mut tolerances: Vec<(String, f64, Location)> = Vec::new();

        for e in &self.entries {
            let loc = &e.location;
            let fail = |msg: String| CliError::config(loc, msg);
            let unused = || {
                fail(format!(
                    "key '{}' is not used by the {experiment} experiment",
                    e.key
                ))
            };
            match e.key.as_str() {
                "experiment" => {}
                "n" => {
                    let v = e.value.parse::<usize>().ok().filter(|&v| v > 0);
                    let v = v.ok_or_else(|| {
                        fail(format!("n must be a positive integer, got '{}'", e.value))
                    })?;
                    n = Some((v, loc.clone()));
                }
                "k" => {
                    if !experiment.uses_levels() {
                        return Err(unused());
                    }
                    k_values = Some(parse_levels(&e.value).map_err(fail)?);
                }
                "Z" => {
                    for item in e.value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                        points.push((parse_point(item).map_err(fail)?, loc.clone()));
                    }
                }
                "mode" => {
                    if !experiment.uses_modes() {
                        return Err(unused());
                    }
                    for item in e.value.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                        modes.push((parse_mode(item).map_err(fail)?, loc.clone()));
                    }
                }
                "grid" => {
                    if !experiment.uses_grid() {
                        return Err(unused());
                    }
                    let v = e.value.parse::<usize>().ok().filter(|&v| v > 0);
                    grid = Some(v.ok_or_else(|| {
                        fail(format!(
                            "grid must be a positive integer, got '{}'",
                            e.value
                        ))
                    })?);
                }
                "directions" => {
                    if experiment != ExperimentId::Flatness {
                        return Err(unused());
                    }
                    directions = match e.value.as_str() {
                        "diagonal" => DirectionSet::Diagonal,
                        "all" => DirectionSet::All,
                        other => {
                            return Err(fail(format!(
                                "directions must be 'diagonal' or 'all', got '{other}'"
                            )))
                        }
                    };
                }
                "out" => out = Some(PathBuf::from(&e.value)),
                key => {
                    // Tolerance names are checked once n is known.
                    let v = parse_real(&e.value).map_err(&fail)?;
                    if v <= 0.0 {
                        return Err(fail(format!("{key} must be positive, got {}", e.value)));
                    }
                    tolerances.push((key.to_string(), v, loc.clone()));
                }
            }
        }

        let n = match n {
            Some((v, _)) => v,
            None => points
                .first()
                .map(|(p, _)| p.dim())
                .or_else(|| modes.first().map(|(m, _)| m.dim()))
                .unwrap_or(1),
        };
        for (p, loc) in &points {
            if p.dim() != n {
                return Err(CliError::config(
                    loc,
                    format!("Z is {0}x{0} but n = {n}", p.dim()),
                ));
            }
        }
        for (m, loc) in &modes {
            if m.dim() != n {
                return Err(CliError::config(
                    loc,
                    format!(
                        "mode {} has dimension {} but n = {n}",
                        format_mode(m),
                        m.dim()
                    ),
                ));
            }
        }
        if experiment == ExperimentId::Tqft && modes.len() > 2 {
            return Err(CliError::config(
                &modes[2].1,
                "a tqft link has at most two components",
            ));
        }
        if experiment == ExperimentId::StarFit && modes.len() % 2 != 0 {
            return Err(CliError::config(
                &modes[modes.len() - 1].1,
                "star-fit modes come in pairs (f, g)",
            ));
        }

        let defaults = experiment.tolerance_defaults(n);
        let mut tol_map: BTreeMap<&'static str, f64> = defaults.iter().copied().collect();
        for (key, v, loc) in tolerances {
            let Some((name, _)) = defaults.iter().find(|(name, _)| *name == key) else {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                return Err(CliError::config(
                    &loc,
                    format!(
                        "unknown key '{key}' for {experiment} (tolerances: {})",
                        known.join(", ")
                    ),
                ));
            };
            tol_map.insert(name, v);
        }
        if let Some(&lo) = tol_map.get("ratio_min") {
            if lo >= tol_map["ratio_max"] {
                return Err(CliError::Usage("ratio_min must be below ratio_max".into()));
            }
        }

        let points: Vec<SiegelPoint> = if points.is_empty() {
            match experiment {
                // The closed-form error and the order bound are both stated at Z = i.
                ExperimentId::PairingLimit if n == 1 => {
                    vec![SiegelPoint::scalar(C64::new(0.0, 1.0))?]
                }
                _ => default_points(n)?,
            }
        } else {
            points.into_iter().map(|(p, _)| p).collect()
        };
        if experiment == ExperimentId::Covariance && points.len() < 2 {
            return Err(CliError::Usage(
                "covariance needs at least two Siegel points".into(),
            ));
        }
        let modes = if modes.is_empty() {
            experiment.default_modes(n)
        } else {
            modes.into_iter().map(|(m, _)| m).collect()
        };
        let k_values = match k_values {
            Some(ks) => ks,
            None if experiment.uses_levels() => experiment.default_levels(n),
            None => Vec::new(),
        };

        Ok(ExperimentManifest {
            experiment,
            n,
            k_values,
            points,
            modes,
            tolerances: tol_map,
            grid,
            directions,
            out,
        })
    }
}

/// `{i, 1+2i, 0.5+0.7i}` for `n = 1`; two diagonal points otherwise.
pub fn default_points(n: usize) -> Result<Vec<SiegelPoint>> {
    let pts = if n == 1 {
        vec![
            SiegelPoint::scalar(C64::new(0.0, 1.0))?,
            SiegelPoint::scalar(C64::new(1.0, 2.0))?,
            SiegelPoint::scalar(C64::new(0.5, 0.7))?,
        ]
    } else {
        let ladder: Vec<C64> = (1..=n).map(|j| C64::new(0.0, j as f64)).collect();
        let mixed: Vec<C64> = (0..n)
            .map(|j| {
                if j % 2 == 0 {
                    C64::new(0.3, 1.5)
                } else {
                    C64::new(-0.2, 0.8)
                }
            })
            .collect();
        vec![
            SiegelPoint::diagonal(&ladder)?,
            SiegelPoint::diagonal(&mixed)?,
        ]
    };
    Ok(pts)
}

/// Parses a configuration document into a manifest.
pub fn parse_config(text: &str) -> Result<ExperimentManifest> {
    ConfigDocument::parse(text)?.into_manifest()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("i", C64::new(0.0, 1.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("2i", C64::new(0.0, 2.0)),
            ("1+2i", C64::new(1.0, 2.0)),
            ("0.5-0.7i", C64::new(0.5, -0.7)),
            ("1e-3+2.5e+1i", C64::new(1e-3, 25.0)),
            ("-3", C64::new(-3.0, 0.0)),
            (" 1 + i ", C64::new(1.0, 1.0)),
            ("1e-3i", C64::new(0.0, 1e-3)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for bad in ["", "1+", "abc", "1+xi", "nan", "inf+i", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn complex_round_trip() {
        for c in [
            C64::new(0.1, -0.0),
            C64::new(-2.5e-17, 3.0),
            C64::new(1.0 / 3.0, 1e300),
        ] {
            assert_eq!(parse_complex(&format_complex(c)).unwrap(), c);
        }
    }

    #[test]
    fn matrix_rows() {
        let m = parse_matrix("[[i, 0.5], [0.5, 2i]]").unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.5, 0.0));
        assert_eq!(m[(1, 1)], C64::new(0.0, 2.0));
        assert!(parse_matrix("[[i, 0], [0]]").is_err());
        assert!(parse_matrix("[i, 0]").is_err());
    }

    #[test]
    fn point_round_trip() {
        let p = parse_point("[[0.4+1.3i, 0.2+0.3i], [0.2+0.3i, -0.7+0.9i]]").unwrap();
        let q = parse_point(&format_point(&p)).unwrap();
        assert_eq!(p.z(), q.z());
    }

    #[test]
    fn modes() {
        let m = parse_mode("1,-2").unwrap();
        assert_eq!((m.r(), m.s()), (&[1][..], &[-2][..]));
        let m = parse_mode("1, 0, 0, 1").unwrap();
        assert_eq!((m.r(), m.s()), (&[1, 0][..], &[0, 1][..]));
        assert!(parse_mode("1,2,3").is_err());
        assert!(parse_mode("1,x").is_err());
    }
}
