use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::trigpoly::MIN_OVERSAMPLING;

/// Parameters of a certification suite.
///
/// Read from a flat `key = value` file; `#` starts a comment. Lists are
/// comma-separated and may be empty. Recognised keys:
///
/// | key | default | meaning |
/// |-----|---------|---------|
/// | `dims` | `1,2` | dimensions `d` |
/// | `p_values` | `2` | exponents `p ∈ (1, 2]` |
/// | `eps` | `0.1` | `ε` in the main-theorem exponent |
/// | `N_values` | `2` | sector granularities / sequence lengths |
/// | `k_range` | `0..2` | triadic rings, inclusive |
/// | `oversampling` | `8` | quadrature oversampling, at least 4 |
/// | `seed` | `7` | seed for generated fixtures |
/// | `symbols` | `one` | multiplier symbols |
/// | `negative_controls` | `true` | run `norm` as an expected failure |
/// | `lattice_log2` | `18` | log2 of the lattice-rule size |
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub p_values: Vec<f64>,
    pub eps: f64,
    pub n_values: Vec<u32>,
    pub k_range: RangeInclusive<u32>,
    pub oversampling: u32,
    pub seed: u64,
    pub symbols: Vec<String>,
    pub negative_controls: bool,
    pub lattice_log2: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![1, 2],
            p_values: vec![2.0],
            eps: 0.1,
            n_values: vec![2],
            k_range: 0..=2,
            oversampling: 8,
            seed: 7,
            symbols: vec!["one".into()],
            negative_controls: true,
            lattice_log2: 18,
        }
    }
}

pub const KEYS: &[&str] = &[
    "dims",
    "p_values",
    "eps",
    "N_values",
    "k_range",
    "oversampling",
    "seed",
    "symbols",
    "negative_controls",
    "lattice_log2",
];

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("cannot parse list item {s:?}")))
        .collect()
}

fn parse_one<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.trim().parse::<T>().map_err(|_| format!("cannot parse {value:?}"))
}

fn parse_range(value: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let v = value.trim();
    match v.split_once("..") {
        Some((a, b)) => {
            let a: u32 = parse_one(a)?;
            let b: u32 = parse_one(b.trim_start_matches('='))?;
            if a > b {
                return Err(format!("empty range {v}"));
            }
            Ok(a..=b)
        }
        None => {
            let k: u32 = parse_one(v)?;
            Ok(k..=k)
        }
    }
}

fn symbol_syntax_ok(s: &str) -> bool {
    match s.split_once(':') {
        Some(("power", v)) => v.parse::<f64>().is_ok_and(f64::is_finite),
        Some(("table", f)) => !f.is_empty(),
        Some(_) => false,
        None => matches!(s, "one" | "zero" | "norm"),
    }
}

impl SuiteConfig {
    /// Parses a config file; unknown keys and bad values are errors with
    /// their line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, found {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|msg| Error::Parse { line: i + 1, msg })?;
        }
        cfg.validate().map_err(|msg| Error::Parse { line: 0, msg })?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "dims" => self.dims = parse_list(value)?,
            "p_values" => self.p_values = parse_list(value)?,
            "eps" => self.eps = parse_one(value)?,
            "N_values" => self.n_values = parse_list(value)?,
            "k_range" => self.k_range = parse_range(value)?,
            "oversampling" => self.oversampling = parse_one(value)?,
            "seed" => self.seed = parse_one(value)?,
            "symbols" => self.symbols = parse_list(value)?,
            "negative_controls" => self.negative_controls = parse_one(value)?,
            "lattice_log2" => self.lattice_log2 = parse_one(value)?,
            _ => return Err(format!("unknown key {key:?}; expected one of {}", KEYS.join(", "))),
        }
        self.validate()
    }

    /// Range checks that do not depend on the module budgets.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if let Some(d) = self.dims.iter().find(|&&d| d == 0 || d > 4) {
            return Err(format!("dimension {d} outside 1..=4"));
        }
        if let Some(p) = self.p_values.iter().find(|&&p| !(p > 1.0 && p <= 2.0)) {
            return Err(format!("p = {p} outside (1, 2]"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(format!("eps = {} must be positive", self.eps));
        }
        if self.n_values.contains(&0) {
            return Err("N must be positive".into());
        }
        if f64::from(self.oversampling) < MIN_OVERSAMPLING {
            return Err(format!("oversampling must be at least {MIN_OVERSAMPLING}"));
        }
        if let Some(bad) = self.symbols.iter().find(|s| !symbol_syntax_ok(s)) {
            return Err(format!("unknown symbol {bad:?}; expected one, zero, norm, power:<s> or table:<file>"));
        }
        if !(8..=24).contains(&self.lattice_log2) {
            return Err("lattice_log2 outside 8..=24".into());
        }
        Ok(())
    }

    pub fn k_max(&self) -> u32 {
        *self.k_range.end()
    }

    pub fn ks(&self) -> Vec<u32> {
        self.k_range.clone().collect()
    }

    /// The config as it would be written to a file.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// `(key, value)` pairs in [`KEYS`] order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        fn join<T: ToString>(v: &[T]) -> String {
            v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        vec![
            ("dims", join(&self.dims)),
            ("p_values", join(&self.p_values)),
            ("eps", self.eps.to_string()),
            ("N_values", join(&self.n_values)),
            ("k_range", format!("{}..{}", self.k_range.start(), self.k_range.end())),
            ("oversampling", self.oversampling.to_string()),
            ("seed", self.seed.to_string()),
            ("symbols", self.symbols.join(",")),
            ("negative_controls", self.negative_controls.to_string()),
            ("lattice_log2", self.lattice_log2.to_string()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = SuiteConfig::parse("dims = 1\np_values=1.5, 2\n# comment\nN_values =\nk_range = 0..3\n").unwrap();
        assert_eq!(cfg.dims, vec![1]);
        assert_eq!(cfg.p_values, vec![1.5, 2.0]);
        assert!(cfg.n_values.is_empty());
        assert_eq!(cfg.k_range, 0..=3);
        assert_eq!(SuiteConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match SuiteConfig::parse("dims = 1\n\nbogus = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match SuiteConfig::parse("p_values = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        assert!(SuiteConfig::parse("dims 1\n").is_err());
    }
}
