//! Flat `key = value` experiment configuration with dotted sections.
//!
//! `#` starts a comment. Every key has a default except `experiment`.
//! Per-node overrides use `node<i>.<param>`, e.g. `node1.tau_f = 0.015`.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueKind {
    Float,
    Int,
    Bool,
    Text,
    Choice(&'static [&'static str]),
    FloatList,
    ChoiceList(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
pub struct KeyDef {
    pub key: &'static str,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub kind: ValueKind,
    /// Default taken from the reference circuit.
    pub paper: bool,
}

const fn key(key: &'static str, default: &'static str, kind: ValueKind) -> KeyDef {
    KeyDef { key, default: Some(default), kind, paper: false }
}

const fn paper(key: &'static str, default: &'static str, kind: ValueKind) -> KeyDef {
    KeyDef { key, default: Some(default), kind, paper: true }
}

pub const EXPERIMENTS: &[&str] = &["simulate", "sync-scan", "mask", "ber", "complexity"];
pub const TOPOLOGIES: &[&str] = &["bidirectional", "directional", "external", "ring", "all_to_all", "uncoupled"];
pub const NODE_PARAMS: &[&str] = &["gain", "alpha", "mu", "x_hat", "kappa_f", "tau_f", "rc"];
pub const SCHEMES: &[&str] = &["bpsk", "csk", "dcsk"];
pub const CHANNELS: &[&str] = &["awgn", "severe", "negligible", "two_ray"];
pub const CHIP_KINDS: &[&str] = &["logistic", "mackey_glass"];
pub const BINNINGS: &[&str] = &["quantile", "uniform"];

use ValueKind::*;

pub const SCHEMA: &[KeyDef] = &[
    KeyDef { key: "experiment", default: None, kind: Choice(EXPERIMENTS), paper: false },
    key("seed", "0", Int),
    key("out.dir", "out", Text),
    key("out.svg", "false", Bool),
    paper("node.gain", "0.7", Float),
    paper("node.alpha", "2", Float),
    paper("node.mu", "1", Float),
    paper("node.x_hat", "0.4", Float),
    paper("node.kappa_f", "0.4", Float),
    paper("node.tau_f", "0.018", Float),
    paper("node.rc", "0.001", Float),
    paper("topology.kind", "bidirectional", Choice(TOPOLOGIES)),
    paper("topology.nodes", "2", Int),
    paper("topology.kappa_c", "1", Float),
    paper("topology.tau_c", "0.018", Float),
    key("topology.drive_amplitude", "0.1", Float),
    key("topology.drive_frequency_hz", "25", Float),
    key("sim.duration", "2", Float),
    key("sim.step", "0.00001", Float),
    key("sim.transient", "1", Float),
    key("sim.csv_every", "10", Int),
    key("sim.max_lag", "0.05", Float),
    key("scan.param", "tau_f", Choice(NODE_PARAMS)),
    key("scan.node", "1", Int),
    key("scan.from", "0.012", Float),
    key("scan.to", "0.024", Float),
    key("scan.points", "13", Int),
    key("mask.epsilon", "0.05", Float),
    key("mask.bit_duration", "0.2", Float),
    key("mask.bits", "20", Int),
    key("ber.schemes", "bpsk,csk,dcsk", ChoiceList(SCHEMES)),
    key("ber.channel", "awgn", Choice(CHANNELS)),
    key("ber.ray2_power_db", "0", Float),
    key("ber.ray2_delay_chips", "2", Int),
    key("ber.ebn0_db", "0,2,4,6,8,10,12,14,16", FloatList),
    key("ber.beta", "64", Int),
    key("ber.bpsk_spreading", "1", Int),
    key("ber.bits_per_point", "100000", Int),
    key("ber.chips", "logistic", Choice(CHIP_KINDS)),
    key("complexity.input", "", Text),
    key("complexity.columns", "", Text),
    key("complexity.channel", "0", Int),
    key("complexity.k", "4", Int),
    key("complexity.binning", "quantile", Choice(BINNINGS)),
    key("complexity.l_max", "8", Int),
    key("complexity.lyapunov", "true", Bool),
    key("complexity.embed_dim", "4", Int),
    key("complexity.embed_lag", "0", Int),
    key("complexity.theiler", "0", Int),
    key("complexity.fit_start", "1", Int),
    key("complexity.fit_end", "0", Int),
    key("complexity.neural_max_exact_n", "12", Int),
    key("complexity.neural_subset_samples", "200", Int),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> Self {
        Self { line, key: key.map(str::to_string), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    FloatList(Vec<f64>),
    List(Vec<String>),
}

impl Value {
    fn canonical(&self) -> String {
        match self {
            Value::Float(v) => format!("{v}"),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::FloatList(v) => v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(","),
            Value::List(v) => v.join(","),
        }
    }
}

fn parse_value(kind: ValueKind, raw: &str) -> Result<Value, String> {
    let float = |s: &str| -> Result<f64, String> {
        match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("`{s}` is not a finite number")),
        }
    };
    match kind {
        Float => float(raw).map(Value::Float),
        Int => raw.parse::<u64>().map(Value::Int).map_err(|_| format!("`{raw}` is not a non-negative integer")),
        Bool => match raw {
            "true" => Ok(Value::Bool(true)),
            "false" => Ok(Value::Bool(false)),
            _ => Err(format!("`{raw}` is not true or false")),
        },
        Text => Ok(Value::Text(raw.to_string())),
        Choice(options) => {
            if options.contains(&raw) {
                Ok(Value::Text(raw.to_string()))
            } else {
                Err(format!("`{raw}` is not one of {}", options.join(", ")))
            }
        }
        FloatList => {
            let v = raw.split(',').map(float).collect::<Result<Vec<_>, _>>()?;
            Ok(Value::FloatList(v))
        }
        ChoiceList(options) => {
            let mut out: Vec<String> = Vec::new();
            for item in raw.split(',').map(str::trim) {
                if !options.contains(&item) {
                    return Err(format!("`{item}` is not one of {}", options.join(", ")));
                }
                if out.iter().any(|o| o == item) {
                    return Err(format!("`{item}` listed twice"));
                }
                out.push(item.to_string());
            }
            Ok(Value::List(out))
        }
    }
}

fn schema_entry(key: &str) -> Option<&'static KeyDef> {
    SCHEMA.iter().find(|d| d.key == key)
}

/// `node<i>.<param>` → `(i, param)`.
pub fn node_override(key: &str) -> Option<(usize, &str)> {
    let rest = key.strip_prefix("node")?;
    let (idx, param) = rest.split_once('.')?;
    if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let i = idx.parse().ok()?;
    NODE_PARAMS.contains(&param).then_some((i, param))
}

/// Parsed configuration: every schema key resolved to a value.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    values: BTreeMap<&'static str, Value>,
    overrides: BTreeMap<(usize, String), f64>,
    lines: BTreeMap<String, usize>,
}

impl Config {
    /// Parses `text`, filling defaults. All problems are reported together.
    pub fn parse(text: &str) -> Result<Config, Vec<Diagnostic>> {
        let mut diags = Vec::new();
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        let mut values = BTreeMap::new();
        let mut overrides = BTreeMap::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                diags.push(Diagnostic::new(Some(line_no), None, format!("expected `key = value`, got `{line}`")));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            if let Some(&first) = seen.get(k) {
                diags.push(Diagnostic::new(
                    Some(line_no),
                    Some(k),
                    format!("duplicate key (lines {first} and {line_no})"),
                ));
                continue;
            }
            seen.insert(k.to_string(), line_no);
            if let Some(def) = schema_entry(k) {
                match parse_value(def.kind, v) {
                    Ok(val) => {
                        values.insert(def.key, val);
                    }
                    Err(m) => diags.push(Diagnostic::new(Some(line_no), Some(k), m)),
                }
            } else if let Some((idx, param)) = node_override(k) {
                match parse_value(Float, v) {
                    Ok(Value::Float(x)) => {
                        overrides.insert((idx, param.to_string()), x);
                    }
                    Ok(_) => unreachable!(),
                    Err(m) => diags.push(Diagnostic::new(Some(line_no), Some(k), m)),
                }
            } else {
                diags.push(Diagnostic::new(Some(line_no), Some(k), "unknown key"));
            }
        }
        for def in SCHEMA {
            if values.contains_key(def.key) {
                continue;
            }
            match def.default {
                Some(d) => {
                    values.insert(def.key, parse_value(def.kind, d).expect("schema defaults parse"));
                }
                None if !seen.contains_key(def.key) => {
                    diags.push(Diagnostic::new(None, Some(def.key), "missing required key"));
                }
                None => {}
            }
        }
        if diags.is_empty() {
            Ok(Config { values, overrides, lines: seen })
        } else {
            Err(diags)
        }
    }

    /// Line where `key` was set, if it was.
    pub fn line(&self, key: &str) -> Option<usize> {
        self.lines.get(key).copied()
    }

    fn get(&self, key: &str) -> &Value {
        self.values.get(key).unwrap_or_else(|| panic!("unknown config key {key}"))
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(v) => *v,
            v => panic!("{key} is not a float: {v:?}"),
        }
    }

    pub fn int(&self, key: &str) -> u64 {
        match self.get(key) {
            Value::Int(v) => *v,
            v => panic!("{key} is not an integer: {v:?}"),
        }
    }

    pub fn bool(&self, key: &str) -> bool {
        match self.get(key) {
            Value::Bool(v) => *v,
            v => panic!("{key} is not a bool: {v:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.get(key) {
            Value::Text(v) => v,
            v => panic!("{key} is not text: {v:?}"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Value::FloatList(v) => v,
            v => panic!("{key} is not a number list: {v:?}"),
        }
    }

    pub fn list(&self, key: &str) -> &[String] {
        match self.get(key) {
            Value::List(v) => v,
            v => panic!("{key} is not a list: {v:?}"),
        }
    }

    /// Per-node overrides as `((node, param), value)`.
    pub fn overrides(&self) -> impl Iterator<Item = (usize, &str, f64)> {
        self.overrides.iter().map(|((i, p), v)| (*i, p.as_str(), *v))
    }

    pub fn set(&mut self, key: &'static str, value: Value) {
        assert!(schema_entry(key).is_some(), "unknown config key {key}");
        self.values.insert(key, value);
    }

    /// Every key with its effective value, defaults included. Defaults
    /// taken from the reference circuit are tagged `# paper`.
    pub fn normalize(&self) -> String {
        let mut out = String::new();
        for def in SCHEMA {
            let v = self.get(def.key).canonical();
            let is_default = def
                .default
                .map(|d| parse_value(def.kind, d).expect("schema defaults parse").canonical() == v)
                .unwrap_or(false);
            out.push_str(def.key);
            out.push_str(" = ");
            out.push_str(&v);
            if def.paper && is_default {
                out.push_str("  # paper");
            }
            out.push('\n');
        }
        for ((i, p), v) in &self.overrides {
            out.push_str(&format!("node{i}.{p} = {v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = Config::parse("experiment = ber\n").unwrap();
        assert_eq!(c.int("ber.beta"), 64);
        assert_eq!(c.floats("ber.ebn0_db").len(), 9);
        let n = c.normalize();
        assert!(n.contains("ber.beta = 64\n"));
        assert!(n.contains("ber.ebn0_db = 0,2,4,6,8,10,12,14,16\n"));
        assert!(n.contains("node.gain = 0.7  # paper\n"));
        assert!(n.contains("topology.tau_c = 0.018  # paper\n"));
    }

    #[test]
    fn empty_names_missing_key() {
        let e = Config::parse("").unwrap_err();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].key.as_deref(), Some("experiment"));
        assert!(e[0].to_string().contains("missing required key"));
    }

    #[test]
    fn duplicate_reports_both_lines() {
        let e = Config::parse("experiment = ber\n# c\nseed = 1\nseed = 2\n").unwrap_err();
        assert_eq!(e.len(), 1);
        assert!(e[0].to_string().contains("lines 3 and 4"), "{}", e[0]);
    }

    #[test]
    fn errors_aggregate() {
        let e = Config::parse("experiment = nope\nfoo = 1\nseed = -3\nsim.step = abc\njunk\n").unwrap_err();
        assert_eq!(e.len(), 5);
        assert!(e[1].to_string().contains("foo: unknown key"));
    }

    #[test]
    fn overrides_parse() {
        let c = Config::parse("experiment = simulate\nnode1.tau_f = 0.015\n").unwrap();
        assert_eq!(c.overrides().collect::<Vec<_>>(), vec![(1, "tau_f", 0.015)]);
        assert!(c.normalize().ends_with("node1.tau_f = 0.015\n"));
        assert!(Config::parse("experiment = simulate\nnode1.speed = 1\n").is_err());
        assert!(Config::parse("experiment = simulate\nnodex.tau_f = 1\n").is_err());
    }

    #[test]
    fn changed_paper_value_loses_tag() {
        let c = Config::parse("experiment = simulate\nnode.kappa_f = 0.5\nnode.rc = 1e-3\n").unwrap();
        let n = c.normalize();
        assert!(n.contains("node.kappa_f = 0.5\n"));
        assert!(n.contains("node.rc = 0.001  # paper\n"));
    }

    #[test]
    fn normalize_round_trips() {
        let c = Config::parse("experiment = mask\nsim.step = 1e-5\nber.ebn0_db = 1.5, 3\nnode0.gain = 0.8\n").unwrap();
        let n = c.normalize();
        assert_eq!(Config::parse(&n).unwrap().normalize(), n);
    }
}
