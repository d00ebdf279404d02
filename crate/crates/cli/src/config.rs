//! Flat key-value run configuration: one file describes one run. Values
//! are rationals (`1`, `1/2`, `0.25`), bare words, or (nested) arrays;
//! players and type ids are 1-indexed in files and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use endnet_core::stability::Concept;
use endnet_core::Ratio64;

#[derive(Debug)]
pub struct ConfigError {
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        message: message.into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(Ratio64),
    Word(String),
    List(Vec<Value>),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Word(_) => "word",
            Value::List(_) => "array",
        }
    }
}

/// Raw parsed file: keys with line numbers and values.
pub struct RawConfig {
    entries: BTreeMap<String, (usize, Value)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (ix, raw_line) in text.lines().enumerate() {
            let line_no = ix + 1;
            let line = match raw_line.split_once('#') {
                Some((head, _)) => head,
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!("line {line_no}: expected `key = value`"));
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                return err(format!("line {line_no}: empty key"));
            }
            let value = parse_value(value.trim(), line_no)?;
            if entries.insert(key.clone(), (line_no, value)).is_some() {
                return err(format!("line {line_no}: duplicate key `{key}`"));
            }
        }
        Ok(RawConfig { entries })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key).map(|(_, v)| v)
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map(|(l, _)| *l).unwrap_or(0)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn parse_value(text: &str, line_no: usize) -> Result<Value, ConfigError> {
    let mut chars = text.char_indices().peekable();
    let value = parse_value_inner(text, &mut chars, line_no)?;
    if let Some((_, c)) = chars.find(|(_, c)| !c.is_whitespace()) {
        return err(format!("line {line_no}: unexpected `{c}` after value"));
    }
    Ok(value)
}

fn parse_value_inner(
    text: &str,
    chars: &mut std::iter::Peekable<std::str::CharIndices>,
    line_no: usize,
) -> Result<Value, ConfigError> {
    while let Some(&(_, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else {
            break;
        }
    }
    match chars.peek() {
        None => err(format!("line {line_no}: missing value")),
        Some(&(_, '[')) => {
            chars.next();
            let mut items = Vec::new();
            loop {
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || c == ',' {
                        chars.next();
                    } else {
                        break;
                    }
                }
                match chars.peek() {
                    None => return err(format!("line {line_no}: unterminated array")),
                    Some(&(_, ']')) => {
                        chars.next();
                        return Ok(Value::List(items));
                    }
                    _ => items.push(parse_value_inner(text, chars, line_no)?),
                }
            }
        }
        Some(&(start, _)) => {
            let mut end = start;
            while let Some(&(ix, c)) = chars.peek() {
                if c.is_whitespace() || c == ',' || c == ']' || c == '[' {
                    break;
                }
                end = ix + c.len_utf8();
                chars.next();
            }
            let token = &text[start..end];
            if token.is_empty() {
                return err(format!("line {line_no}: missing value"));
            }
            match Ratio64::parse(token) {
                Ok(r) => Ok(Value::Number(r)),
                Err(_)
                    if token
                        .chars()
                        .all(|c| c.is_alphanumeric() || c == '_' || c == '-') =>
                {
                    Ok(Value::Word(token.to_string()))
                }
                Err(_) => err(format!("line {line_no}: cannot parse `{token}`")),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Typed configuration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Solve,
    Enumerate,
    Classify,
    Dynamics,
    Thresholds,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Solve => "solve",
            CommandKind::Enumerate => "enumerate",
            CommandKind::Classify => "classify",
            CommandKind::Dynamics => "dynamics",
            CommandKind::Thresholds => "thresholds",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Tolerance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DynamicsKind {
    Uncoordinated,
    Revision,
}

#[derive(Clone, Debug)]
pub enum FamilyConfig {
    Lq {
        b: Vec<Ratio64>,
        alpha: Ratio64,
    },
    Status {
        n: usize,
        b: Ratio64,
        delta: Ratio64,
    },
    Table {
        grid: Vec<Ratio64>,
        v: Vec<Vec<Ratio64>>,
        g: Vec<Vec<Ratio64>>,
    },
    Nonexistence,
    GroupMatch {
        types: Vec<usize>,
        theta: Vec<Ratio64>,
        alpha: Ratio64,
        interval: (Ratio64, Ratio64),
    },
}

impl FamilyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyConfig::Lq { .. } => "lq",
            FamilyConfig::Status { .. } => "status",
            FamilyConfig::Table { .. } => "table",
            FamilyConfig::Nonexistence => "nonexistence",
            FamilyConfig::GroupMatch { .. } => "groupmatch",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            FamilyConfig::Lq { b, .. } => b.len(),
            FamilyConfig::Status { n, .. } => *n,
            FamilyConfig::Table { v, .. } => v.len(),
            FamilyConfig::Nonexistence => 2,
            FamilyConfig::GroupMatch { types, .. } => types.len(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum GraphSpec {
    Empty,
    Complete,
    /// 0-indexed edges.
    Edges(Vec<(usize, usize)>),
}

/// Fully validated run description.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub mode: Mode,
    pub concept: Concept,
    pub family: FamilyConfig,
    pub graph: Option<GraphSpec>,
    /// 0-indexed player blocks.
    pub partition: Option<Vec<Vec<usize>>>,
    pub actions: Option<Vec<Ratio64>>,
    pub kind: Option<DynamicsKind>,
    pub seed: Option<u64>,
    pub horizon: Option<usize>,
    pub lambda: Option<Ratio64>,
    pub discount: Option<Ratio64>,
    pub jobs: Option<usize>,
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_run_config(&text)
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw = RawConfig::parse(text)?;

    const KNOWN: &[&str] = &[
        "family",
        "command",
        "mode",
        "concept",
        "b",
        "alpha",
        "n",
        "delta",
        "grid",
        "v",
        "g",
        "types",
        "theta",
        "interval",
        "graph",
        "edges",
        "partition",
        "actions",
        "kind",
        "seed",
        "horizon",
        "lambda",
        "discount",
        "jobs",
    ];
    for key in raw.keys() {
        if !KNOWN.contains(&key) {
            return err(format!("line {}: unknown key `{key}`", raw.line(key)));
        }
    }

    let family_word = word(&raw, "family")?.ok_or_else(|| ConfigError {
        message: "missing `family` (lq | status | table | nonexistence | groupmatch)".into(),
    })?;
    let family = match family_word.as_str() {
        "lq" => {
            let b = number_list(&raw, "b")?.ok_or_else(|| ConfigError {
                message: "missing b".into(),
            })?;
            let alpha = number(&raw, "alpha")?.ok_or_else(|| ConfigError {
                message: "missing alpha".into(),
            })?;
            validate_alpha(alpha)?;
            FamilyConfig::Lq { b, alpha }
        }
        "status" => {
            let n = usize_field(&raw, "n")?.ok_or_else(|| ConfigError {
                message: "missing n".into(),
            })?;
            let b = number(&raw, "b")?.ok_or_else(|| ConfigError {
                message: "missing b".into(),
            })?;
            let delta = number(&raw, "delta")?.ok_or_else(|| ConfigError {
                message: "missing delta".into(),
            })?;
            FamilyConfig::Status { n, b, delta }
        }
        "table" => {
            let grid = number_list(&raw, "grid")?.ok_or_else(|| ConfigError {
                message: "missing grid".into(),
            })?;
            let v = number_table(&raw, "v")?.ok_or_else(|| ConfigError {
                message: "missing v".into(),
            })?;
            let g = number_table(&raw, "g")?.ok_or_else(|| ConfigError {
                message: "missing g".into(),
            })?;
            FamilyConfig::Table { grid, v, g }
        }
        "nonexistence" => FamilyConfig::Nonexistence,
        "groupmatch" => {
            let type_ids = number_list(&raw, "types")?.ok_or_else(|| ConfigError {
                message: "missing types".into(),
            })?;
            let theta = number_list(&raw, "theta")?.ok_or_else(|| ConfigError {
                message: "missing theta".into(),
            })?;
            let alpha = number(&raw, "alpha")?.ok_or_else(|| ConfigError {
                message: "missing alpha".into(),
            })?;
            validate_alpha(alpha)?;
            let interval = match number_list(&raw, "interval")? {
                Some(bounds) if bounds.len() == 2 => (bounds[0], bounds[1]),
                Some(_) => return err("interval must be [lo, hi]"),
                None => return err("missing interval"),
            };
            let types = type_ids
                .iter()
                .map(|r| {
                    to_index(r, theta.len()).ok_or_else(|| ConfigError {
                        message: format!(
                            "type id {r} outside 1..={} or not an integer",
                            theta.len()
                        ),
                    })
                })
                .collect::<Result<Vec<usize>, ConfigError>>()?;
            FamilyConfig::GroupMatch {
                types,
                theta,
                alpha,
                interval,
            }
        }
        other => return err(format!("unknown family `{other}`")),
    };

    let command = match word(&raw, "command")? {
        None => None,
        Some(w) => Some(match w.as_str() {
            "solve" => CommandKind::Solve,
            "enumerate" => CommandKind::Enumerate,
            "classify" => CommandKind::Classify,
            "dynamics" => CommandKind::Dynamics,
            "thresholds" => CommandKind::Thresholds,
            other => return err(format!("unknown command `{other}`")),
        }),
    };

    let mode = match word(&raw, "mode")?.as_deref() {
        None | Some("exact") => Mode::Exact,
        Some("tolerance") => Mode::Tolerance,
        Some(other) => return err(format!("unknown mode `{other}` (exact | tolerance)")),
    };

    let concept = match word(&raw, "concept")?.as_deref() {
        None | Some("pairwise") => Concept::Pairwise,
        Some("strict") => Concept::StrictPairwise,
        Some("pns") => Concept::PairwiseNash,
        Some(other) => {
            return err(format!(
                "unknown concept `{other}` (pairwise | strict | pns)"
            ))
        }
    };

    let n = family.n();
    let graph = match (word(&raw, "graph")?, raw.get("edges")) {
        (Some(_), Some(_)) => return err("give either `graph` or `edges`, not both"),
        (Some(w), None) => Some(match w.as_str() {
            "empty" => GraphSpec::Empty,
            "complete" => GraphSpec::Complete,
            other => return err(format!("unknown graph `{other}` (empty | complete)")),
        }),
        (None, Some(_)) => {
            let pairs = number_table(&raw, "edges")?.expect("present");
            let mut edges = Vec::new();
            for pair in &pairs {
                if pair.len() != 2 {
                    return err("each edge must be [i, j]");
                }
                let a = to_index(&pair[0], n).ok_or_else(|| ConfigError {
                    message: format!("bad player id {}", pair[0]),
                })?;
                let b = to_index(&pair[1], n).ok_or_else(|| ConfigError {
                    message: format!("bad player id {}", pair[1]),
                })?;
                edges.push((a, b));
            }
            Some(GraphSpec::Edges(edges))
        }
        (None, None) => None,
    };

    let partition = match raw.get("partition") {
        None => None,
        Some(_) => {
            let blocks = number_table(&raw, "partition")?.expect("present");
            let mut out = Vec::new();
            for block in &blocks {
                let ids = block
                    .iter()
                    .map(|r| {
                        to_index(r, n).ok_or_else(|| ConfigError {
                            message: format!("bad player id {r} in partition"),
                        })
                    })
                    .collect::<Result<Vec<usize>, ConfigError>>()?;
                out.push(ids);
            }
            Some(out)
        }
    };

    let kind = match word(&raw, "kind")?.as_deref() {
        None => None,
        Some("uncoordinated") => Some(DynamicsKind::Uncoordinated),
        Some("revision") => Some(DynamicsKind::Revision),
        Some(other) => return err(format!("unknown kind `{other}` (uncoordinated | revision)")),
    };

    Ok(RunConfig {
        command,
        mode,
        concept,
        family,
        graph,
        partition,
        actions: number_list(&raw, "actions")?,
        kind,
        seed: u64_field(&raw, "seed")?,
        horizon: usize_field(&raw, "horizon")?,
        lambda: number(&raw, "lambda")?,
        discount: number(&raw, "discount")?,
        jobs: usize_field(&raw, "jobs")?,
    })
}

fn validate_alpha(alpha: Ratio64) -> Result<(), ConfigError> {
    let v = alpha.to_scalar::<f64>();
    if !(0.0..=1.0).contains(&v) {
        return err("alpha outside [0,1]");
    }
    Ok(())
}

/// Converts a 1-indexed rational id to a 0-indexed position.
fn to_index(r: &Ratio64, n: usize) -> Option<usize> {
    if r.den() != 1 || r.num() < 1 || r.num() > n as i64 {
        return None;
    }
    Some(r.num() as usize - 1)
}

fn word(raw: &RawConfig, key: &str) -> Result<Option<String>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Value::Word(w)) => Ok(Some(w.clone())),
        Some(v) => err(format!(
            "line {}: `{key}` must be a word, found {}",
            raw.line(key),
            v.kind()
        )),
    }
}

fn number(raw: &RawConfig, key: &str) -> Result<Option<Ratio64>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Value::Number(r)) => Ok(Some(*r)),
        Some(v) => err(format!(
            "line {}: `{key}` must be a number, found {}",
            raw.line(key),
            v.kind()
        )),
    }
}

fn number_list(raw: &RawConfig, key: &str) -> Result<Option<Vec<Ratio64>>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Value::List(items)) => items
            .iter()
            .map(|item| match item {
                Value::Number(r) => Ok(*r),
                other => err(format!(
                    "line {}: `{key}` must contain numbers, found {}",
                    raw.line(key),
                    other.kind()
                )),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(v) => err(format!(
            "line {}: `{key}` must be an array, found {}",
            raw.line(key),
            v.kind()
        )),
    }
}

fn number_table(raw: &RawConfig, key: &str) -> Result<Option<Vec<Vec<Ratio64>>>, ConfigError> {
    match raw.get(key) {
        None => Ok(None),
        Some(Value::List(rows)) => rows
            .iter()
            .map(|row| match row {
                Value::List(items) => items
                    .iter()
                    .map(|item| match item {
                        Value::Number(r) => Ok(*r),
                        other => err(format!(
                            "line {}: `{key}` rows must contain numbers, found {}",
                            raw.line(key),
                            other.kind()
                        )),
                    })
                    .collect::<Result<Vec<_>, _>>(),
                other => err(format!(
                    "line {}: `{key}` must be an array of arrays, found row of {}",
                    raw.line(key),
                    other.kind()
                )),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some),
        Some(v) => err(format!(
            "line {}: `{key}` must be an array, found {}",
            raw.line(key),
            v.kind()
        )),
    }
}

fn usize_field(raw: &RawConfig, key: &str) -> Result<Option<usize>, ConfigError> {
    match number(raw, key)? {
        None => Ok(None),
        Some(r) if r.den() == 1 && r.num() >= 0 => Ok(Some(r.num() as usize)),
        Some(r) => err(format!("`{key}` must be a nonnegative integer, found {r}")),
    }
}

fn u64_field(raw: &RawConfig, key: &str) -> Result<Option<u64>, ConfigError> {
    match number(raw, key)? {
        None => Ok(None),
        Some(r) if r.den() == 1 && r.num() >= 0 => Ok(Some(r.num() as u64)),
        Some(r) => err(format!("`{key}` must be a nonnegative integer, found {r}")),
    }
}
