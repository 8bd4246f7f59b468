//! Experiment configuration: a flat `key = value` text format.
//!
//! ```text
//! # comment
//! [sweep]
//! topologies = heavy_hex, grid(5x8), ring
//! n_values = 30, 40
//! k = 20
//! l_values = 1, 3
//! methods = unitary, line_dynamic, group_mv
//!
//! [noise]
//! p_1q = 0.0001
//! ```
//!
//! Lists are comma separated, sections are bracketed, and unknown sections or
//! keys are errors. Keys before the first section belong to `[sweep]`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::FidelityMitigation;
use crate::error::{Error, Result};
use crate::sim::NoiseModel;
use crate::synth::Method;
use crate::topology::{self, CouplingGraph, GraphKind};

/// Which coupling graph a sweep point runs on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologySpec {
    /// Sized from N: smallest grid / heavy-hex lattice with at least N
    /// nodes, or a ring of exactly N.
    Auto(GraphKind),
    Grid(usize, usize),
    HeavyHex(usize, usize),
    Ring(usize),
    /// Edge-list file (see `CouplingGraph::parse_edge_list`).
    File(PathBuf),
}

impl TopologySpec {
    pub fn build(&self, n: usize) -> Result<CouplingGraph> {
        match self {
            TopologySpec::Auto(GraphKind::Grid) => topology::grid_for_nodes(n),
            TopologySpec::Auto(GraphKind::HeavyHex) => topology::heavy_hex_for_nodes(n),
            TopologySpec::Auto(_) => topology::make_ring(n),
            TopologySpec::Grid(r, c) => topology::make_grid(*r, *c),
            TopologySpec::HeavyHex(r, c) => topology::make_heavy_hex(*r, *c),
            TopologySpec::Ring(m) => topology::make_ring(*m),
            TopologySpec::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                CouplingGraph::parse_edge_list(&text)
            }
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Auto(k) => f.write_str(k.name()),
            TopologySpec::Grid(r, c) => write!(f, "grid({r}x{c})"),
            TopologySpec::HeavyHex(r, c) => write!(f, "heavy_hex({r}x{c})"),
            TopologySpec::Ring(m) => write!(f, "ring({m})"),
            TopologySpec::File(p) => write!(f, "file({})", p.display()),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (name, arg) = match s.split_once('(') {
            Some((name, rest)) => {
                let arg = rest.strip_suffix(')').ok_or_else(|| format!("missing `)` in `{s}`"))?;
                (name.trim(), Some(arg.trim()))
            }
            None => (s, None),
        };
        let pair = |a: &str| -> std::result::Result<(usize, usize), String> {
            let (x, y) = a.split_once('x').ok_or_else(|| format!("expected `RxC`, got `{a}`"))?;
            let p = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size `{t}`"));
            Ok((p(x)?, p(y)?))
        };
        match (name, arg) {
            ("grid", None) => Ok(TopologySpec::Auto(GraphKind::Grid)),
            ("heavy_hex" | "heavyhex", None) => Ok(TopologySpec::Auto(GraphKind::HeavyHex)),
            ("ring", None) => Ok(TopologySpec::Auto(GraphKind::Ring)),
            ("grid", Some(a)) => pair(a).map(|(r, c)| TopologySpec::Grid(r, c)),
            ("heavy_hex" | "heavyhex", Some(a)) => pair(a).map(|(r, c)| TopologySpec::HeavyHex(r, c)),
            ("ring", Some(a)) => a.parse().map(TopologySpec::Ring).map_err(|_| format!("bad ring size `{a}`")),
            ("file", Some(a)) => Ok(TopologySpec::File(PathBuf::from(a))),
            _ => Err(format!("unknown topology `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FidelityConfig {
    pub enabled: bool,
    /// Restrict fidelity estimation to these N (empty: every N).
    pub n_values: Vec<usize>,
    pub elements: usize,
    pub shots_per_element: usize,
    pub mitigation: FidelityMitigation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: bool,
    pub svg: bool,
    pub dump_circuits: bool,
    pub dump_plans: bool,
    pub raw_shots: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub topologies: Vec<TopologySpec>,
    pub n_values: Vec<usize>,
    pub k: usize,
    pub l_values: Vec<usize>,
    pub methods: Vec<Method>,
    pub noise: NoiseModel,
    pub shots: usize,
    pub repetitions: usize,
    pub restarts: usize,
    pub master_seed: u64,
    /// Apply readout mitigation to final measurements.
    pub mitigate: bool,
    pub fidelity: FidelityConfig,
    pub output: OutputConfig,
    /// `section.key = value` lines for every default that was applied.
    pub defaults_applied: Vec<String>,
}

const SECTIONS: [&str; 4] = ["sweep", "noise", "fidelity", "output"];

fn known_keys(section: &str) -> &'static [&'static str] {
    match section {
        "sweep" => &["topologies", "n_values", "k", "l_values", "methods", "shots", "repetitions", "restarts", "master_seed", "mitigate"],
        "noise" => &["enabled", "p_1q", "p_2q", "p_ro", "readout_on_reset"],
        "fidelity" => &["enabled", "n_values", "elements", "shots_per_element", "mitigation"],
        "output" => &["dir", "csv", "svg", "dump_circuits", "dump_plans", "raw_shots"],
        _ => &[],
    }
}

/// Raw `(section, key) -> (line, value)` table.
type Table = BTreeMap<(String, String), (usize, String)>;

fn parse_table(text: &str) -> Result<Table> {
    let mut table = Table::new();
    let mut section = "sweep".to_string();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(rest) = l.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::ConfigParse { line, msg: format!("malformed section header `{l}`") })?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(Error::ConfigParse { line, msg: format!("unknown section `[{name}]`") });
            }
            section = name.to_string();
            continue;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| Error::ConfigParse { line, msg: format!("expected `key = value`, got `{l}`") })?;
        let key = k.trim().to_string();
        if !known_keys(&section).contains(&key.as_str()) {
            return Err(Error::ConfigParse { line, msg: format!("unknown key `{key}` in [{section}]") });
        }
        if table.insert((section.clone(), key.clone()), (line, v.trim().to_string())).is_some() {
            return Err(Error::ConfigParse { line, msg: format!("duplicate key `{key}` in [{section}]") });
        }
    }
    Ok(table)
}

struct Reader {
    table: Table,
    defaults: Vec<String>,
}

impl Reader {
    fn raw(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.table.get(&(section.to_string(), key.to_string()))
    }

    fn get<T: FromStr + fmt::Display>(&mut self, section: &str, key: &str, default: Option<T>) -> Result<T> {
        match self.raw(section, key) {
            Some((line, v)) => v.parse::<T>().map_err(|_| Error::ConfigParse {
                line: *line,
                msg: format!("cannot parse `{v}` for {section}.{key}"),
            }),
            None => match default {
                Some(d) => {
                    self.defaults.push(format!("{section}.{key} = {d}"));
                    Ok(d)
                }
                None => Err(Error::ConfigValidation { field: format!("{section}.{key}"), msg: "required key missing".into() }),
            },
        }
    }

    fn list<T: FromStr>(&mut self, section: &str, key: &str, default: Option<Vec<T>>) -> Result<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        match self.raw(section, key) {
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<T>().map_err(|e| Error::ConfigParse { line: *line, msg: format!("{section}.{key}: `{t}`: {e}") })
                })
                .collect(),
            None => match default {
                Some(d) => {
                    self.defaults.push(format!("{section}.{key} = (default)"));
                    Ok(d)
                }
                None => Err(Error::ConfigValidation { field: format!("{section}.{key}"), msg: "required key missing".into() }),
            },
        }
    }
}

fn invalid(field: &str, msg: impl Into<String>) -> Error {
    Error::ConfigValidation { field: field.to_string(), msg: msg.into() }
}

/// Parse and validate config text. Relative topology file paths resolve
/// against `base`; the output directory is used as given.
pub fn parse_config(text: &str, base: &Path) -> Result<ExperimentConfig> {
    let mut r = Reader { table: parse_table(text)?, defaults: Vec::new() };
    let topologies: Vec<TopologySpec> = r.list("sweep", "topologies", None)?;
    let topologies = topologies
        .into_iter()
        .map(|t| match t {
            TopologySpec::File(p) if p.is_relative() => TopologySpec::File(base.join(p)),
            other => other,
        })
        .collect();
    let n_values: Vec<usize> = r.list("sweep", "n_values", None)?;
    let k: usize = r.get("sweep", "k", None)?;
    let l_values: Vec<usize> = r.list("sweep", "l_values", Some(vec![1]))?;
    let methods: Vec<Method> = r.list("sweep", "methods", Some(Method::ALL.to_vec()))?;
    let shots = r.get("sweep", "shots", Some(10_000usize))?;
    let repetitions = r.get("sweep", "repetitions", Some(10usize))?;
    let restarts = r.get("sweep", "restarts", Some(8usize))?;
    let master_seed = r.get("sweep", "master_seed", Some(0u64))?;
    let mitigate = r.get("sweep", "mitigate", Some(true))?;

    let noise = NoiseModel {
        enabled: r.get("noise", "enabled", Some(true))?,
        p_1q: r.get("noise", "p_1q", Some(0.0))?,
        p_2q: r.get("noise", "p_2q", Some(0.0))?,
        p_ro: r.get("noise", "p_ro", Some(0.0))?,
        readout_on_reset: r.get("noise", "readout_on_reset", Some(false))?,
    };

    let mitigation: String = r.get("fidelity", "mitigation", Some("full".to_string()))?;
    let fidelity = FidelityConfig {
        enabled: r.get("fidelity", "enabled", Some(false))?,
        n_values: r.list("fidelity", "n_values", Some(Vec::new()))?,
        elements: r.get("fidelity", "elements", Some(200usize))?,
        shots_per_element: r.get("fidelity", "shots_per_element", Some(256usize))?,
        mitigation: mitigation.parse().map_err(|e: Error| invalid("fidelity.mitigation", e.to_string()))?,
    };

    let dir: String = r.get("output", "dir", Some("results".to_string()))?;
    let dir = PathBuf::from(dir);
    let output = OutputConfig {
        dir,
        csv: r.get("output", "csv", Some(true))?,
        svg: r.get("output", "svg", Some(false))?,
        dump_circuits: r.get("output", "dump_circuits", Some(false))?,
        dump_plans: r.get("output", "dump_plans", Some(false))?,
        raw_shots: r.get("output", "raw_shots", Some(false))?,
    };

    let cfg = ExperimentConfig {
        topologies,
        n_values,
        k,
        l_values,
        methods,
        noise,
        shots,
        repetitions,
        restarts,
        master_seed,
        mitigate,
        fidelity,
        output,
        defaults_applied: r.defaults,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Read, parse and validate a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.topologies.is_empty() {
            return Err(invalid("sweep.topologies", "list is empty"));
        }
        if self.n_values.is_empty() {
            return Err(invalid("sweep.n_values", "list is empty"));
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return Err(invalid("sweep.n_values", format!("N={n} is below 2")));
        }
        if self.k < 2 {
            return Err(invalid("sweep.k", format!("k={} must be at least 2", self.k)));
        }
        if self.l_values.is_empty() {
            return Err(invalid("sweep.l_values", "list is empty"));
        }
        for &l in &self.l_values {
            if l == 2 {
                return Err(invalid("sweep.l_values", "L=2 disallowed"));
            }
            if l % 2 == 0 {
                return Err(invalid("sweep.l_values", format!("L={l} must be odd")));
            }
        }
        if self.methods.is_empty() {
            return Err(invalid("sweep.methods", "list is empty"));
        }
        if self.shots == 0 {
            return Err(invalid("sweep.shots", "must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(invalid("sweep.repetitions", "must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(invalid("sweep.restarts", "must be at least 1"));
        }
        self.noise.validate().map_err(|e| invalid("noise", e.to_string()))?;
        if self.mitigate && self.noise.readout() >= 0.5 {
            return Err(invalid("noise.p_ro", "mitigation needs p_ro < 0.5"));
        }
        if self.fidelity.enabled && (self.fidelity.elements == 0 || self.fidelity.shots_per_element == 0) {
            return Err(invalid("fidelity", "elements and shots_per_element must be at least 1"));
        }
        Ok(())
    }

    /// Whether fidelity is estimated at this N.
    pub fn fidelity_at(&self, n: usize) -> bool {
        self.fidelity.enabled && (self.fidelity.n_values.is_empty() || self.fidelity.n_values.contains(&n))
    }
}
