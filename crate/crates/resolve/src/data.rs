//! Loading the shipped chart tower, blow-up centers and group elements.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use resolve_core::chart::{CenterSpec, ChartPresentation, ParentMap, SymplecticElement, Tower};
use resolve_core::ideal::Ideal;
use resolve_core::poly::{parse, PolyMatrix, Polynomial, VarRegistry};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Charts in tower order.
pub const CHART_FILES: [&str; 7] = ["L0", "T0", "T1", "T2", "T3", "T4", "T5"];

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error("{file}:{line}:{column}: {message}")]
    Json { file: String, line: usize, column: usize, message: String },
    #[error("{file}: schema version {found}, expected {SCHEMA_VERSION}")]
    Schema { file: String, found: u32 },
    #[error("{file}: {path}: {message}")]
    Field { file: String, path: String, message: String },
}

/// Directory holding the JSON files: `RESOLVE_DATA_DIR`, else the workspace
/// `data/` directory.
pub fn data_dir() -> PathBuf {
    match std::env::var_os("RESOLVE_DATA_DIR") {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartFile {
    schema_version: u32,
    name: String,
    parent: Option<String>,
    torus_rank: usize,
    variables: Vec<VariableEntry>,
    monomial: Vec<String>,
    equations: Vec<String>,
    excluded: Vec<Vec<String>>,
    substitution: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableEntry {
    name: String,
    weights: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterEntry {
    pub chart: String,
    pub generators: Vec<String>,
    pub fresh: Vec<String>,
    pub result: String,
    #[serde(default)]
    pub denominator: Option<String>,
    /// Jacobian rows as printed in the source, for side-by-side comparison.
    #[serde(default)]
    pub printed_rows: Vec<PrintedRow>,
}

/// Nonzero entries `∂g/∂var` of the row of center generator `generator`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrintedRow {
    pub generator: usize,
    pub entries: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepEntry {
    pub step: u32,
    pub chart: String,
    pub result: String,
    /// Restrict to this open before blowing up.
    #[serde(default)]
    pub open: Option<String>,
    /// Centers on the (restricted) base chart, for certification.
    pub centers: Vec<CenterEntry>,
    /// Sequences of single-center blow-ups producing `result`.
    pub orders: Vec<Vec<CenterEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CentersFile {
    schema_version: u32,
    steps: Vec<StepEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementEntry {
    name: String,
    #[serde(default)]
    levi: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    unipotent: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringEntry {
    pub chart: String,
    pub open: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementsFile {
    schema_version: u32,
    g: usize,
    elements: Vec<ElementEntry>,
    covering: CoveringEntry,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseEntry {
    pub name: String,
    pub of: String,
}

/// A named abbreviation: an expression, a determinant, or the pull-back of
/// a root-coordinate expression (which may use `dij` and `detA`).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionEntry {
    pub name: String,
    #[serde(default)]
    pub expr: Option<String>,
    #[serde(default)]
    pub det: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub pullback: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityEntry {
    pub name: String,
    pub chart: String,
    pub inverses: Vec<InverseEntry>,
    pub definitions: Vec<DefinitionEntry>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "lowercase")]
pub enum DeductionEntry {
    Invertible(String),
    Vanishes(String),
}

/// One rung of the local model. Table keys are row indices written as
/// digits (`"125"`); entries may refer to earlier entries as `M125` and
/// root-coordinate entries of `printed_m` to earlier ones as `m125`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalModelEntry {
    pub k: usize,
    pub chart: String,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub unit_factor: String,
    pub inverses: Vec<InverseEntry>,
    pub definitions: Vec<DefinitionEntry>,
    pub table: BTreeMap<String, String>,
    pub printed_m: BTreeMap<String, String>,
    pub targets: Vec<String>,
    #[serde(default)]
    pub script: Vec<DeductionEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlueckerFile {
    schema_version: u32,
    pub identities: Vec<IdentityEntry>,
    pub steps: Vec<LocalModelEntry>,
}

/// Everything under the data directory.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub tower: Tower,
    pub steps: Vec<StepEntry>,
    pub elements: Vec<(String, SymplecticElement)>,
    pub covering: CoveringEntry,
    pub pluecker: PlueckerFile,
}

fn read_json<T: for<'de> Deserialize<'de>>(dir: &Path, file: &str) -> Result<T, DataError> {
    let path = dir.join(file);
    let text = fs::read_to_string(&path).map_err(|source| DataError::Io { file: file.into(), source })?;
    serde_json::from_str(&text).map_err(|e| DataError::Json {
        file: file.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn field(file: &str, path: impl Into<String>, message: impl ToString) -> DataError {
    DataError::Field { file: file.into(), path: path.into(), message: message.to_string() }
}

fn check_schema(file: &str, found: u32) -> Result<(), DataError> {
    if found == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(DataError::Schema { file: file.into(), found })
    }
}

fn poly_at(file: &str, path: String, text: &str, reg: &std::sync::Arc<VarRegistry>) -> Result<Polynomial, DataError> {
    parse(text, reg).map_err(|e| field(file, path, e))
}

/// Parses one chart file; substitution images are read in this chart's
/// registry, keys are checked against `parent` when given.
pub fn parse_chart(file: &str, text: &str, parent: Option<&ChartPresentation>) -> Result<ChartPresentation, DataError> {
    let raw: ChartFile = serde_json::from_str(text).map_err(|e| DataError::Json {
        file: file.into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    check_schema(file, raw.schema_version)?;
    let reg = VarRegistry::new(raw.variables.iter().map(|v| v.name.as_str())).map_err(|e| field(file, "variables", e))?;
    for (i, v) in raw.variables.iter().enumerate() {
        if v.weights.len() != raw.torus_rank {
            return Err(field(
                file,
                format!("variables[{i}].weights"),
                format!("{} weights for torus rank {}", v.weights.len(), raw.torus_rank),
            ));
        }
    }
    let monomial = raw
        .monomial
        .iter()
        .enumerate()
        .map(|(i, m)| reg.index_of(m).ok_or_else(|| field(file, format!("monomial[{i}]"), format!("unknown variable `{m}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    if monomial.is_empty() {
        return Err(field(file, "monomial", "empty monomial relation"));
    }
    let equations = raw
        .equations
        .iter()
        .enumerate()
        .map(|(i, e)| poly_at(file, format!("equations[{i}]"), e, &reg))
        .collect::<Result<Vec<_>, _>>()?;
    let mut excluded = Vec::new();
    for (k, e) in raw.excluded.iter().enumerate() {
        let gens = e
            .iter()
            .enumerate()
            .map(|(i, g)| poly_at(file, format!("excluded[{k}][{i}]"), g, &reg))
            .collect::<Result<Vec<_>, _>>()?;
        excluded.push(Ideal::new(&reg, gens).map_err(|err| field(file, format!("excluded[{k}]"), err))?);
    }
    let parent_map = match &raw.parent {
        None => {
            if !raw.substitution.is_empty() {
                return Err(field(file, "substitution", "substitution without a parent"));
            }
            None
        }
        Some(pn) => {
            if let Some(p) = parent {
                if &p.name != pn {
                    return Err(field(file, "parent", format!("expected `{}`", p.name)));
                }
                for k in raw.substitution.keys() {
                    if !p.reg.contains(k) {
                        return Err(field(file, format!("substitution.{k}"), format!("`{k}` is not a coordinate of `{pn}`")));
                    }
                }
            }
            let mut substitution = BTreeMap::new();
            for (k, v) in &raw.substitution {
                substitution.insert(k.clone(), poly_at(file, format!("substitution.{k}"), v, &reg)?);
            }
            Some(ParentMap { name: pn.clone(), substitution })
        }
    };
    Ok(ChartPresentation {
        name: raw.name,
        reg,
        torus_rank: raw.torus_rank,
        weights: raw.variables.into_iter().map(|v| v.weights).collect(),
        monomial,
        equations,
        excluded,
        parent: parent_map,
    })
}

pub fn load_tower(dir: &Path) -> Result<Tower, DataError> {
    let mut tower = Tower::new(Vec::new());
    let mut prev: Option<ChartPresentation> = None;
    for name in CHART_FILES {
        let file = format!("{name}.json");
        let text = fs::read_to_string(dir.join(&file)).map_err(|source| DataError::Io { file: file.clone(), source })?;
        let c = parse_chart(&file, &text, prev.as_ref())?;
        if c.name != name {
            return Err(field(&file, "name", format!("expected `{name}`")));
        }
        tower.push(c.clone());
        prev = Some(c);
    }
    Ok(tower)
}

pub fn load_steps(dir: &Path) -> Result<Vec<StepEntry>, DataError> {
    let raw: CentersFile = read_json(dir, "centers.json")?;
    check_schema("centers.json", raw.schema_version)?;
    Ok(raw.steps)
}

pub fn load_elements(dir: &Path) -> Result<(Vec<(String, SymplecticElement)>, CoveringEntry), DataError> {
    const FILE: &str = "elements.json";
    let raw: ElementsFile = read_json(dir, FILE)?;
    check_schema(FILE, raw.schema_version)?;
    let reg = resolve_core::schubert::big_cell_registry(raw.g).map_err(|e| field(FILE, "g", e))?;
    let mut out = Vec::new();
    for (i, e) in raw.elements.iter().enumerate() {
        let el = match (&e.levi, &e.unipotent) {
            (Some(gamma), None) => {
                let rows: Vec<&[i64]> = gamma.iter().map(Vec::as_slice).collect();
                SymplecticElement::levi(&rows)
            }
            (None, Some(n)) => {
                let rows = n
                    .iter()
                    .enumerate()
                    .map(|(r, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(c, s)| poly_at(FILE, format!("elements[{i}].unipotent[{r}][{c}]"), s, &reg))
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let m = PolyMatrix::from_rows(&reg, rows).map_err(|err| field(FILE, format!("elements[{i}]"), err))?;
                SymplecticElement::unipotent(m)
            }
            _ => return Err(field(FILE, format!("elements[{i}]"), "exactly one of `levi`, `unipotent` is required")),
        }
        .map_err(|err| field(FILE, format!("elements[{i}]"), err))?;
        if el.g != raw.g {
            return Err(field(FILE, format!("elements[{i}]"), format!("genus {} differs from {}", el.g, raw.g)));
        }
        out.push((e.name.clone(), el));
    }
    Ok((out, raw.covering))
}

impl Dataset {
    pub fn load(dir: &Path) -> Result<Self, DataError> {
        let tower = load_tower(dir)?;
        let steps = load_steps(dir)?;
        let (elements, covering) = load_elements(dir)?;
        let pluecker: PlueckerFile = read_json(dir, "pluecker.json")?;
        check_schema("pluecker.json", pluecker.schema_version)?;
        let ds = Dataset { tower, steps, elements, covering, pluecker };
        ds.check_references()?;
        Ok(ds)
    }

    pub fn load_default() -> Result<Self, DataError> {
        Self::load(&data_dir())
    }

    fn check_references(&self) -> Result<(), DataError> {
        const FILE: &str = "centers.json";
        for (i, s) in self.steps.iter().enumerate() {
            for (what, name) in [("chart", &s.chart), ("result", &s.result)] {
                if self.tower.get(name).is_err() {
                    return Err(field(FILE, format!("steps[{i}].{what}"), format!("unknown chart `{name}`")));
                }
            }
            if s.orders.is_empty() || s.centers.is_empty() {
                return Err(field(FILE, format!("steps[{i}]"), "no centers"));
            }
        }
        if self.tower.get(&self.covering.chart).is_err() {
            return Err(field("elements.json", "covering.chart", format!("unknown chart `{}`", self.covering.chart)));
        }
        let charts = self.pluecker.identities.iter().map(|e| &e.chart).chain(self.pluecker.steps.iter().map(|e| &e.chart));
        for (i, name) in charts.enumerate() {
            if self.tower.get(name).is_err() {
                return Err(field("pluecker.json", format!("entry {i}"), format!("unknown chart `{name}`")));
            }
        }
        Ok(())
    }

    pub fn step(&self, k: u32) -> Option<&StepEntry> {
        self.steps.iter().find(|s| s.step == k)
    }

    pub fn chart(&self, name: &str) -> Option<&ChartPresentation> {
        self.tower.get(name).ok()
    }
}

impl CenterEntry {
    /// The center as a [`CenterSpec`] over `chart`'s registry.
    pub fn spec(&self, chart: &ChartPresentation) -> Result<CenterSpec, DataError> {
        let file = "centers.json";
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| poly_at(file, format!("{}.generators[{i}]", self.chart), g, &chart.reg))
            .collect::<Result<Vec<_>, _>>()?;
        let denominator = match &self.denominator {
            Some(d) => Some(poly_at(file, format!("{}.denominator", self.chart), d, &chart.reg)?),
            None => None,
        };
        Ok(CenterSpec { chart: chart.name.clone(), generators, denominator, fresh_names: self.fresh.clone() })
    }
}
