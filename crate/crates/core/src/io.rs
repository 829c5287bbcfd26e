//! JSON file formats. Configurations and ancilla values are 1-based on disk
//! and 0-based in memory; matrices are arrays of columns.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{DynamicsRepr, MatrixFamily, ProbabilityDynamics};
use crate::error::{Error, Result};
use crate::implementation::{FamilyGenerator, GeneratorKind, ProcessFamily};
use crate::quantum::{CMatrix, UnitaryFamily};
use crate::scalar::Scalar;
use crate::simplex::{Matrix, ProbVector, StochasticMatrix};
use crate::statistical::{DeterministicSystem, SystemAncilla};
use crate::trajectory::{Time, TimeGrid, TrajectoryMeasure};

pub const SCHEMA_NAMES: [&str; 6] = ["dynamics", "measure", "family", "detsystem", "ancilla", "unitary"];

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_pretty(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report values serialize")
}

fn one_based(config: usize, n: usize) -> Result<usize> {
    if config == 0 || config > n {
        return Err(Error::BadConfig { config, n });
    }
    Ok(config - 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub traj: Vec<usize>,
    pub p: Scalar,
}

/// Sparse trajectory table; omitted trajectories weigh 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub grid: Vec<Time>,
    pub n: usize,
    pub table: Vec<WeightEntry>,
}

impl MeasureFile {
    pub fn from_measure(mu: &TrajectoryMeasure) -> Self {
        let table =
            mu.support().into_iter().map(|(traj, p)| WeightEntry { traj: traj.iter().map(|c| c + 1).collect(), p }).collect();
        MeasureFile { grid: mu.grid().times().to_vec(), n: mu.n_configs(), table }
    }

    pub fn to_measure(&self) -> Result<TrajectoryMeasure> {
        let grid = TimeGrid::new(self.grid.clone())?;
        let mut seen = BTreeSet::new();
        let mut entries = Vec::with_capacity(self.table.len());
        for e in &self.table {
            if e.traj.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), found: e.traj.len() });
            }
            let traj = e.traj.iter().map(|&c| one_based(c, self.n)).collect::<Result<Vec<_>>>()?;
            if !seen.insert(traj.clone()) {
                return Err(Error::Schema(format!("trajectory {:?} listed twice", e.traj)));
            }
            entries.push((traj, e.p.clone()));
        }
        TrajectoryMeasure::from_entries(grid, self.n, entries)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Each inner array is a column (a probability vector).
    #[default]
    Columns,
    /// Each inner array is a row; transposed on load.
    Rows,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedPoint {
    pub p0: ProbVector,
    pub trajectory: Vec<ProbVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsFile {
    MatrixFamily {
        grid: Vec<Time>,
        n: usize,
        matrices: Vec<Matrix>,
        #[serde(default, skip_serializing_if = "is_columns")]
        convention: Convention,
    },
    Tabulated {
        grid: Vec<Time>,
        n: usize,
        points: Vec<TabulatedPoint>,
    },
}

fn is_columns(c: &Convention) -> bool {
    *c == Convention::Columns
}

impl DynamicsFile {
    pub fn from_family(fam: &MatrixFamily) -> Self {
        DynamicsFile::MatrixFamily {
            grid: fam.grid().times().to_vec(),
            n: fam.n(),
            matrices: fam.matrices().iter().map(|m| m.matrix().clone()).collect(),
            convention: Convention::Columns,
        }
    }

    pub fn from_dynamics(dynamics: &ProbabilityDynamics) -> Result<Self> {
        match dynamics.repr() {
            DynamicsRepr::Matrix(fam) => Ok(DynamicsFile::from_family(fam)),
            DynamicsRepr::Tabulated(map) => Ok(DynamicsFile::Tabulated {
                grid: dynamics.grid().times().to_vec(),
                n: dynamics.n(),
                points: map
                    .entries()
                    .iter()
                    .map(|(p0, traj)| TabulatedPoint { p0: p0.clone(), trajectory: traj.clone() })
                    .collect(),
            }),
            DynamicsRepr::BlackBox(_) => Err(Error::Schema("closure-backed dynamics cannot be written".into())),
        }
    }

    pub fn to_dynamics(&self) -> Result<ProbabilityDynamics> {
        match self {
            DynamicsFile::MatrixFamily { grid, n, matrices, convention } => {
                let grid = TimeGrid::new(grid.clone())?;
                let ms = matrices
                    .iter()
                    .map(|m| {
                        let m = if *convention == Convention::Rows { m.transpose() } else { m.clone() };
                        if m.rows() != *n || m.cols() != *n {
                            return Err(Error::DimensionMismatch { expected: *n, found: m.rows().max(m.cols()) });
                        }
                        StochasticMatrix::new(m)
                    })
                    .collect::<Result<Vec<_>>>()?;
                if ms.first().is_none_or(|m| !m.matrix().is_identity()) {
                    return Err(Error::Schema("P(0) must be the identity".into()));
                }
                if grid.times()[0] != 0 {
                    return Err(Error::Schema("grid must start at 0".into()));
                }
                Ok(ProbabilityDynamics::from_matrices(MatrixFamily::new(grid, ms)?))
            }
            DynamicsFile::Tabulated { grid, n, points } => {
                let grid = TimeGrid::new(grid.clone())?;
                let mut entries = BTreeMap::new();
                for pt in points {
                    if entries.insert(pt.p0.clone(), pt.trajectory.clone()).is_some() {
                        return Err(Error::Schema(format!("initial vector {} listed twice", pt.p0)));
                    }
                }
                ProbabilityDynamics::tabulated(grid, *n, entries)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyMember {
    pub p0: ProbVector,
    pub measure: MeasureFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub grid: Vec<Time>,
    pub n: usize,
    pub members: Vec<FamilyMember>,
    #[serde(default)]
    pub generator: Option<String>,
}

impl FamilyFile {
    pub fn from_family(fam: &ProcessFamily) -> Self {
        FamilyFile {
            grid: fam.grid().times().to_vec(),
            n: fam.n(),
            members: fam
                .members()
                .iter()
                .map(|(p0, mu)| FamilyMember { p0: p0.clone(), measure: MeasureFile::from_measure(mu) })
                .collect(),
            generator: fam.generator().map(|g| g.kind.as_str().to_string()),
        }
    }

    /// Loaded families keep the generator's name but cannot build new members.
    pub fn to_family(&self) -> Result<ProcessFamily> {
        let grid = TimeGrid::new(self.grid.clone())?;
        let generator = match &self.generator {
            None => None,
            Some(name) => Some(FamilyGenerator::name_only(
                GeneratorKind::parse(name).ok_or_else(|| Error::Schema(format!("unknown generator {name:?}")))?,
            )),
        };
        let mut members = BTreeMap::new();
        for m in &self.members {
            if members.insert(m.p0.clone(), m.measure.to_measure()?).is_some() {
                return Err(Error::Schema(format!("member {} listed twice", m.p0)));
            }
        }
        ProcessFamily::from_members(grid, self.n, members, generator)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetEntry {
    pub t: Time,
    pub i: usize,
    pub out: usize,
}

/// `D(t, i)` for every non-zero grid time; time 0 entries are optional.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetSystemFile {
    pub grid: Vec<Time>,
    pub n: usize,
    pub table: Vec<DetEntry>,
}

impl DetSystemFile {
    pub fn from_system(d: &DeterministicSystem) -> Self {
        let times = d.grid().times();
        let table = d
            .table()
            .iter()
            .enumerate()
            .skip(1)
            .flat_map(|(p, row)| row.iter().enumerate().map(move |(i, &out)| DetEntry { t: times[p], i: i + 1, out: out + 1 }))
            .collect();
        DetSystemFile { grid: times.to_vec(), n: d.n(), table }
    }

    pub fn to_system(&self) -> Result<DeterministicSystem> {
        let grid = TimeGrid::new(self.grid.clone())?;
        let n = self.n;
        let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; n]; grid.len()];
        table[0] = (0..n).map(Some).collect();
        for e in &self.table {
            let pos = grid.require(e.t)?;
            let (i, out) = (one_based(e.i, n)?, one_based(e.out, n)?);
            match table[pos][i] {
                Some(prev) if pos > 0 || prev != out => {
                    return Err(Error::Schema(format!("D({}, {}) given twice or not the identity", e.t, e.i)));
                }
                _ => table[pos][i] = Some(out),
            }
        }
        let table = fill(table, |pos, i| format!("D({}, {}) missing", grid.times()[pos], i + 1))?;
        DeterministicSystem::new(grid, n, table)
    }
}

fn fill(table: Vec<Vec<Option<usize>>>, missing: impl Fn(usize, usize) -> String) -> Result<Vec<Vec<usize>>> {
    table
        .into_iter()
        .enumerate()
        .map(|(pos, row)| row.into_iter().enumerate().map(|(i, v)| v.ok_or_else(|| Error::Schema(missing(pos, i)))).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaEntry {
    pub t: Time,
    pub i: usize,
    pub alpha: usize,
    pub out: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AncillaFile {
    pub grid: Vec<Time>,
    pub n: usize,
    pub m: usize,
    pub table: Vec<AncillaEntry>,
    /// Initial ancilla distribution, when the file carries one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<ProbVector>,
}

impl AncillaFile {
    pub fn from_system(sa: &SystemAncilla, lambda0: Option<&ProbVector>) -> Self {
        let times = sa.grid().times();
        let mut table = Vec::new();
        for (p, slice) in sa.table().iter().enumerate().skip(1) {
            for (i, row) in slice.iter().enumerate() {
                for (a, &out) in row.iter().enumerate() {
                    table.push(AncillaEntry { t: times[p], i: i + 1, alpha: a + 1, out: out + 1 });
                }
            }
        }
        AncillaFile { grid: times.to_vec(), n: sa.n(), m: sa.m(), table, lambda0: lambda0.cloned() }
    }

    pub fn to_system(&self) -> Result<SystemAncilla> {
        let grid = TimeGrid::new(self.grid.clone())?;
        let (n, m) = (self.n, self.m);
        let mut table: Vec<Vec<Vec<Option<usize>>>> = vec![vec![vec![None; m]; n]; grid.len()];
        for (i, row) in table[0].iter_mut().enumerate() {
            row.iter_mut().for_each(|v| *v = Some(i));
        }
        for e in &self.table {
            let pos = grid.require(e.t)?;
            let (i, a, out) = (one_based(e.i, n)?, one_based(e.alpha, m)?, one_based(e.out, n)?);
            match table[pos][i][a] {
                Some(prev) if pos > 0 || prev != out => {
                    return Err(Error::Schema(format!("SA({}, {}, {}) given twice or not the identity", e.t, e.i, e.alpha)));
                }
                _ => table[pos][i][a] = Some(out),
            }
        }
        let times = grid.times().to_vec();
        let table = table
            .into_iter()
            .enumerate()
            .map(|(pos, slice)| fill(slice, |i, a| format!("SA({}, {}, {}) missing", times[pos], i + 1, a + 1)))
            .collect::<Result<Vec<_>>>()?;
        if let Some(l) = &self.lambda0 {
            if l.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: l.len() });
            }
        }
        SystemAncilla::new(grid, n, m, table)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

/// Unitary matrices per grid time, each an array of columns of complex entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryFile {
    pub grid: Vec<Time>,
    pub d: usize,
    pub matrices: Vec<Vec<Vec<ComplexEntry>>>,
}

impl UnitaryFile {
    pub fn from_family(u: &UnitaryFamily) -> Self {
        let matrices = u
            .matrices()
            .iter()
            .map(|m| m.column_iter().map(|c| c.iter().map(|z| ComplexEntry { re: z.re, im: z.im }).collect()).collect())
            .collect();
        UnitaryFile { grid: u.grid().times().to_vec(), d: u.dim(), matrices }
    }

    pub fn to_family(&self) -> Result<UnitaryFamily> {
        let grid = TimeGrid::new(self.grid.clone())?;
        let d = self.d;
        let ms = self
            .matrices
            .iter()
            .map(|cols| {
                if cols.len() != d || cols.iter().any(|c| c.len() != d) {
                    return Err(Error::WrongDimension { expected: d, found: cols.len() });
                }
                Ok(CMatrix::from_fn(d, d, |i, j| Complex64::new(cols[j][i].re, cols[j][i].im)))
            })
            .collect::<Result<Vec<_>>>()?;
        UnitaryFamily::new(grid, ms)
    }
}

/// JSON Schema for one of [`SCHEMA_NAMES`].
pub fn emit_schema(name: &str) -> Result<Value> {
    let rational = json!({
        "type": "string",
        "description": "exact value: \"n/d\", \"a+b*sqrt(2)\", or a terminating decimal",
        "pattern": "^[-+0-9./* sqrt()]+$"
    });
    let grid = json!({
        "type": "array", "items": {"type": "integer", "minimum": 0},
        "minItems": 1, "description": "strictly increasing times starting at 0"
    });
    let config = json!({"type": "integer", "minimum": 1, "description": "1-based configuration"});
    let prob_vector = json!({"type": "array", "items": rational, "description": "entries ≥ 0 summing to 1"});
    let measure = json!({
        "type": "object",
        "required": ["grid", "n", "table"],
        "additionalProperties": false,
        "properties": {
            "grid": grid,
            "n": {"type": "integer", "minimum": 1},
            "table": {
                "type": "array",
                "description": "omitted trajectories have weight 0",
                "items": {
                    "type": "object", "required": ["traj", "p"], "additionalProperties": false,
                    "properties": {"traj": {"type": "array", "items": config}, "p": rational}
                }
            }
        }
    });
    let schema = match name {
        "measure" => measure,
        "dynamics" => json!({
            "oneOf": [
                {
                    "type": "object",
                    "required": ["kind", "grid", "n", "matrices"],
                    "additionalProperties": false,
                    "properties": {
                        "kind": {"const": "matrix_family"},
                        "grid": grid,
                        "n": {"type": "integer", "minimum": 1},
                        "matrices": {
                            "type": "array",
                            "description": "one matrix per grid time; the first must be the identity",
                            "items": {"type": "array", "items": {"type": "array", "items": rational}}
                        },
                        "convention": {"enum": ["columns", "rows"], "default": "columns"}
                    }
                },
                {
                    "type": "object",
                    "required": ["kind", "grid", "n", "points"],
                    "additionalProperties": false,
                    "properties": {
                        "kind": {"const": "tabulated"},
                        "grid": grid,
                        "n": {"type": "integer", "minimum": 1},
                        "points": {
                            "type": "array",
                            "description": "must include every vertex; trajectory[0] equals p0",
                            "items": {
                                "type": "object", "required": ["p0", "trajectory"], "additionalProperties": false,
                                "properties": {"p0": prob_vector, "trajectory": {"type": "array", "items": prob_vector}}
                            }
                        }
                    }
                }
            ]
        }),
        "family" => json!({
            "type": "object",
            "required": ["grid", "n", "members"],
            "additionalProperties": false,
            "properties": {
                "grid": grid,
                "n": {"type": "integer", "minimum": 1},
                "members": {
                    "type": "array",
                    "items": {
                        "type": "object", "required": ["p0", "measure"], "additionalProperties": false,
                        "properties": {"p0": prob_vector, "measure": measure}
                    }
                },
                "generator": {
                    "enum": [
                        "markov_product", "transition_constant", "non_markov_eps", "deterministic",
                        "stochastic", "ancilla_independent", "custom", null
                    ]
                }
            }
        }),
        "detsystem" => json!({
            "type": "object",
            "required": ["grid", "n", "table"],
            "additionalProperties": false,
            "properties": {
                "grid": grid,
                "n": {"type": "integer", "minimum": 1},
                "table": {
                    "type": "array",
                    "description": "D(t, i) = out for every non-zero grid time; time 0 is the identity",
                    "items": {
                        "type": "object", "required": ["t", "i", "out"], "additionalProperties": false,
                        "properties": {"t": {"type": "integer", "minimum": 0}, "i": config, "out": config}
                    }
                }
            }
        }),
        "ancilla" => json!({
            "type": "object",
            "required": ["grid", "n", "m", "table"],
            "additionalProperties": false,
            "properties": {
                "grid": grid,
                "n": {"type": "integer", "minimum": 1},
                "m": {"type": "integer", "minimum": 1},
                "table": {
                    "type": "array",
                    "description": "SA(t, i, alpha) = out for every non-zero grid time; time 0 is the identity",
                    "items": {
                        "type": "object", "required": ["t", "i", "alpha", "out"], "additionalProperties": false,
                        "properties": {
                            "t": {"type": "integer", "minimum": 0}, "i": config,
                            "alpha": {"type": "integer", "minimum": 1}, "out": config
                        }
                    }
                },
                "lambda0": prob_vector
            }
        }),
        "unitary" => json!({
            "type": "object",
            "required": ["grid", "d", "matrices"],
            "additionalProperties": false,
            "properties": {
                "grid": grid,
                "d": {"type": "integer", "minimum": 1},
                "matrices": {
                    "type": "array",
                    "description": "one unitary per grid time as an array of columns; the first must be the identity",
                    "items": {"type": "array", "items": {"type": "array", "items": {
                        "type": "object", "required": ["re", "im"], "additionalProperties": false,
                        "properties": {"re": {"type": "number"}, "im": {"type": "number"}}
                    }}}
                }
            }
        }),
        other => return Err(Error::UnknownSchema(other.to_string())),
    };
    let mut out = json!({
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": format!("stoqdyn {name}"),
    });
    out.as_object_mut().expect("object literal").extend(schema.as_object().cloned().unwrap_or_default());
    Ok(out)
}
