//! File formats and their canonical JSON encoding.
//!
//! Canonical output has sorted keys, two-space indentation, a trailing
//! newline, and every float rounded to 12 significant digits.

use std::collections::BTreeMap;

use pbnq::algebra::{LogicalMatrix, SparseMatrix};
use pbnq::model::{ConstituentSpec, NetworkDef};
use pbnq::{CostSpec, Partition, Pbn, Policy, StateFeedback, StochasticMatrix};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub fn round12(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.11e}").parse().expect("formatted float parses")
}

/// Shortest decimal text of `round12(v)`; integers print without a fraction.
pub fn format_number(v: f64) -> String {
    let r = round12(v);
    if r.fract() == 0.0 && r.abs() < 1e15 {
        format!("{}", r as i64)
    } else {
        format!("{r}")
    }
}

fn canonical_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = round12(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(f).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonical_value(v))).collect()),
        other => other,
    }
}

const INLINE_WIDTH: usize = 100;

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize| "  ".repeat(k);
    match v {
        Value::Object(o) if !o.is_empty() => {
            out.push_str("{\n");
            for (i, (k, val)) in o.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(val, indent + 1, out);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(a) if !a.is_empty() => {
            let flat = v.to_string();
            if !flat.contains('{') && flat.len() <= INLINE_WIDTH {
                out.push_str(&flat.replace(',', ", "));
                return;
            }
            out.push_str("[\n");
            if a.iter().all(|x| !x.is_array() && !x.is_object()) {
                let items: Vec<String> = a.iter().map(Value::to_string).collect();
                let mut line = String::new();
                for (i, item) in items.iter().enumerate() {
                    let sep = if i + 1 < items.len() { "," } else { "" };
                    if !line.is_empty() && line.len() + item.len() + 2 > INLINE_WIDTH {
                        out.push_str(&pad(indent + 1));
                        out.push_str(line.trim_end());
                        out.push('\n');
                        line.clear();
                    }
                    line.push_str(item);
                    line.push_str(sep);
                    line.push(' ');
                }
                out.push_str(&pad(indent + 1));
                out.push_str(line.trim_end());
                out.push('\n');
                out.push_str(&pad(indent));
                out.push(']');
                return;
            }
            for (i, val) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(val, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Sorted keys, two-space indentation, trailing newline. Short arrays stay on
/// one line; long arrays of scalars are wrapped.
pub fn to_canonical_json<T: Serialize>(doc: &T) -> String {
    let v = canonical_value(serde_json::to_value(doc).expect("serializable"));
    let mut s = String::new();
    write_value(&v, 0, &mut s);
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum ModelFile {
    Boolean(BooleanModel),
    Matrix(MatrixModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BooleanModel {
    pub state_vars: Vec<String>,
    #[serde(default)]
    pub input_vars: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    /// Update functions shared by constituents that do not list their own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    pub constituents: Vec<BooleanConstituent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BooleanConstituent {
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixModel {
    pub n_states: usize,
    pub n_inputs: usize,
    /// `n_states * n_inputs` sparse columns of `[P(δ_M^1) … P(δ_M^M)]` as
    /// `[row, probability]` pairs with 1-based rows.
    pub columns: Vec<Vec<(usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constituents: Option<Vec<MatrixConstituent>>,
    /// Blocks of the parent model when this matrix is a quotient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixConstituent {
    pub probability: f64,
    /// 1-based successor of every column.
    pub targets: Vec<usize>,
}

impl BooleanModel {
    pub fn to_network(&self, eps: f64) -> Result<NetworkDef, CliError> {
        let specs = self
            .constituents
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let functions = c
                    .functions
                    .clone()
                    .or_else(|| self.functions.clone())
                    .ok_or_else(|| CliError::Invalid(format!("constituent {} has no functions", k + 1)))?;
                Ok(ConstituentSpec {
                    probability: c.probability,
                    functions,
                    bindings: c.bindings.clone(),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(NetworkDef::parse(
            self.state_vars.clone(),
            self.input_vars.clone(),
            &self.parameters,
            &specs,
            eps,
        )?)
    }
}

impl MatrixModel {
    pub fn from_pbn(pbn: &Pbn, partition: Option<&Partition>) -> Self {
        Self {
            n_states: pbn.n_states(),
            n_inputs: pbn.n_inputs(),
            columns: columns_of(pbn.transition().as_sparse()),
            constituents: Some(
                pbn.constituents()
                    .iter()
                    .map(|(p, f)| MatrixConstituent {
                        probability: *p,
                        targets: f.targets(),
                    })
                    .collect(),
            ),
            partition: partition.map(Partition::blocks),
        }
    }

    pub fn transition(&self, eps: f64) -> Result<StochasticMatrix, CliError> {
        if self.columns.len() != self.n_states * self.n_inputs {
            return Err(CliError::Invalid(format!(
                "expected {} columns, found {}",
                self.n_states * self.n_inputs,
                self.columns.len()
            )));
        }
        let entries = self
            .columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j + 1, v)));
        let m = SparseMatrix::from_entries(self.n_states, self.columns.len(), entries)?;
        Ok(StochasticMatrix::new(m, eps)?)
    }

    pub fn to_pbn(&self, eps: f64) -> Result<Pbn, CliError> {
        let p = self.transition(eps)?;
        match &self.constituents {
            None => Ok(Pbn::from_matrix(p, eps)?),
            Some(list) => {
                let constituents = list
                    .iter()
                    .map(|c| Ok((c.probability, LogicalMatrix::new(self.n_states, c.targets.clone())?)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                let pbn = Pbn::from_constituents(constituents, eps)?;
                if !pbn.transition().approx_eq(&p, eps) {
                    return Err(CliError::Invalid(
                        "constituents do not combine to the listed columns".into(),
                    ));
                }
                Ok(pbn)
            }
        }
    }
}

fn columns_of(m: &SparseMatrix) -> Vec<Vec<(usize, f64)>> {
    (1..=m.cols()).map(|j| m.column(j).collect()).collect()
}

impl ModelFile {
    pub fn to_pbn(&self, eps: f64) -> Result<Pbn, CliError> {
        match self {
            Self::Boolean(b) => Ok(Pbn::from_network(&b.to_network(eps)?, eps)?),
            Self::Matrix(m) => m.to_pbn(eps),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionFile {
    pub n_states: usize,
    pub blocks: Vec<Vec<usize>>,
    /// Number of refinement iterations until the fixpoint, when produced by
    /// `refine`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl PartitionFile {
    pub fn from_partition(p: &Partition, iterations: Option<usize>) -> Self {
        Self {
            n_states: p.n_states(),
            blocks: p.blocks(),
            iterations,
        }
    }

    pub fn to_partition(&self) -> Result<Partition, CliError> {
        Ok(Partition::new(self.n_states, self.blocks.clone())?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetFile {
    pub n_states: usize,
    pub target: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostFile {
    /// One row of `n_states` stage costs per input.
    pub stage: Vec<Vec<f64>>,
    pub terminal: Vec<f64>,
    pub horizon: usize,
    pub x0: usize,
}

impl CostFile {
    pub fn from_spec(c: &CostSpec) -> Self {
        Self {
            stage: c.stage().to_vec(),
            terminal: c.terminal().to_vec(),
            horizon: c.horizon(),
            x0: c.x0(),
        }
    }

    pub fn to_spec(&self) -> Result<CostSpec, CliError> {
        Ok(CostSpec::new(self.stage.clone(), self.terminal.clone(), self.horizon, self.x0)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ControllerFile {
    Static {
        n_inputs: usize,
        inputs: Vec<usize>,
    },
    Policy {
        n_inputs: usize,
        horizon: usize,
        inputs: Vec<Vec<usize>>,
        /// Optimal expected cost, when produced by `optctl`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cost: Option<f64>,
    },
}

pub enum Controller {
    Static(StateFeedback),
    Policy(Policy),
}

impl ControllerFile {
    pub fn from_feedback(fb: &StateFeedback) -> Self {
        Self::Static {
            n_inputs: fb.n_inputs(),
            inputs: fb.inputs().to_vec(),
        }
    }

    pub fn from_policy(p: &Policy, cost: Option<f64>) -> Self {
        Self::Policy {
            n_inputs: p.n_inputs(),
            horizon: p.horizon(),
            inputs: p.rows().iter().map(|r| r.inputs().to_vec()).collect(),
            cost,
        }
    }

    pub fn to_controller(&self) -> Result<Controller, CliError> {
        match self {
            Self::Static { n_inputs, inputs } => {
                Ok(Controller::Static(StateFeedback::new(inputs.clone(), *n_inputs)?))
            }
            Self::Policy {
                n_inputs,
                horizon,
                inputs,
                ..
            } => {
                if inputs.len() != *horizon {
                    return Err(CliError::Invalid(format!(
                        "policy lists {} rows for horizon {horizon}",
                        inputs.len()
                    )));
                }
                Ok(Controller::Policy(Policy::from_table(inputs.clone(), *n_inputs)?))
            }
        }
    }
}
