//! JSON encodings of measures, costs, plans, disintegration maps and
//! meta-measures.
//!
//! Scalars are numbers in float mode and `"p/q"` strings in rational mode;
//! both spellings are accepted on input. Numbers read in rational mode are
//! taken at their exact decimal value.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::cost::CostSpec;
use crate::disintegration::{recombine, DisintegrationMap};
use crate::error::{Error, Result};
use crate::kantorovich::{Potential, TransportPlan};
use crate::matrix::Matrix;
use crate::measure::{DiscreteMeasure, Point};
use crate::scalar::{parse_rational, Mode, Scalar};
use crate::transport_class::MetaMeasure;

pub fn read_json(path: &Path) -> Result<Value> {
    let field = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::parse(&field, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(field, e.to_string()))
}

pub fn scalar_from_json<S: Scalar>(v: &Value, field: &str) -> Result<S> {
    let r = match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => None,
    }
    .ok_or_else(|| Error::parse(field, format!("expected a number or \"p/q\" string, got {v}")))?;
    let s = S::from_rational(&r);
    if !s.is_finite_value() {
        return Err(Error::parse(field, "value is not finite"));
    }
    Ok(s)
}

pub fn scalar_to_json<S: Scalar>(v: &S) -> Value {
    match S::MODE {
        Mode::Rational => Value::String(v.to_string()),
        Mode::Float => json!(v.clone().canonical().to_f64_lossy()),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, ctx: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::parse(format!("{ctx}.{key}"), "missing field"))
}

fn object<'a>(v: &'a Value, ctx: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::parse(ctx, "expected an object"))
}

fn array<'a>(v: &'a Value, ctx: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(ctx, "expected an array"))
}

fn scalars<S: Scalar>(v: &Value, ctx: &str) -> Result<Vec<S>> {
    array(v, ctx)?
        .iter()
        .enumerate()
        .map(|(k, x)| scalar_from_json(x, &format!("{ctx}[{k}]")))
        .collect()
}

fn matrix_rows<S: Scalar>(v: &Value, ctx: &str) -> Result<Vec<Vec<S>>> {
    array(v, ctx)?
        .iter()
        .enumerate()
        .map(|(i, row)| scalars(row, &format!("{ctx}[{i}]")))
        .collect()
}

/// `{"dim": d, "mode": "float"|"rational", "atoms": [[...]], "weights": [...]}`.
///
/// An optional `"normalize": true` rescales the weights.
pub fn measure_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<DiscreteMeasure<S>> {
    let obj = object(v, ctx)?;
    if let Some(mode) = obj.get("mode") {
        let found: Mode = mode
            .as_str()
            .and_then(|m| m.parse().ok())
            .ok_or_else(|| Error::parse(format!("{ctx}.mode"), "expected \"float\" or \"rational\""))?;
        if found != S::MODE {
            return Err(Error::ModeMismatch {
                expected: S::MODE,
                found,
            });
        }
    }
    let atoms: Vec<Point<S>> = matrix_rows(field(obj, "atoms", ctx)?, &format!("{ctx}.atoms"))?;
    let weights = scalars(field(obj, "weights", ctx)?, &format!("{ctx}.weights"))?;
    if let Some(d) = obj.get("dim") {
        let d = d
            .as_u64()
            .ok_or_else(|| Error::parse(format!("{ctx}.dim"), "expected a nonnegative integer"))?;
        if let Some((k, p)) = atoms.iter().enumerate().find(|(_, p)| p.len() as u64 != d) {
            return Err(Error::parse(
                format!("{ctx}.atoms[{k}]"),
                format!("has {} coordinates but dim is {d}", p.len()),
            ));
        }
    }
    let normalize = obj.get("normalize").and_then(Value::as_bool).unwrap_or(false);
    let built = if normalize {
        DiscreteMeasure::normalized(atoms, weights)
    } else {
        DiscreteMeasure::new(atoms, weights)
    };
    built.map_err(|e| match e {
        Error::MassNotOne { .. } | Error::NegativeWeight { .. } => Error::parse(format!("{ctx}.weights"), e.to_string()),
        other => other,
    })
}

pub fn measure_to_json<S: Scalar>(m: &DiscreteMeasure<S>) -> Value {
    json!({
        "dim": m.dim(),
        "mode": S::MODE.as_str(),
        "atoms": m.atoms().iter().map(|p| points_json(p)).collect::<Vec<_>>(),
        "weights": points_json(m.weights()),
    })
}

fn points_json<S: Scalar>(p: &[S]) -> Value {
    Value::Array(p.iter().map(scalar_to_json).collect())
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array((0..m.rows()).map(|i| points_json(m.row(i))).collect())
}

/// `{"cost": "euclidean", "p": 1}` | `{"cost": "sqeuclidean"}` | `{"cost": "inner"}`
/// | `{"cost": "matrix", "rows": [[...]]}` | `{"cost": "separable", "a": [...], "b": [...]}`.
pub fn cost_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<CostSpec<S>> {
    let obj = object(v, ctx)?;
    let kind = field(obj, "cost", ctx)?
        .as_str()
        .ok_or_else(|| Error::parse(format!("{ctx}.cost"), "expected a string"))?;
    match kind {
        "euclidean" => {
            let p = match obj.get("p") {
                None => 1.0,
                Some(p) => p
                    .as_f64()
                    .ok_or_else(|| Error::parse(format!("{ctx}.p"), "expected a number"))?,
            };
            CostSpec::euclidean(p).map_err(|e| Error::parse(format!("{ctx}.p"), e.to_string()))
        }
        "sqeuclidean" => Ok(CostSpec::SquaredEuclidean),
        "inner" => Ok(CostSpec::InnerProduct),
        "matrix" => {
            let rows = matrix_rows(field(obj, "rows", ctx)?, &format!("{ctx}.rows"))?;
            CostSpec::matrix(rows).map_err(|e| Error::parse(format!("{ctx}.rows"), e.to_string()))
        }
        "separable" => {
            let a = scalars(field(obj, "a", ctx)?, &format!("{ctx}.a"))?;
            let b = scalars(field(obj, "b", ctx)?, &format!("{ctx}.b"))?;
            CostSpec::separable(a, b)
        }
        other => Err(Error::parse(format!("{ctx}.cost"), format!("unknown cost `{other}`"))),
    }
}

pub fn cost_to_json<S: Scalar>(c: &CostSpec<S>) -> Value {
    match c {
        CostSpec::Euclidean { p } => json!({"cost": "euclidean", "p": p}),
        CostSpec::SquaredEuclidean => json!({"cost": "sqeuclidean"}),
        CostSpec::InnerProduct => json!({"cost": "inner"}),
        CostSpec::Matrix(m) => json!({"cost": "matrix", "rows": matrix_to_json(m)}),
        CostSpec::Separable { a, b } => json!({"cost": "separable", "a": points_json(a), "b": points_json(b)}),
    }
}

/// Command-line shorthand: `euclidean[:p]`, `sqeuclidean`, `inner`, or a JSON file.
pub fn parse_cost_arg<S: Scalar>(arg: &str) -> Result<CostSpec<S>> {
    match arg.split_once(':') {
        Some(("euclidean", p)) => {
            let p: f64 = p
                .parse()
                .map_err(|_| Error::parse("--cost", format!("bad exponent `{p}`")))?;
            CostSpec::euclidean(p).map_err(|e| Error::parse("--cost", e.to_string()))
        }
        _ => match arg {
            "euclidean" => Ok(CostSpec::Euclidean { p: 1.0 }),
            "sqeuclidean" => Ok(CostSpec::SquaredEuclidean),
            "inner" => Ok(CostSpec::InnerProduct),
            path => cost_from_json(&read_json(Path::new(path))?, path),
        },
    }
}

/// Accepts `{"source", "target", "matrix"}` or a disintegration map
/// `{"base", "conditionals"}` (recombined into its plan).
pub fn plan_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<TransportPlan<S>> {
    let obj = object(v, ctx)?;
    if obj.contains_key("base") {
        let f = disintegration_from_json(v, ctx)?;
        return recombine(&f, f.base());
    }
    let source = measure_from_json(field(obj, "source", ctx)?, &format!("{ctx}.source"))?;
    let target = measure_from_json(field(obj, "target", ctx)?, &format!("{ctx}.target"))?;
    let rows = matrix_rows(field(obj, "matrix", ctx)?, &format!("{ctx}.matrix"))?;
    let matrix = Matrix::from_rows(rows).map_err(|e| Error::parse(format!("{ctx}.matrix"), e.to_string()))?;
    TransportPlan::new(source, target, matrix).map_err(|e| Error::parse(format!("{ctx}.matrix"), e.to_string()))
}

pub fn plan_to_json<S: Scalar>(p: &TransportPlan<S>) -> Value {
    json!({
        "source": measure_to_json(p.source()),
        "target": measure_to_json(p.target()),
        "matrix": matrix_to_json(p.matrix()),
    })
}

/// `{"base": <measure>, "conditionals": [<measure>, ...]}`.
pub fn disintegration_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<DisintegrationMap<S>> {
    let obj = object(v, ctx)?;
    let base = measure_from_json(field(obj, "base", ctx)?, &format!("{ctx}.base"))?;
    let conditionals = array(field(obj, "conditionals", ctx)?, &format!("{ctx}.conditionals"))?
        .iter()
        .enumerate()
        .map(|(k, c)| measure_from_json(c, &format!("{ctx}.conditionals[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    DisintegrationMap::new(base, conditionals)
}

pub fn disintegration_to_json<S: Scalar>(f: &DisintegrationMap<S>) -> Value {
    json!({
        "base": measure_to_json(f.base()),
        "conditionals": f.conditionals().iter().map(measure_to_json).collect::<Vec<_>>(),
    })
}

/// `{"atoms": [<measure>, ...], "weights": [...]}`.
pub fn meta_from_json<S: Scalar>(v: &Value, ctx: &str) -> Result<MetaMeasure<S>> {
    let obj = object(v, ctx)?;
    let atoms = array(field(obj, "atoms", ctx)?, &format!("{ctx}.atoms"))?
        .iter()
        .enumerate()
        .map(|(k, a)| measure_from_json(a, &format!("{ctx}.atoms[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let weights = scalars(field(obj, "weights", ctx)?, &format!("{ctx}.weights"))?;
    MetaMeasure::new(atoms, weights).map_err(|e| match e {
        Error::MassNotOne { .. } | Error::NegativeWeight { .. } => Error::parse(format!("{ctx}.weights"), e.to_string()),
        other => other,
    })
}

pub fn meta_to_json<S: Scalar>(m: &MetaMeasure<S>) -> Value {
    json!({
        "atoms": m.atoms().iter().map(measure_to_json).collect::<Vec<_>>(),
        "weights": points_json(m.weights()),
    })
}

/// Values aligned with the canonical atom order of the support.
pub fn potential_to_json<S: Scalar>(p: &Potential<S>) -> Value {
    points_json(p.values())
}
