//! JSON formats for series, matrices, algebras, suspension data and circle
//! maps.
//!
//! Parsers never panic on malformed input; they return [`Error::Schema`] with a
//! JSON pointer to the offending field.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::circle::{CircleMap, CommutingFamily};
use crate::cohomeq::LeafwiseOneForm;
use crate::diophantine::ActionMatrix;
use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, FrequencyVector};
use crate::liealg::LieAlgebra;
use crate::suspension::SuspensionData;

/// Coefficients below this modulus are omitted when writing.
pub const WRITE_FLOOR: f64 = 1e-15;

pub const MAX_DIMS: usize = 8;
pub const MAX_MODE: i64 = 1 << 20;
pub const MAX_ALGEBRA_DIM: usize = 64;
pub const MAX_MATRIX_SIZE: usize = 1024;

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn child(ptr: &str, key: &str) -> String {
    format!("{ptr}/{}", key.replace('~', "~0").replace('/', "~1"))
}

fn idx(ptr: &str, i: usize) -> String {
    format!("{ptr}/{i}")
}

fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| schema("", format!("invalid JSON: {e}")))
}

fn object<'a>(v: &'a Value, ptr: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(ptr, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, ptr: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(child(ptr, key), "missing field"))
}

fn array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(ptr, "expected an array"))
}

fn number(v: &Value, ptr: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| schema(ptr, "expected a number"))?;
    if !x.is_finite() {
        return Err(schema(ptr, "number is not finite"));
    }
    Ok(x)
}

fn integer(v: &Value, ptr: &str) -> Result<i64> {
    if let Some(i) = v.as_i64() {
        return Ok(i);
    }
    let x = number(v, ptr)?;
    if x.fract() != 0.0 || x.abs() > 9.0e15 {
        return Err(schema(ptr, "expected an integer"));
    }
    Ok(x as i64)
}

fn count(v: &Value, ptr: &str, max: usize) -> Result<usize> {
    let i = integer(v, ptr)?;
    if i < 0 || i as u64 > max as u64 {
        return Err(schema(ptr, format!("expected an integer in 0..={max}")));
    }
    Ok(i as usize)
}

fn boolean(v: &Value, ptr: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema(ptr, "expected a boolean"))
}

fn numbers(v: &Value, ptr: &str) -> Result<Vec<f64>> {
    array(v, ptr)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &idx(ptr, i)))
        .collect()
}

/// Re-tags a library error with the pointer of the value it came from.
fn at(ptr: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Schema { .. } => e,
        other => schema(ptr, other.to_string()),
    }
}

// ---- matrices ----

pub fn matrix_from_value(v: &Value, ptr: &str) -> Result<Vec<Vec<f64>>> {
    let rows = array(v, ptr)?;
    if rows.is_empty() {
        return Err(schema(ptr, "matrix has no rows"));
    }
    if rows.len() > MAX_MATRIX_SIZE {
        return Err(schema(ptr, "matrix too large"));
    }
    let out: Vec<Vec<f64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| numbers(r, &idx(ptr, i)))
        .collect::<Result<_>>()?;
    let width = out[0].len();
    if width == 0 || width > MAX_MATRIX_SIZE {
        return Err(schema(idx(ptr, 0), "row length must be between 1 and 1024"));
    }
    if let Some(i) = out.iter().position(|r| r.len() != width) {
        return Err(schema(idx(ptr, i), format!("expected {width} entries")));
    }
    Ok(out)
}

/// A bare nested array `[[..], ..]`.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    matrix_from_value(&parse_text(text)?, "")
}

pub fn parse_action_matrix(text: &str) -> Result<ActionMatrix> {
    let v = parse_text(text)?;
    let rows = match &v {
        // A bare vector is a single flow.
        Value::Array(a) if a.first().is_some_and(Value::is_number) => vec![numbers(&v, "")?],
        _ => matrix_from_value(&v, "")?,
    };
    ActionMatrix::new(rows).map_err(at(""))
}

pub fn matrix_to_value(rows: &[Vec<f64>]) -> Value {
    json!(rows)
}

pub fn dmatrix_to_value(m: &DMatrix<f64>) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect();
    json!(rows)
}

// ---- series ----

pub fn series_from_value(v: &Value, ptr: &str) -> Result<FourierSeries> {
    let obj = object(v, ptr)?;
    let dims_ptr = child(ptr, "dims");
    let dims = count(field(obj, ptr, "dims")?, &dims_ptr, MAX_DIMS)?;
    if dims == 0 {
        return Err(schema(dims_ptr, "dims must be at least 1"));
    }
    let real = match obj.get("real") {
        Some(r) => boolean(r, &child(ptr, "real"))?,
        None => true,
    };
    let coeffs_ptr = child(ptr, "coeffs");
    let list = array(field(obj, ptr, "coeffs")?, &coeffs_ptr)?;
    let mut modes: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
    for (i, item) in list.iter().enumerate() {
        let p = idx(&coeffs_ptr, i);
        let o = object(item, &p)?;
        let mp = child(&p, "m");
        let m_arr = array(field(o, &p, "m")?, &mp)?;
        if m_arr.len() != dims {
            return Err(schema(mp, format!("expected {dims} integers")));
        }
        let m: Vec<i64> = m_arr
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let k = integer(x, &idx(&mp, j))?;
                if k.abs() > MAX_MODE {
                    return Err(schema(idx(&mp, j), format!("|m| exceeds {MAX_MODE}")));
                }
                Ok(k)
            })
            .collect::<Result<_>>()?;
        let re = match o.get("re") {
            Some(x) => number(x, &child(&p, "re"))?,
            None => 0.0,
        };
        let im = match o.get("im") {
            Some(x) => number(x, &child(&p, "im"))?,
            None => 0.0,
        };
        if modes.insert(m, Complex64::new(re, im)).is_some() {
            return Err(schema(p, "duplicate mode"));
        }
    }
    if real {
        // Fill in missing conjugate partners so real series may be given by
        // one half of their modes.
        let missing: Vec<(Vec<i64>, Complex64)> = modes
            .iter()
            .filter_map(|(m, c)| {
                let neg: Vec<i64> = m.iter().map(|x| -x).collect();
                (!modes.contains_key(&neg)).then(|| (neg, c.conj()))
            })
            .collect();
        modes.extend(missing);
    }
    let mut s = FourierSeries::from_modes(
        dims,
        real,
        modes.into_iter().map(|(m, c)| (FrequencyVector::new(m), c)),
    )
    .map_err(at(&coeffs_ptr))?;
    if let Some(r) = obj.get("radius") {
        let rp = child(ptr, "radius");
        let r = integer(r, &rp)?;
        if r < s.radius() || r > MAX_MODE {
            return Err(schema(rp, "radius must cover every mode"));
        }
        s = s.with_radius(r);
    }
    Ok(s)
}

pub fn parse_series(text: &str) -> Result<FourierSeries> {
    series_from_value(&parse_text(text)?, "")
}

pub fn series_to_value(s: &FourierSeries) -> Value {
    let coeffs: Vec<Value> = s
        .iter()
        .filter(|(_, c)| c.norm() >= WRITE_FLOOR)
        .map(|(m, c)| json!({"m": m.entries(), "re": c.re, "im": c.im}))
        .collect();
    json!({
        "dims": s.dims(),
        "real": s.is_real(),
        "radius": s.radius(),
        "coeffs": coeffs,
    })
}

// ---- leafwise forms ----

/// `{"components": [series, ...]}`, one series per frame vector. A bare
/// series is accepted when the frame is a single flow.
pub fn form_from_value(v: &Value, ptr: &str, frame: &ActionMatrix) -> Result<LeafwiseOneForm> {
    let obj = object(v, ptr)?;
    let components = if obj.contains_key("components") {
        let cp = child(ptr, "components");
        array(&obj["components"], &cp)?
            .iter()
            .enumerate()
            .map(|(i, c)| series_from_value(c, &idx(&cp, i)))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![series_from_value(v, ptr)?]
    };
    LeafwiseOneForm::new(frame.clone(), components).map_err(at(ptr))
}

pub fn parse_form(text: &str, frame: &ActionMatrix) -> Result<LeafwiseOneForm> {
    form_from_value(&parse_text(text)?, "", frame)
}

pub fn form_to_value(omega: &LeafwiseOneForm) -> Value {
    json!({
        "components": omega.components().iter().map(series_to_value).collect::<Vec<_>>(),
    })
}

// ---- Lie algebras ----

/// `{"n": 3, "c": [{"i": 1, "j": 2, "k": 3, "val": 1.0}], "matrices": [...]}`
/// with 1-based indices; `c_{ji}^k = -val` is implied unless given.
pub fn algebra_from_value(v: &Value, ptr: &str) -> Result<LieAlgebra> {
    let obj = object(v, ptr)?;
    let np = child(ptr, "n");
    let n = count(field(obj, ptr, "n")?, &np, MAX_ALGEBRA_DIM)?;
    if n == 0 {
        return Err(schema(np, "n must be at least 1"));
    }
    let cp = child(ptr, "c");
    let entries = match obj.get("c") {
        Some(c) => array(c, &cp)?
            .iter()
            .enumerate()
            .map(|(t, e)| {
                let p = idx(&cp, t);
                let o = object(e, &p)?;
                let index = |key: &str| -> Result<usize> {
                    let kp = child(&p, key);
                    let x = integer(field(o, &p, key)?, &kp)?;
                    if x < 1 || x as u64 > n as u64 {
                        return Err(schema(kp, format!("index must be in 1..={n}")));
                    }
                    Ok(x as usize - 1)
                };
                let val = number(field(o, &p, "val")?, &child(&p, "val"))?;
                Ok((index("i")?, index("j")?, index("k")?, val))
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let mut l = LieAlgebra::from_brackets(n, &entries).map_err(at(&cp))?;
    if let Some(m) = obj.get("matrices") {
        let mp = child(ptr, "matrices");
        let list = array(m, &mp)?;
        let mats = list
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let p = idx(&mp, i);
                let rows = matrix_from_value(x, &p)?;
                if rows.len() != rows[0].len() || rows.len() > MAX_ALGEBRA_DIM {
                    return Err(schema(p, "realization matrices must be square"));
                }
                Ok(DMatrix::from_fn(rows.len(), rows.len(), |r, s| rows[r][s]))
            })
            .collect::<Result<Vec<_>>>()?;
        l = l.with_matrices(mats).map_err(at(&mp))?;
    }
    Ok(l)
}

pub fn parse_algebra(text: &str) -> Result<LieAlgebra> {
    algebra_from_value(&parse_text(text)?, "")
}

pub fn algebra_to_value(l: &LieAlgebra) -> Value {
    let n = l.dim();
    let mut c = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let val = l.constant(i, j, k);
                if val != 0.0 {
                    c.push(json!({"i": i + 1, "j": j + 1, "k": k + 1, "val": val}));
                }
            }
        }
    }
    let mut out = json!({"n": n, "c": c});
    if let Some(ms) = l.matrices() {
        out["matrices"] = Value::Array(ms.iter().map(dmatrix_to_value).collect());
    }
    out
}

// ---- suspension data ----

pub fn suspension_from_value(v: &Value, ptr: &str) -> Result<SuspensionData> {
    let obj = object(v, ptr)?;
    let dp = child(ptr, "dims");
    let dims_arr = array(field(obj, ptr, "dims")?, &dp)?;
    if dims_arr.len() > 64 {
        return Err(schema(dp, "at most 64 degrees"));
    }
    let dims: Vec<usize> = dims_arr
        .iter()
        .enumerate()
        .map(|(i, d)| count(d, &idx(&dp, i), MAX_MATRIX_SIZE))
        .collect::<Result<_>>()?;
    let mp = child(ptr, "maps");
    let maps_arr = array(field(obj, ptr, "maps")?, &mp)?;
    let maps: Vec<Vec<Vec<f64>>> = maps_arr
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let p = idx(&mp, k);
            // Zero-dimensional degrees have empty maps.
            match m.as_array() {
                Some(a) if a.is_empty() => Ok(Vec::new()),
                _ => matrix_from_value(m, &p),
            }
        })
        .collect::<Result<_>>()?;
    if maps.len() != dims.len() {
        return Err(schema(mp, format!("expected {} maps, one per degree", dims.len())));
    }
    for (k, (m, &d)) in maps.iter().zip(&dims).enumerate() {
        if m.len() != d || m.iter().any(|row| row.len() != d) {
            return Err(schema(idx(&mp, k), format!("expected a {d}x{d} matrix")));
        }
    }
    SuspensionData::new(dims, maps).map_err(at(ptr))
}

pub fn parse_suspension(text: &str) -> Result<SuspensionData> {
    suspension_from_value(&parse_text(text)?, "")
}

pub fn suspension_to_value(s: &SuspensionData) -> Value {
    json!({"dims": s.dims, "maps": s.maps})
}

// ---- circle maps ----

/// `{"drift": 0.38, "periodic": series}`; `periodic` may be omitted for a
/// rigid rotation.
pub fn circle_map_from_value(v: &Value, ptr: &str) -> Result<CircleMap> {
    let obj = object(v, ptr)?;
    let drift = number(field(obj, ptr, "drift")?, &child(ptr, "drift"))?;
    let periodic = match obj.get("periodic") {
        Some(p) => {
            let pp = child(ptr, "periodic");
            let s = series_from_value(p, &pp)?;
            if s.dims() != 1 || !s.is_real() {
                return Err(schema(pp, "expected a real series with dims 1"));
            }
            if s.radius() > 4096 {
                return Err(schema(pp, "periodic part radius exceeds 4096"));
            }
            s
        }
        None => FourierSeries::zero(1, true),
    };
    CircleMap::new(drift, periodic).map_err(at(ptr))
}

pub fn parse_circle_map(text: &str) -> Result<CircleMap> {
    circle_map_from_value(&parse_text(text)?, "")
}

pub fn circle_map_to_value(f: &CircleMap) -> Value {
    json!({"drift": f.drift(), "periodic": series_to_value(f.periodic())})
}

/// A family with optional target rotation numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyInput {
    pub family: CommutingFamily,
    pub targets: Option<Vec<f64>>,
}

/// `{"maps": [...], "commutation_tol": 1e-9, "targets": [...]}`.
pub fn family_from_value(v: &Value, ptr: &str) -> Result<FamilyInput> {
    let obj = object(v, ptr)?;
    let mp = child(ptr, "maps");
    let list = array(field(obj, ptr, "maps")?, &mp)?;
    if list.is_empty() || list.len() > 64 {
        return Err(schema(mp, "expected between 1 and 64 maps"));
    }
    let maps = list
        .iter()
        .enumerate()
        .map(|(i, m)| circle_map_from_value(m, &idx(&mp, i)))
        .collect::<Result<Vec<_>>>()?;
    let tol = match obj.get("commutation_tol") {
        Some(t) => {
            let tp = child(ptr, "commutation_tol");
            let t = number(t, &tp)?;
            if t < 0.0 {
                return Err(schema(tp, "tolerance must be non-negative"));
            }
            t
        }
        None => 1e-9,
    };
    let targets = match obj.get("targets") {
        Some(t) => {
            let tp = child(ptr, "targets");
            let t = numbers(t, &tp)?;
            if t.len() != maps.len() {
                return Err(schema(tp, format!("expected {} targets", maps.len())));
            }
            Some(t)
        }
        None => None,
    };
    let family = CommutingFamily::new(maps, tol).map_err(at(&mp))?;
    Ok(FamilyInput { family, targets })
}

pub fn parse_family(text: &str) -> Result<FamilyInput> {
    family_from_value(&parse_text(text)?, "")
}

pub fn family_to_value(f: &CommutingFamily, targets: Option<&[f64]>) -> Value {
    let mut out = json!({
        "maps": f.maps().iter().map(circle_map_to_value).collect::<Vec<_>>(),
        "commutation_tol": f.commutation_tol(),
    });
    if let Some(t) = targets {
        out["targets"] = json!(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_round_trip() {
        let text = r#"{"dims":2,"real":true,"coeffs":[{"m":[1,-1],"re":0.5,"im":0.25}]}"#;
        let s = parse_series(text).unwrap();
        assert_eq!(s.len(), 2);
        let back = series_from_value(&series_to_value(&s), "").unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn pointer_names_bad_field() {
        let text = r#"{"dims":1,"coeffs":[{"m":[1],"re":1},{"m":[2],"re":"x"}]}"#;
        match parse_series(text) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/coeffs/1/re"),
            other => panic!("{other:?}"),
        }
        match parse_algebra(r#"{"n":2,"c":[{"i":1,"j":3,"k":1,"val":1}]}"#) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/c/0/j"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn algebra_round_trip() {
        let l = LieAlgebra::heisenberg();
        let back = algebra_from_value(&algebra_to_value(&l), "").unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn flow_vector_is_accepted() {
        let v = parse_action_matrix("[1.0, 1.5]").unwrap();
        assert_eq!(v.p(), 1);
        assert!(parse_action_matrix("[[1.0, 1.5], [2.0, 3.0]]").is_err());
    }

    #[test]
    fn garbage_is_rejected() {
        for text in ["", "nul", "[]", "{}", "[[1,2],[3]]", r#"{"dims":-1,"coeffs":[]}"#] {
            assert!(parse_series(text).is_err());
            assert!(parse_matrix(text).is_err());
        }
    }
}
