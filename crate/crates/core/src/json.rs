//! JSON encodings for scalars, vectors, matrices and series, plus the
//! number format shared by every emitted report.
//!
//! Scalars are read in any of three forms:
//!
//! * idempotent `{"e1":[re,im],"e2":[re,im]}` (a bare number means `im = 0`)
//! * cartesian `{"w":[a,b,c,d]}` for `a + b·i + c·j + d·k`
//! * hyperbolic `{"h":[b1,b2]}` for `β1 + k·β2`
//!
//! Emission uses the idempotent form unless [`with_format`] selects the
//! cartesian one. Every real is written with 17 significant digits.

use std::cell::Cell;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::ser::{SerializeMap, SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::dmodule::{BCVector, SeriesSource};
use crate::dop::BCMatrix;
use crate::error::{Error, Result};
use crate::hyperscalar::{Bicomplex, DPlus, Hyperbolic};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScalarFormat {
    #[default]
    Idempotent,
    Cartesian,
}

impl std::str::FromStr for ScalarFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "idempotent" => Ok(ScalarFormat::Idempotent),
            "cartesian" => Ok(ScalarFormat::Cartesian),
            other => Err(Error::Parse(format!("unknown scalar format {other:?}"))),
        }
    }
}

thread_local! {
    static FORMAT: Cell<ScalarFormat> = const { Cell::new(ScalarFormat::Idempotent) };
}

/// Runs `f` with scalar emission switched to `fmt` on this thread.
pub fn with_format<T>(fmt: ScalarFormat, f: impl FnOnce() -> T) -> T {
    let prev = FORMAT.with(|c| c.replace(fmt));
    struct Restore(ScalarFormat);
    impl Drop for Restore {
        fn drop(&mut self) {
            FORMAT.with(|c| c.set(self.0));
        }
    }
    let _restore = Restore(prev);
    f()
}

fn current_format() -> ScalarFormat {
    FORMAT.with(|c| c.get())
}

/// `x` with 17 significant digits, e.g. `-2.5000000000000000e-1`.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A real that serializes with [`format_real`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            // not representable in JSON
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_real(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

pub fn real<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Real(*x).serialize(s)
}

pub fn reals<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        seq.serialize_element(&Real(x))?;
    }
    seq.end()
}

fn complex_pair(z: Complex64) -> [Real; 2] {
    [Real(z.re), Real(z.im)]
}

fn real4(b: &Bicomplex) -> [Real; 4] {
    b.to_real4().map(Real)
}

impl Serialize for Bicomplex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match current_format() {
            ScalarFormat::Idempotent => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("e1", &complex_pair(self.z1()))?;
                m.serialize_entry("e2", &complex_pair(self.z2()))?;
                m.end()
            }
            ScalarFormat::Cartesian => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("w", &real4(self))?;
                m.end()
            }
        }
    }
}

impl Serialize for Hyperbolic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Bicomplex::from(*self).serialize(s)
    }
}

impl Serialize for DPlus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.hyperbolic().serialize(s)
    }
}

impl Serialize for BCVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match current_format() {
            ScalarFormat::Idempotent => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("dim", &self.dim())?;
                m.serialize_entry("e1", &self.v1().iter().map(|z| complex_pair(*z)).collect::<Vec<_>>())?;
                m.serialize_entry("e2", &self.v2().iter().map(|z| complex_pair(*z)).collect::<Vec<_>>())?;
                m.end()
            }
            ScalarFormat::Cartesian => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("dim", &self.dim())?;
                m.serialize_entry("w", &self.entries().iter().map(real4).collect::<Vec<_>>())?;
                m.end()
            }
        }
    }
}

fn matrix_rows(m: &DMatrix<Complex64>) -> Vec<Vec<[Real; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_pair(m[(i, j)])).collect())
        .collect()
}

impl Serialize for BCMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("rows", &self.rows())?;
        m.serialize_entry("cols", &self.cols())?;
        match current_format() {
            ScalarFormat::Idempotent => {
                m.serialize_entry("e1", &matrix_rows(self.m1()))?;
                m.serialize_entry("e2", &matrix_rows(self.m2()))?;
            }
            ScalarFormat::Cartesian => {
                let rows: Vec<Vec<[Real; 4]>> = (0..self.rows())
                    .map(|i| (0..self.cols()).map(|j| real4(&self.entry(i, j))).collect())
                    .collect();
                m.serialize_entry("w", &rows)?;
            }
        }
        m.end()
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize + ?Sized>(value: &T, fmt: ScalarFormat) -> Result<String> {
    with_format(fmt, || serde_json::to_string_pretty(value))
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Parse(e.to_string()))
}

/// SHA-256 of the compact idempotent-form JSON of `value`, hex encoded.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = with_format(ScalarFormat::Idempotent, || serde_json::to_vec(value))
        .expect("in-memory serialization");
    hex::encode(Sha256::digest(&bytes))
}

// ---- parsing ---------------------------------------------------------------

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num(v: &Value, what: &str) -> Result<f64> {
    let x = v.as_f64().ok_or_else(|| perr(format!("{what}: expected a number, got {v}")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite("json number"))
    }
}

fn array<'a>(v: &'a Value, len: Option<usize>, what: &str) -> Result<&'a Vec<Value>> {
    let a = v.as_array().ok_or_else(|| perr(format!("{what}: expected an array")))?;
    match len {
        Some(n) if a.len() != n => Err(perr(format!("{what}: expected {n} elements, got {}", a.len()))),
        _ => Ok(a),
    }
}

/// `[re, im]` or a bare real.
fn complex_value(v: &Value, what: &str) -> Result<Complex64> {
    if v.is_number() {
        return Ok(Complex64::new(num(v, what)?, 0.0));
    }
    let a = array(v, Some(2), what)?;
    Ok(Complex64::new(num(&a[0], what)?, num(&a[1], what)?))
}

fn real4_value(v: &Value, what: &str) -> Result<[f64; 4]> {
    let a = array(v, Some(4), what)?;
    Ok([num(&a[0], what)?, num(&a[1], what)?, num(&a[2], what)?, num(&a[3], what)?])
}

fn object_keys(v: &Value) -> Vec<&str> {
    v.as_object().map(|o| o.keys().map(String::as_str).collect()).unwrap_or_default()
}

pub fn parse_scalar(v: &Value) -> Result<Bicomplex> {
    let obj = v.as_object().ok_or_else(|| perr("scalar: expected an object"))?;
    if let (Some(e1), Some(e2)) = (obj.get("e1"), obj.get("e2")) {
        return Bicomplex::new(complex_value(e1, "scalar e1")?, complex_value(e2, "scalar e2")?);
    }
    if let Some(w) = obj.get("w") {
        return Bicomplex::from_real4(real4_value(w, "scalar w")?);
    }
    if let Some(h) = obj.get("h") {
        let a = array(h, Some(2), "scalar h")?;
        return Ok(Hyperbolic::from_cartesian(num(&a[0], "scalar h")?, num(&a[1], "scalar h")?)?.into());
    }
    Err(perr(format!("scalar: unrecognised form with keys {:?}", object_keys(v))))
}

/// A scalar that must lie in `D` (no imaginary parts).
pub fn parse_hyperbolic(v: &Value) -> Result<Hyperbolic> {
    parse_scalar(v)?
        .as_hyperbolic()
        .ok_or_else(|| perr("expected a hyperbolic (real idempotent components) scalar"))
}

/// CLI literal `"a1,a2"` in idempotent components.
pub fn parse_hyperbolic_literal(s: &str) -> Result<Hyperbolic> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a1, a2] = parts.as_slice() else {
        return Err(perr(format!("hyperbolic literal {s:?}: expected \"a1,a2\"")));
    };
    let p = |t: &str| t.parse::<f64>().map_err(|e| perr(format!("hyperbolic literal {s:?}: {e}")));
    Hyperbolic::new(p(a1)?, p(a2)?)
}

pub fn parse_vector(v: &Value) -> Result<BCVector> {
    let obj = v.as_object().ok_or_else(|| perr("vector: expected an object"))?;
    let vec = if let (Some(e1), Some(e2)) = (obj.get("e1"), obj.get("e2")) {
        let parse = |c: &Value, what: &str| -> Result<DVector<Complex64>> {
            let entries = array(c, None, what)?
                .iter()
                .map(|z| complex_value(z, what))
                .collect::<Result<Vec<_>>>()?;
            Ok(DVector::from_vec(entries))
        };
        BCVector::new(parse(e1, "vector e1")?, parse(e2, "vector e2")?)?
    } else if let Some(w) = obj.get("w") {
        let entries = array(w, None, "vector w")?
            .iter()
            .map(|e| Bicomplex::from_real4(real4_value(e, "vector w")?))
            .collect::<Result<Vec<_>>>()?;
        BCVector::from_entries(&entries)?
    } else {
        return Err(perr(format!("vector: unrecognised form with keys {:?}", object_keys(v))));
    };
    if let Some(dim) = obj.get("dim") {
        let dim = dim.as_u64().ok_or_else(|| perr("vector dim: expected an integer"))? as usize;
        vec.check_dim(dim)?;
    }
    Ok(vec)
}

fn matrix_component(v: &Value, what: &str) -> Result<(usize, usize, Vec<Complex64>)> {
    let rows = array(v, None, what)?;
    let mut cols = None;
    let mut data = Vec::new();
    for row in rows {
        let row = array(row, cols, what)?;
        cols = Some(row.len());
        for z in row {
            data.push(complex_value(z, what)?);
        }
    }
    Ok((rows.len(), cols.unwrap_or(0), data))
}

pub fn parse_matrix(v: &Value) -> Result<BCMatrix> {
    let obj = v.as_object().ok_or_else(|| perr("matrix: expected an object"))?;
    let mat = if let (Some(e1), Some(e2)) = (obj.get("e1"), obj.get("e2")) {
        let (r1, c1, d1) = matrix_component(e1, "matrix e1")?;
        let (r2, c2, d2) = matrix_component(e2, "matrix e2")?;
        if (r1, c1) != (r2, c2) {
            return Err(Error::ShapeMismatch(format!("e1 is {r1}×{c1}, e2 is {r2}×{c2}")));
        }
        BCMatrix::new(
            DMatrix::from_row_slice(r1, c1, &d1),
            DMatrix::from_row_slice(r2, c2, &d2),
        )?
    } else if let Some(w) = obj.get("w") {
        let rows = array(w, None, "matrix w")?;
        let mut cols = None;
        let mut entries = Vec::new();
        for row in rows {
            let row = array(row, cols, "matrix w")?;
            cols = Some(row.len());
            for e in row {
                entries.push(Bicomplex::from_real4(real4_value(e, "matrix w")?)?);
            }
        }
        BCMatrix::from_entries(rows.len(), cols.unwrap_or(0), &entries)?
    } else {
        return Err(perr(format!("matrix: unrecognised form with keys {:?}", object_keys(v))));
    };
    for (key, actual) in [("rows", mat.rows()), ("cols", mat.cols())] {
        if let Some(d) = obj.get(key) {
            let d = d.as_u64().ok_or_else(|| perr(format!("matrix {key}: expected an integer")))?;
            if d as usize != actual {
                return Err(Error::ShapeMismatch(format!("declared {key}={d}, found {actual}")));
            }
        }
    }
    Ok(mat)
}

/// A JSON array of vectors, or `{"kind":"geometric","ratio":…,"seed_vector":…}`.
pub fn parse_series(v: &Value) -> Result<SeriesSource> {
    if let Some(items) = v.as_array() {
        let terms = items.iter().map(parse_vector).collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(perr("series: no terms"));
        }
        let dim = terms[0].dim();
        for t in &terms {
            t.check_dim(dim)?;
        }
        return Ok(SeriesSource::Explicit(terms));
    }
    match v.get("kind").and_then(Value::as_str) {
        Some("geometric") => {
            let ratio = parse_scalar(v.get("ratio").ok_or_else(|| perr("series: missing ratio"))?)?;
            let seed = parse_vector(v.get("seed_vector").ok_or_else(|| perr("series: missing seed_vector"))?)?;
            Ok(SeriesSource::Geometric { ratio, seed })
        }
        Some(other) => Err(perr(format!("series: unknown kind {other:?}"))),
        None => Err(perr("series: expected an array of vectors or a generator object")),
    }
}

/// A JSON array of matrices, or `{"family":[…]}`.
pub fn parse_family(v: &Value) -> Result<Vec<BCMatrix>> {
    let items = match v.get("family") {
        Some(f) => array(f, None, "family")?,
        None => array(v, None, "family")?,
    };
    items.iter().map(parse_matrix).collect()
}

pub fn from_str(s: &str) -> Result<Value> {
    serde_json::from_str(s).map_err(|e| perr(e.to_string()))
}
