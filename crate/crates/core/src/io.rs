//! JSON descriptors for phase points and multi-pole Lax matrices.
//!
//! Numbers are written as `"p/q"` strings (exact rationals), pairs of such
//! strings (Gaussian rationals) or `[re, im]` pairs of doubles.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Matrix, QComplex, Rational, Scalar, C64};
use crate::manybody::{ModelKind, PhasePoint};
use crate::spectral_models::{MultiPoleLax, SpectralKind};

/// Scalars with a JSON form.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Option<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n.as_i64().map(<Rational as Scalar>::from_i64),
            _ => None,
        }
    }
}

impl JsonScalar for QComplex {
    fn to_json(&self) -> Value {
        json!([format_rational(&self.re), format_rational(&self.im)])
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Array(a) if a.len() == 2 => Some(QComplex::new(
                Rational::from_json(&a[0])?,
                Rational::from_json(&a[1])?,
            )),
            other => Rational::from_json(other).map(|r| QComplex::new(r, <Rational as Scalar>::zero())),
        }
    }
}

impl JsonScalar for C64 {
    fn to_json(&self) -> Value {
        json!([self.re, self.im])
    }
    fn from_json(v: &Value) -> Option<Self> {
        match v {
            Value::Number(n) => n.as_f64().map(|x| C64::new(x, 0.0)),
            Value::Array(a) if a.len() == 2 => Some(C64::new(a[0].as_f64()?, a[1].as_f64()?)),
            Value::String(s) => parse_rational(s).map(|r| r.to_c64()),
            _ => None,
        }
    }
}

/// Which scalar type a descriptor needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumberFormat {
    Rational,
    Gaussian,
    Float,
}

fn scalar_format(v: &Value) -> NumberFormat {
    match v {
        Value::Number(_) => NumberFormat::Float,
        Value::Array(a) if a.iter().any(Value::is_number) => NumberFormat::Float,
        Value::Array(_) => NumberFormat::Gaussian,
        _ => NumberFormat::Rational,
    }
}

fn classify(v: &Value, depth: usize, acc: &mut NumberFormat) {
    if depth == 0 {
        match (scalar_format(v), *acc) {
            (NumberFormat::Float, _) => *acc = NumberFormat::Float,
            (NumberFormat::Gaussian, NumberFormat::Rational) => *acc = NumberFormat::Gaussian,
            _ => {}
        }
    } else if let Value::Array(a) = v {
        a.iter().for_each(|x| classify(x, depth - 1, acc));
    }
}

/// Float if any double appears, Gaussian if any string pair appears,
/// otherwise rational. Each value comes with its nesting depth
/// (0 for a scalar, 1 for a vector, 2 for a matrix).
pub fn detect_format(values: &[(&Value, usize)]) -> NumberFormat {
    let mut acc = NumberFormat::Rational;
    for (v, depth) in values {
        classify(v, *depth, &mut acc);
    }
    acc
}

pub fn vec_to_json<T: JsonScalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(T::to_json).collect())
}

pub fn vec_from_json<T: JsonScalar>(v: &Value, what: &str) -> Result<Vec<T>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Invalid(format!("`{what}` must be an array")))?;
    arr.iter()
        .map(|x| T::from_json(x).ok_or_else(|| Error::Invalid(format!("bad number in `{what}`: {x}"))))
        .collect()
}

pub fn matrix_to_json<T: JsonScalar>(m: &Matrix<T>) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vec_to_json(r)).collect())
}

pub fn matrix_from_json<T: JsonScalar>(v: &Value, what: &str) -> Result<Matrix<T>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Invalid(format!("`{what}` must be an array of rows")))?;
    let rows: Vec<Vec<T>> = rows.iter().map(|r| vec_from_json(r, what)).collect::<Result<_>>()?;
    Matrix::from_rows(rows)
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Invalid(format!("missing field `{key}`")))
}

/// Many-body descriptor in stored coordinates.
pub fn point_to_json<T: JsonScalar>(kind: ModelKind, x: &PhasePoint<T>) -> Value {
    let mut v = json!({
        "kind": kind.name(),
        "q": vec_to_json(&x.q),
        "p": vec_to_json(&x.p),
        "nu": x.coupling.to_json(),
    });
    if kind.multiplicative_positions() || kind.multiplicative_momenta() {
        v["multiplicative"] = Value::Bool(true);
    }
    v
}

pub fn model_kind_of(v: &Value) -> Result<ModelKind> {
    let k = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Invalid("`kind` must be a string".into()))?;
    ModelKind::from_name(k).ok_or_else(|| Error::Invalid(format!("unknown model kind `{k}`")))
}

fn is_multiplicative(v: &Value) -> bool {
    v.get("multiplicative").and_then(Value::as_bool).unwrap_or(false)
}

/// Parse a descriptor as a point of the given scalar type. Additive input
/// (`"multiplicative": false`) is only accepted by the floating backend for
/// kinds with exponentiated coordinates.
pub fn point_from_json<T: JsonScalar>(v: &Value) -> Result<(ModelKind, PhasePoint<T>)> {
    let kind = model_kind_of(v)?;
    let q: Vec<T> = vec_from_json(field(v, "q")?, "q")?;
    let p: Vec<T> = vec_from_json(field(v, "p")?, "p")?;
    let nu = T::from_json(field(v, "nu")?).ok_or_else(|| Error::Invalid("bad `nu`".into()))?;
    let needs_exp = kind.multiplicative_positions() || kind.multiplicative_momenta();
    if needs_exp && !is_multiplicative(v) {
        if T::EXACT {
            return Err(Error::Invalid(format!(
                "{kind} needs multiplicative coordinates for exact arithmetic"
            )));
        }
        let c = |x: &[T]| x.iter().map(T::to_c64).collect::<Vec<_>>();
        let pt = PhasePoint::from_additive(kind, &c(&q), &c(&p), nu.to_c64())?;
        let back = |x: &[C64]| x.iter().map(|z| T::from_json(&z.to_json()).expect("float")).collect();
        let coupling = T::from_json(&pt.coupling.to_json()).expect("float");
        return Ok((kind, PhasePoint::new(back(&pt.q), back(&pt.p), coupling)?));
    }
    Ok((kind, PhasePoint::new(q, p, nu)?))
}

/// A phase point of whichever scalar type its descriptor uses.
#[derive(Clone, Debug)]
pub enum AnyPoint {
    Rational(ModelKind, PhasePoint<Rational>),
    Gaussian(ModelKind, PhasePoint<QComplex>),
    Float(ModelKind, PhasePoint<C64>),
}

impl AnyPoint {
    pub fn from_json(v: &Value) -> Result<AnyPoint> {
        let parts: Vec<(&Value, usize)> = [("q", 1), ("p", 1), ("nu", 0)]
            .iter()
            .filter_map(|(k, d)| v.get(*k).map(|x| (x, *d)))
            .collect();
        Ok(match detect_format(&parts) {
            NumberFormat::Rational => {
                let (k, x) = point_from_json(v)?;
                AnyPoint::Rational(k, x)
            }
            NumberFormat::Gaussian => {
                let (k, x) = point_from_json(v)?;
                AnyPoint::Gaussian(k, x)
            }
            NumberFormat::Float => {
                let (k, x) = point_from_json(v)?;
                AnyPoint::Float(k, x)
            }
        })
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            AnyPoint::Rational(k, _) | AnyPoint::Gaussian(k, _) | AnyPoint::Float(k, _) => *k,
        }
    }

    pub fn to_c64(&self) -> PhasePoint<C64> {
        match self {
            AnyPoint::Rational(_, x) => x.to_c64(),
            AnyPoint::Gaussian(_, x) => x.to_c64(),
            AnyPoint::Float(_, x) => x.clone(),
        }
    }
}

pub fn lax_to_json<T: JsonScalar>(l: &MultiPoleLax<T>) -> Value {
    json!({
        "kind": l.kind.name(),
        "twist": vec_to_json(&l.twist),
        "poles": vec_to_json(&l.poles),
        "xi": matrix_to_json(&l.xi),
        "eta": matrix_to_json(&l.eta),
    })
}

pub fn lax_from_json<T: JsonScalar>(v: &Value) -> Result<MultiPoleLax<T>> {
    let k = field(v, "kind")?
        .as_str()
        .ok_or_else(|| Error::Invalid("`kind` must be a string".into()))?;
    let kind = SpectralKind::from_name(k).ok_or_else(|| Error::Invalid(format!("unknown Lax kind `{k}`")))?;
    MultiPoleLax::new(
        kind,
        vec_from_json(field(v, "twist")?, "twist")?,
        vec_from_json(field(v, "poles")?, "poles")?,
        matrix_from_json(field(v, "xi")?, "xi")?,
        matrix_from_json(field(v, "eta")?, "eta")?,
    )
}

/// A multi-pole Lax matrix of whichever scalar type its descriptor uses.
#[derive(Clone, Debug)]
pub enum AnyLax {
    Rational(MultiPoleLax<Rational>),
    Gaussian(MultiPoleLax<QComplex>),
    Float(MultiPoleLax<C64>),
}

impl AnyLax {
    pub fn from_json(v: &Value) -> Result<AnyLax> {
        let parts: Vec<(&Value, usize)> = [("twist", 1), ("poles", 1), ("xi", 2), ("eta", 2)]
            .iter()
            .filter_map(|(k, d)| v.get(*k).map(|x| (x, *d)))
            .collect();
        Ok(match detect_format(&parts) {
            NumberFormat::Rational => AnyLax::Rational(lax_from_json(v)?),
            NumberFormat::Gaussian => AnyLax::Gaussian(lax_from_json(v)?),
            NumberFormat::Float => AnyLax::Float(lax_from_json(v)?),
        })
    }
}

/// Short content digest of a descriptor.
pub fn digest(v: &Value) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(v).expect("serializable");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_point_roundtrip() {
        let v = json!({"kind": "rational_cm", "q": ["0/1", "1/1"], "p": ["2/1", "3/1"], "nu": "1/1"});
        let p = AnyPoint::from_json(&v).unwrap();
        let AnyPoint::Rational(kind, x) = p else { panic!("expected rational") };
        assert_eq!(kind, ModelKind::RationalCm);
        let back = point_to_json(kind, &x);
        assert_eq!(back["q"], json!(["0/1", "1/1"]));
    }

    #[test]
    fn float_additive_trig_input_is_exponentiated() {
        let v = json!({"kind": "trig_cms", "q": [[0.0, 0.0], [1.0, 0.0]], "p": [0.5, -0.5], "nu": 0.3, "multiplicative": false});
        let AnyPoint::Float(_, x) = AnyPoint::from_json(&v).unwrap() else { panic!() };
        assert!((x.q[1] - C64::new(1.0f64.exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_additive_trig_rejected() {
        let v = json!({"kind": "trig_rs", "q": ["1/1"], "p": ["1/1"], "nu": "1/2"});
        assert!(AnyPoint::from_json(&v).is_err());
    }

    #[test]
    fn gaussian_detected() {
        let v = json!({"kind": "rational_cm", "q": [["0/1", "1/1"], "1/1"], "p": ["0/1", "0/1"], "nu": "1/1"});
        assert!(matches!(AnyPoint::from_json(&v).unwrap(), AnyPoint::Gaussian(..)));
    }

    #[test]
    fn digest_is_stable() {
        let v = json!({"a": 1, "b": [1, 2]});
        assert_eq!(digest(&v), digest(&v.clone()));
        assert_eq!(digest(&v).len(), 16);
    }
}
