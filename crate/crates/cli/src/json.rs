//! JSON codec for the kernel's value types.
//!
//! Rationals travel as `"p/q"` strings (bare JSON integers are accepted on
//! input), interval endpoints as exact decimal strings.

use std::collections::BTreeMap;

use arithline::affine_line::{Fiber, LinePoint};
use arithline::base_space::{BaseCompact, BasePoint, Exponent, Place};
use arithline::cousin_cartan::SeriesMatrix;
use arithline::covers_galois::{named_group, GroupTable};
use arithline::norm::dyadic_to_decimal;
use arithline::poly::Poly;
use arithline::rational::{fmt_q, parse_q};
use arithline::series_ring::{AnnulusSpec, Congruence, LaurentPoly};
use arithline::{Error, NormValue, Result, Q};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

fn malformed(what: &str, v: &Value) -> Error {
    Error::Malformed(format!("expected {what}, got {v}"))
}

// ---------- decoding ----------

pub fn rational(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_q(&n.to_string()),
        _ => Err(malformed("a rational", v)),
    }
}

pub fn integer(v: &Value) -> Result<i64> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| malformed("an integer", v)),
        Value::String(s) => s.trim().parse().map_err(|_| malformed("an integer", v)),
        _ => Err(malformed("an integer", v)),
    }
}

pub fn unsigned(v: &Value) -> Result<u64> {
    let k = integer(v)?;
    u64::try_from(k).map_err(|_| malformed("a nonnegative integer", v))
}

pub fn big_integer(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer literal")),
        Value::String(s) => s.trim().parse().map_err(|_| malformed("an integer", v)),
        _ => Err(malformed("an integer", v)),
    }
}

pub fn boolean(v: &Value) -> Result<bool> {
    v.as_bool().ok_or_else(|| malformed("a boolean", v))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| malformed(what, v))
}

/// Ascending coefficient list.
pub fn poly(v: &Value) -> Result<Poly> {
    Ok(Poly::new(array(v, "a coefficient array")?.iter().map(rational).collect::<Result<_>>()?))
}

/// A coefficient array (from degree 0), or `{"terms": [[k, c], ...], "trunc": m}`.
pub fn laurent(v: &Value) -> Result<LaurentPoly> {
    match v {
        Value::Array(_) => Ok(LaurentPoly::from_poly(&poly(v)?)),
        Value::Object(o) => {
            let terms = o.get("terms").ok_or_else(|| malformed("a \"terms\" field", v))?;
            let mut map = BTreeMap::new();
            for t in array(terms, "a term list")? {
                let pair = array(t, "a [k, c] pair")?;
                if pair.len() != 2 {
                    return Err(malformed("a [k, c] pair", t));
                }
                let c = rational(&pair[1])?;
                *map.entry(integer(&pair[0])?).or_insert_with(|| Q::from_integer(0.into())) += c;
            }
            let trunc = match o.get("trunc") {
                None | Some(Value::Null) => None,
                Some(t) => Some(integer(t)?),
            };
            Ok(LaurentPoly::new(map, trunc))
        }
        _ => Err(malformed("a Laurent polynomial", v)),
    }
}

pub fn laurent_list(v: &Value) -> Result<Vec<LaurentPoly>> {
    array(v, "a list of series")?.iter().map(laurent).collect()
}

pub fn place(v: &Value) -> Result<Place> {
    match v {
        Value::String(s) if s.eq_ignore_ascii_case("inf") => Ok(Place::Infinite),
        _ => Place::finite(unsigned(v)?),
    }
}

pub fn exponent(v: &Value) -> Result<Exponent> {
    match v {
        Value::String(s) if s.eq_ignore_ascii_case("inf") => Ok(Exponent::Infinite),
        _ => Ok(Exponent::Finite(rational(v)?)),
    }
}

/// `{"place": "inf" | prime | null, "exp": "p/q" | "inf"}`.
pub fn base_point(v: &Value) -> Result<BasePoint> {
    let o = v.as_object().ok_or_else(|| malformed("a base point object", v))?;
    let pl = match o.get("place") {
        None | Some(Value::Null) => None,
        Some(p) => Some(place(p)?),
    };
    let exp = match o.get("exp") {
        None => Exponent::Finite(Q::from_integer(0.into())),
        Some(e) => exponent(e)?,
    };
    BasePoint::new(pl, exp)
}

/// `{"kind": "whole" | "central" | "point" | "segment" | "star", ...}`.
pub fn compact(v: &Value) -> Result<BaseCompact> {
    let o = v.as_object().ok_or_else(|| malformed("a compact object", v))?;
    let kind = o.get("kind").and_then(Value::as_str).ok_or_else(|| malformed("a \"kind\" field", v))?;
    let field = |k: &str| o.get(k).ok_or_else(|| Error::Malformed(format!("compact needs \"{k}\"")));
    match kind {
        "whole" => Ok(BaseCompact::whole()),
        "central" => Ok(BaseCompact::central()),
        "point" => Ok(BaseCompact::point(&base_point(field("point")?)?)),
        "segment" => BaseCompact::segment(place(field("place")?)?, exponent(field("u")?)?, exponent(field("v")?)?),
        "star" => {
            let cuts = field("cuts")?.as_object().ok_or_else(|| malformed("a cut map", v))?;
            let mut m = BTreeMap::new();
            for (k, c) in cuts {
                m.insert(place(&Value::String(k.clone()))?, exponent(c)?);
            }
            BaseCompact::star(m)
        }
        _ => Err(malformed("a known compact kind", v)),
    }
}

/// `{"base": point, "fiber": {"kind": "disk" | "closed" | "outer" | "arch", ...}}`.
pub fn line_point(v: &Value) -> Result<LinePoint> {
    let o = v.as_object().ok_or_else(|| malformed("a line point object", v))?;
    let base = base_point(o.get("base").ok_or_else(|| malformed("a \"base\" field", v))?)?;
    let fv = o.get("fiber").ok_or_else(|| malformed("a \"fiber\" field", v))?;
    let f = fv.as_object().ok_or_else(|| malformed("a fiber object", fv))?;
    let get = |k: &str| f.get(k).ok_or_else(|| Error::Malformed(format!("fiber needs \"{k}\"")));
    let fiber = match f.get("kind").and_then(Value::as_str) {
        Some("disk") => Fiber::UmDisk { alpha: rational(get("alpha")?)?, r: rational(get("r")?)? },
        Some("closed") => Fiber::TrivClosed { p: poly(get("p")?)?, r: rational(get("r")?)? },
        Some("outer") => Fiber::TrivOuter { r: rational(get("r")?)? },
        Some("arch") => Fiber::Arch { re: rational(get("re")?)?, im: rational(get("im")?)? },
        _ => return Err(malformed("a known fiber kind", fv)),
    };
    LinePoint::new(base, fiber)
}

/// `{"v": compact, "s": r, "t": r}`; `s` defaults to 0 (a disk).
pub fn annulus(v: &Value) -> Result<AnnulusSpec> {
    let o = v.as_object().ok_or_else(|| malformed("an annulus object", v))?;
    let c = compact(o.get("v").ok_or_else(|| malformed("a \"v\" field", v))?)?;
    let s = o.get("s").map(rational).transpose()?.unwrap_or_else(|| Q::from_integer(0.into()));
    let t = rational(o.get("t").ok_or_else(|| malformed("a \"t\" field", v))?)?;
    AnnulusSpec::new(c, s, t)
}

pub fn matrix(v: &Value) -> Result<SeriesMatrix> {
    let rows = array(v, "a matrix (array of rows)")?;
    SeriesMatrix::new(rows.iter().map(laurent_list).collect::<Result<_>>()?)
}

/// A library name such as `"D4"`, or a 1-based multiplication table.
pub fn group(v: &Value) -> Result<GroupTable> {
    match v {
        Value::String(name) => named_group(name).ok_or_else(|| Error::Malformed(format!("unknown group {name:?}"))),
        Value::Array(rows) => {
            let table = rows
                .iter()
                .map(|r| array(r, "a table row")?.iter().map(|x| unsigned(x).map(|k| k as usize)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            GroupTable::from_one_based(&table)
        }
        _ => Err(malformed("a group name or table", v)),
    }
}

// ---------- encoding ----------

pub fn q(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

pub fn norm(n: &NormValue) -> Value {
    match n {
        NormValue::Exact(x) => json!({ "exact": fmt_q(x) }),
        NormValue::Interval { lo, hi } => json!({ "lo": dyadic_to_decimal(lo), "hi": dyadic_to_decimal(hi) }),
    }
}

pub fn norms(ns: &[NormValue]) -> Value {
    Value::Array(ns.iter().map(norm).collect())
}

pub fn poly_out(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(q).collect())
}

pub fn laurent_out(f: &LaurentPoly) -> Value {
    json!({
        "terms": f.coeffs().iter().map(|(k, c)| json!([k, fmt_q(c)])).collect::<Vec<_>>(),
        "trunc": f.trunc(),
    })
}

pub fn matrix_out(m: &SeriesMatrix) -> Value {
    Value::Array(m.entries().iter().map(|row| Value::Array(row.iter().map(laurent_out).collect())).collect())
}

pub fn place_out(p: Place) -> Value {
    match p {
        Place::Infinite => json!("inf"),
        Place::Finite(p) => json!(p),
    }
}

pub fn base_point_out(x: &BasePoint) -> Value {
    let exp = match x.exponent() {
        Exponent::Finite(e) => fmt_q(&e),
        Exponent::Infinite => "inf".into(),
    };
    json!({ "place": x.place().map(place_out), "exp": exp })
}

pub fn line_point_out(x: &LinePoint) -> Value {
    let fiber = match &x.fiber {
        Fiber::UmDisk { alpha, r } => json!({ "kind": "disk", "alpha": fmt_q(alpha), "r": fmt_q(r) }),
        Fiber::TrivClosed { p, r } => json!({ "kind": "closed", "p": poly_out(p), "r": fmt_q(r) }),
        Fiber::TrivOuter { r } => json!({ "kind": "outer", "r": fmt_q(r) }),
        Fiber::Arch { re, im } => json!({ "kind": "arch", "re": fmt_q(re), "im": fmt_q(im) }),
    };
    json!({ "base": base_point_out(&x.base), "fiber": fiber })
}

pub fn congruence_out(c: &Congruence) -> Value {
    match c {
        Congruence::ModT(m) => json!({ "mod_t": m }),
        Congruence::ModTInv(m) => json!({ "mod_t_inv": m }),
        Congruence::NormOnly => json!("norm_only"),
    }
}

/// Puts `"v": 1` in front of an object payload.
pub fn versioned(payload: Value) -> Value {
    let mut out = Map::new();
    out.insert("v".into(), json!(1));
    match payload {
        Value::Object(o) => out.extend(o),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_points_and_rationals() {
        assert_eq!(rational(&json!("3/6")).unwrap(), Q::new(1.into(), 2.into()));
        assert_eq!(rational(&json!(-4)).unwrap(), Q::from_integer((-4).into()));
        assert!(rational(&json!(0.5)).is_err());
        let x = base_point(&json!({"place": 2, "exp": "1"})).unwrap();
        assert_eq!(x, BasePoint::branch(Place::Finite(2), Q::from_integer(1.into())).unwrap());
        assert_eq!(base_point(&json!({"place": 5, "exp": "inf"})).unwrap(), BasePoint::Extreme { p: 5 });
        assert_eq!(base_point(&json!({"place": null, "exp": "0"})).unwrap(), BasePoint::Central);
        assert!(base_point(&json!({"place": 4, "exp": "1"})).is_err());
    }

    #[test]
    fn laurent_round_trip() {
        let f = laurent(&json!({"terms": [[-2, "1/3"], [0, 5], [3, "-7"]], "trunc": 10})).unwrap();
        assert_eq!(laurent(&laurent_out(&f)).unwrap(), f);
        let g = laurent(&json!([1, 0, "2"])).unwrap();
        assert_eq!(laurent(&laurent_out(&g)).unwrap(), g);
    }

    #[test]
    fn points_round_trip() {
        for v in [
            json!({"base": {"place": 3, "exp": "1/2"}, "fiber": {"kind": "disk", "alpha": "1/3", "r": "2"}}),
            json!({"base": {"place": null, "exp": "0"}, "fiber": {"kind": "closed", "p": ["1", "0", "1"], "r": "1/2"}}),
            json!({"base": {"place": "inf", "exp": "1"}, "fiber": {"kind": "arch", "re": "1", "im": "-2"}}),
        ] {
            let x = line_point(&v).unwrap();
            assert_eq!(line_point(&line_point_out(&x)).unwrap(), x);
        }
    }
}
