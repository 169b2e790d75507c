//! JSON documents for relations, lattices and connections; CSV for walk
//! distributions.
//!
//! Relation document (`.trel.json`):
//!
//! ```json
//! { "format": "tamerel-v1", "semiring": "rat",
//!   "dom": {"finite": ["a", "b"]}, "cod": "int_line",
//!   "entries": [["a", "-1", "1/2"], ["b", "3", "2"]] }
//! ```
//!
//! Entries are sorted by canonical element order, carry no zeros and no
//! repeated keys. A lazy built-in is written as `"builtin": "<name>"` with
//! no `entries`. Exact values are always strings.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Map, Value as Json};

use crate::carrier::{BasisExtension, Carrier, Elem, Monomial};
use crate::error::{Error, Result};
use crate::instances::PartialInjection;
use crate::multiset::FinMultiset;
use crate::omlattice::{GaloisConnection, OrthomodularLattice};
use crate::rel::Rel;
use crate::semiring::{Prob, QISqrt2, QSqrt2, Semiring, Value};
use crate::walk::{self, Branch};

pub const RELATION_FORMAT: &str = "tamerel-v1";
pub const LATTICE_FORMAT: &str = "oml-v1";
pub const CONNECTION_FORMAT: &str = "omlgal-v1";

fn perr(path: &str, msg: impl Into<String>) -> Error {
    Error::parse(path, msg)
}

// ---------------------------------------------------------------- values

fn rat_str(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rat(s: &str, path: &str) -> Result<BigRational> {
    let bad = || perr(path, format!("invalid rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(perr(path, format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

fn as_str<'a>(j: &'a Json, path: &str) -> Result<&'a str> {
    j.as_str().ok_or_else(|| perr(path, format!("expected a string, found {j}")))
}

fn as_f64(j: &Json, path: &str) -> Result<f64> {
    j.as_f64().ok_or_else(|| perr(path, format!("expected a number, found {j}")))
}

fn field<'a>(j: &'a Json, key: &str, path: &str) -> Result<&'a Json> {
    j.get(key).ok_or_else(|| perr(path, format!("missing field {key:?}")))
}

fn finite_f64(x: f64) -> Result<Json> {
    serde_json::Number::from_f64(x)
        .map(Json::Number)
        .ok_or_else(|| Error::NotRepresentable(format!("non-finite float {x}")))
}

fn encode_qsqrt2(v: &QSqrt2) -> Json {
    json!({"a": rat_str(v.a()), "b": rat_str(v.b())})
}

fn decode_qsqrt2(j: &Json, path: &str) -> Result<QSqrt2> {
    let a = parse_rat(as_str(field(j, "a", path)?, &format!("{path}.a"))?, &format!("{path}.a"))?;
    let b = parse_rat(as_str(field(j, "b", path)?, &format!("{path}.b"))?, &format!("{path}.b"))?;
    Ok(QSqrt2::new(a, b))
}

pub fn encode_value(v: &Value) -> Result<Json> {
    Ok(match v {
        Value::Bool(b) => Json::Bool(*b),
        Value::Nat(n) => Json::String(n.to_string()),
        Value::Int(n) => Json::String(n.to_string()),
        Value::Rat(q) => Json::String(rat_str(q)),
        Value::F64(x) => finite_f64(*x)?,
        Value::C64(z) => json!({"re": finite_f64(z.re)?, "im": finite_f64(z.im)?}),
        Value::QSqrt2(q) => encode_qsqrt2(q),
        Value::QISqrt2(q) => json!({"re": encode_qsqrt2(q.re()), "im": encode_qsqrt2(q.im())}),
    })
}

pub fn decode_value(semiring: Semiring, j: &Json, path: &str) -> Result<Value> {
    Ok(match semiring {
        Semiring::Bool2 => Value::Bool(
            j.as_bool()
                .ok_or_else(|| perr(path, format!("expected true/false, found {j}")))?,
        ),
        Semiring::Nat => {
            let s = as_str(j, path)?;
            Value::Nat(BigUint::from_str(s).map_err(|_| perr(path, format!("invalid natural {s:?}")))?)
        }
        Semiring::Int => {
            let s = as_str(j, path)?;
            Value::Int(BigInt::from_str(s).map_err(|_| perr(path, format!("invalid integer {s:?}")))?)
        }
        Semiring::Rat => Value::Rat(parse_rat(as_str(j, path)?, path)?),
        Semiring::F64 => Value::F64(as_f64(j, path)?),
        Semiring::C64 => Value::C64(Complex64::new(
            as_f64(field(j, "re", path)?, &format!("{path}.re"))?,
            as_f64(field(j, "im", path)?, &format!("{path}.im"))?,
        )),
        Semiring::QSqrt2 => Value::QSqrt2(decode_qsqrt2(j, path)?),
        Semiring::QISqrt2 => Value::QISqrt2(QISqrt2::new(
            decode_qsqrt2(field(j, "re", path)?, &format!("{path}.re"))?,
            decode_qsqrt2(field(j, "im", path)?, &format!("{path}.im"))?,
        )),
    })
}

// -------------------------------------------------------------- carriers

pub fn encode_carrier(c: &Carrier) -> Result<Json> {
    Ok(match c {
        Carrier::Empty => json!("empty"),
        Carrier::Unit => json!("unit"),
        Carrier::IntLine => json!("int_line"),
        Carrier::Finite(names) => json!({"finite": names.iter().map(|n| n.to_string()).collect::<Vec<_>>()}),
        Carrier::Sum(a, b) => json!({"sum": [encode_carrier(a)?, encode_carrier(b)?]}),
        Carrier::Pair(a, b) => json!({"pair": [encode_carrier(a)?, encode_carrier(b)?]}),
        Carrier::Monomials(v) => json!({"monomials": encode_carrier(v)?}),
        Carrier::BasisExtension(ext) => {
            let removed = ext
                .removed
                .iter()
                .map(|e| encode_elem(&ext.base, e))
                .collect::<Result<Vec<_>>>()?;
            let adjoined = ext
                .adjoined
                .iter()
                .map(|v| encode_multiset(&ext.base, v))
                .collect::<Result<Vec<_>>>()?;
            json!({"basis_extension": {
                "base": encode_carrier(&ext.base)?,
                "removed": removed,
                "adjoined": adjoined,
            }})
        }
    })
}

fn pair_of<'a>(j: &'a Json, path: &str) -> Result<(&'a Json, &'a Json)> {
    match j.as_array().map(|a| a.as_slice()) {
        Some([a, b]) => Ok((a, b)),
        _ => Err(perr(path, format!("expected a two-element array, found {j}"))),
    }
}

/// Adjoined vectors of a basis extension need the document's semiring.
pub fn decode_carrier(j: &Json, semiring: Semiring, path: &str) -> Result<Carrier> {
    if let Some(s) = j.as_str() {
        return match s {
            "empty" => Ok(Carrier::Empty),
            "unit" => Ok(Carrier::Unit),
            "int_line" => Ok(Carrier::IntLine),
            _ => Err(perr(path, format!("unknown carrier {s:?}"))),
        };
    }
    let obj = j
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or_else(|| perr(path, format!("invalid carrier descriptor {j}")))?;
    let (kind, body) = obj.iter().next().expect("one key");
    let sub = format!("{path}.{kind}");
    match kind.as_str() {
        "finite" => {
            let names = body
                .as_array()
                .ok_or_else(|| perr(&sub, "expected a list of names"))?
                .iter()
                .enumerate()
                .map(|(i, n)| as_str(n, &format!("{sub}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Carrier::finite(names).map_err(|e| perr(&sub, e.to_string()))
        }
        "sum" | "pair" => {
            let (a, b) = pair_of(body, &sub)?;
            let a = decode_carrier(a, semiring, &format!("{sub}[0]"))?;
            let b = decode_carrier(b, semiring, &format!("{sub}[1]"))?;
            Ok(if kind == "sum" { Carrier::sum(a, b) } else { Carrier::pair(a, b) })
        }
        "monomials" => Ok(Carrier::monomials(decode_carrier(body, semiring, &sub)?)),
        "basis_extension" => {
            let base = decode_carrier(field(body, "base", &sub)?, semiring, &format!("{sub}.base"))?;
            let removed = field(body, "removed", &sub)?
                .as_array()
                .ok_or_else(|| perr(&sub, "\"removed\" must be a list"))?
                .iter()
                .enumerate()
                .map(|(i, e)| decode_elem(&base, semiring, e, &format!("{sub}.removed[{i}]")))
                .collect::<Result<_>>()?;
            let adjoined = field(body, "adjoined", &sub)?
                .as_array()
                .ok_or_else(|| perr(&sub, "\"adjoined\" must be a list"))?
                .iter()
                .enumerate()
                .map(|(i, v)| decode_multiset(&base, semiring, v, &format!("{sub}.adjoined[{i}]")))
                .collect::<Result<_>>()?;
            Ok(Carrier::BasisExtension(Arc::new(BasisExtension {
                base,
                removed,
                adjoined,
            })))
        }
        _ => Err(perr(path, format!("unknown carrier kind {kind:?}"))),
    }
}

// -------------------------------------------------------------- elements

fn var_key(vars: &Carrier, v: &Elem) -> Result<String> {
    match v {
        Elem::Named { name, .. } => Ok(name.to_string()),
        _ => Ok(encode_elem(vars, v)?.to_string()),
    }
}

pub fn encode_elem(c: &Carrier, e: &Elem) -> Result<Json> {
    let bad = || Error::NotInCarrier {
        elem: e.to_string(),
        carrier: c.to_string(),
    };
    Ok(match (c, e) {
        (Carrier::Unit, Elem::Star) => json!("*"),
        (Carrier::Finite(_), Elem::Named { name, .. }) => json!(name.to_string()),
        (Carrier::IntLine, Elem::Int(n)) => json!(n.to_string()),
        (Carrier::Sum(a, _), Elem::Left(x)) => json!(["L", encode_elem(a, x)?]),
        (Carrier::Sum(_, b), Elem::Right(y)) => json!(["R", encode_elem(b, y)?]),
        (Carrier::Pair(a, b), Elem::Pair(x, y)) => json!([encode_elem(a, x)?, encode_elem(b, y)?]),
        (Carrier::Monomials(vars), Elem::Mono(m)) => {
            let mut obj = Map::new();
            for (v, n) in m.iter() {
                obj.insert(var_key(vars, v)?, json!(n));
            }
            Json::Object(obj)
        }
        (Carrier::BasisExtension(ext), Elem::Pass(x)) => encode_elem(&ext.base, x)?,
        (Carrier::BasisExtension(ext), Elem::Adjoined(i)) => {
            let v = ext.adjoined.get(*i as usize).ok_or_else(bad)?;
            json!({"vec": encode_multiset(&ext.base, v)?})
        }
        _ => return Err(bad()),
    })
}

pub fn decode_elem(c: &Carrier, semiring: Semiring, j: &Json, path: &str) -> Result<Elem> {
    let bad = || perr(path, format!("{j} is not an element of {c}"));
    let e = match c {
        Carrier::Empty => return Err(bad()),
        Carrier::Unit => match j.as_str() {
            Some("*") => Elem::Star,
            _ => return Err(bad()),
        },
        Carrier::Finite(_) => c.elem(as_str(j, path)?).ok_or_else(bad)?,
        Carrier::IntLine => {
            let s = as_str(j, path)?;
            Elem::Int(s.parse().map_err(|_| perr(path, format!("invalid integer {s:?}")))?)
        }
        Carrier::Sum(a, b) => {
            let (tag, x) = pair_of(j, path)?;
            match tag.as_str() {
                Some("L") => Elem::left(decode_elem(a, semiring, x, &format!("{path}[1]"))?),
                Some("R") => Elem::right(decode_elem(b, semiring, x, &format!("{path}[1]"))?),
                _ => return Err(perr(path, format!("summand tag must be \"L\" or \"R\", found {tag}"))),
            }
        }
        Carrier::Pair(a, b) => {
            let (x, y) = pair_of(j, path)?;
            Elem::pair(
                decode_elem(a, semiring, x, &format!("{path}[0]"))?,
                decode_elem(b, semiring, y, &format!("{path}[1]"))?,
            )
        }
        Carrier::Monomials(vars) => {
            let obj = j
                .as_object()
                .ok_or_else(|| perr(path, format!("expected a monomial object, found {j}")))?;
            let mut exps = Vec::new();
            for (k, n) in obj {
                let sub = format!("{path}.{k}");
                let v = match &**vars {
                    Carrier::Finite(_) => vars.elem(k).ok_or_else(|| perr(&sub, format!("unknown variable {k:?}")))?,
                    _ => {
                        let kj: Json = serde_json::from_str(k).map_err(|e| perr(&sub, e.to_string()))?;
                        decode_elem(vars, semiring, &kj, &sub)?
                    }
                };
                let n = n
                    .as_u64()
                    .filter(|n| (1..=u32::MAX as u64).contains(n))
                    .ok_or_else(|| perr(&sub, format!("exponent must be a positive integer, found {n}")))?;
                exps.push((v, n as u32));
            }
            Elem::Mono(Monomial::from_exponents(exps))
        }
        Carrier::BasisExtension(ext) => {
            if let Some(v) = j.get("vec") {
                let v = decode_multiset(&ext.base, semiring, v, &format!("{path}.vec"))?;
                let i = ext
                    .adjoined
                    .iter()
                    .position(|a| *a == v)
                    .ok_or_else(|| perr(path, "vector is not one of the adjoined vectors"))?;
                Elem::Adjoined(i as u32)
            } else {
                Elem::pass(decode_elem(&ext.base, semiring, j, path)?)
            }
        }
    };
    if !c.contains(&e) {
        return Err(bad());
    }
    Ok(e)
}

/// `[[elem, value], …]` in canonical order.
pub fn encode_multiset(c: &Carrier, m: &FinMultiset) -> Result<Json> {
    m.iter()
        .map(|(e, v)| Ok(json!([encode_elem(c, e)?, encode_value(v)?])))
        .collect::<Result<Vec<_>>>()
        .map(Json::Array)
}

pub fn decode_multiset(c: &Carrier, semiring: Semiring, j: &Json, path: &str) -> Result<FinMultiset> {
    let items = j
        .as_array()
        .ok_or_else(|| perr(path, format!("expected a list of [element, value] pairs, found {j}")))?;
    let mut out = FinMultiset::new(semiring);
    for (i, item) in items.iter().enumerate() {
        let sub = format!("{path}[{i}]");
        let (e, v) = pair_of(item, &sub)?;
        let e = decode_elem(c, semiring, e, &format!("{sub}[0]"))?;
        let v = decode_value(semiring, v, &format!("{sub}[1]"))?;
        if v.is_zero() {
            return Err(perr(&sub, "zero value"));
        }
        if out.contains(&e) {
            return Err(perr(&sub, format!("duplicate element {e}")));
        }
        out.insert_add(e, v);
    }
    Ok(out)
}

// ------------------------------------------------------------- relations

fn relation_json(r: &Rel) -> Result<Map<String, Json>> {
    let mut doc = Map::new();
    doc.insert("format".into(), json!(RELATION_FORMAT));
    doc.insert("semiring".into(), json!(r.semiring().tag()));
    doc.insert("dom".into(), encode_carrier(r.dom())?);
    doc.insert("cod".into(), encode_carrier(r.cod())?);
    if let Some(name) = r.builtin() {
        doc.insert("builtin".into(), json!(name));
        return Ok(doc);
    }
    let rows = r.explicit_rows().ok_or_else(|| {
        Error::LazyUnsupported("only explicit relations and named built-ins can be written".into())
    })?;
    let mut entries = Vec::new();
    for (x, row) in rows {
        let xj = encode_elem(r.dom(), x)?;
        for (y, v) in row.iter() {
            entries.push(json!([xj.clone(), encode_elem(r.cod(), y)?, encode_value(v)?]));
        }
    }
    doc.insert("entries".into(), Json::Array(entries));
    Ok(doc)
}

fn to_text(doc: Json) -> String {
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Serializes an explicit relation (or a named lazy built-in).
pub fn write_relation(r: &Rel) -> Result<String> {
    Ok(to_text(Json::Object(relation_json(r)?)))
}

/// Serializes a partial injection as a 0/1 relation over `bool2` tagged
/// `"pinj": true`.
pub fn write_pinj(f: &PartialInjection) -> Result<String> {
    let mut doc = relation_json(&f.embed())?;
    doc.insert("pinj".into(), json!(true));
    Ok(to_text(Json::Object(doc)))
}

fn parse_json(text: &str) -> Result<Json> {
    serde_json::from_str(text)
        .map_err(|e| perr(&format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

fn check_format(doc: &Json, expected: &str) -> Result<()> {
    let f = as_str(field(doc, "format", "$")?, "$.format")?;
    if f != expected {
        return Err(perr("$.format", format!("expected {expected:?}, found {f:?}")));
    }
    Ok(())
}

fn relation_from_json(doc: &Json) -> Result<Rel> {
    check_format(doc, RELATION_FORMAT)?;
    let tag = as_str(field(doc, "semiring", "$")?, "$.semiring")?;
    let semiring = Semiring::from_tag(tag).ok_or_else(|| perr("$.semiring", format!("unknown semiring {tag:?}")))?;
    let dom = decode_carrier(field(doc, "dom", "$")?, semiring, "$.dom")?;
    let cod = decode_carrier(field(doc, "cod", "$")?, semiring, "$.cod")?;
    if let Some(b) = doc.get("builtin") {
        let name = as_str(b, "$.builtin")?;
        if doc.get("entries").is_some() {
            return Err(perr("$.entries", "a built-in relation carries no entries"));
        }
        let r = builtin(name, semiring)?;
        if r.dom() != &dom || r.cod() != &cod {
            return Err(perr("$", format!("carriers do not match built-in {name:?}")));
        }
        return Ok(r);
    }
    let entries = field(doc, "entries", "$")?
        .as_array()
        .ok_or_else(|| perr("$.entries", "expected a list"))?;
    let mut rows: BTreeMap<Elem, FinMultiset> = BTreeMap::new();
    let mut last: Option<(Elem, Elem)> = None;
    for (i, ent) in entries.iter().enumerate() {
        let path = format!("$.entries[{i}]");
        let [x, y, v] = ent.as_array().map(|a| a.as_slice()).unwrap_or(&[]) else {
            return Err(perr(&path, "expected [dom-element, cod-element, value]"));
        };
        let x = decode_elem(&dom, semiring, x, &format!("{path}[0]"))?;
        let y = decode_elem(&cod, semiring, y, &format!("{path}[1]"))?;
        let v = decode_value(semiring, v, &format!("{path}[2]"))?;
        if v.is_zero() {
            return Err(perr(&path, "zero value"));
        }
        let key = (x, y);
        if let Some(prev) = &last {
            if *prev == key {
                return Err(perr(&path, format!("duplicate entry at ({}, {})", key.0, key.1)));
            }
            if *prev > key {
                return Err(perr(&path, "entries are not in canonical order"));
            }
        }
        rows.entry(key.0.clone())
            .or_insert_with(|| FinMultiset::new(semiring))
            .insert_add(key.1.clone(), v);
        last = Some(key);
    }
    let r = Rel::from_rows(semiring, dom, cod, rows)?;
    if doc.get("pinj").and_then(Json::as_bool) == Some(true) {
        PartialInjection::from_rel(&r).map_err(|e| perr("$.pinj", e.to_string()))?;
    }
    Ok(r)
}

/// Parses and validates a relation document.
pub fn read_relation(text: &str) -> Result<Rel> {
    relation_from_json(&parse_json(text)?)
}

pub fn read_pinj(text: &str) -> Result<PartialInjection> {
    let r = read_relation(text)?;
    PartialInjection::from_rel(&r)
}

/// Looks up a lazy built-in relation by name.
pub fn builtin(name: &str, semiring: Semiring) -> Result<Rel> {
    match name {
        walk::HADAMARD_WALK => walk::hadamard_step(semiring),
        _ => Err(Error::UnknownBuiltin(name.to_string())),
    }
}

/// A state is a relation out of the unit carrier; returns its codomain and
/// the amplitudes.
pub fn read_state(text: &str) -> Result<(Carrier, FinMultiset)> {
    let r = read_relation(text)?;
    if r.dom() != &Carrier::Unit {
        return Err(perr("$.dom", "a state must have domain \"unit\""));
    }
    Ok((r.cod().clone(), r.row(&Elem::Star).into_owned()))
}

pub fn write_state(cod: &Carrier, sigma: &FinMultiset) -> Result<String> {
    write_relation(&Rel::state(cod.clone(), sigma.clone())?)
}

// -------------------------------------------------------------- lattices

fn lattice_json(l: &OrthomodularLattice) -> Json {
    let ortho: Vec<Json> = (0..l.len())
        .map(|x| json!([l.name(x), l.name(l.ortho(x))]))
        .collect();
    let leq: Vec<Json> = l.order_pairs().into_iter().map(|(a, b)| json!([a, b])).collect();
    json!({
        "format": LATTICE_FORMAT,
        "elements": l.names(),
        "leq": leq,
        "ortho": ortho,
    })
}

fn string_pairs(j: &Json, path: &str) -> Result<Vec<(String, String)>> {
    j.as_array()
        .ok_or_else(|| perr(path, "expected a list of pairs"))?
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let sub = format!("{path}[{i}]");
            let (a, b) = pair_of(p, &sub)?;
            Ok((as_str(a, &sub)?.to_string(), as_str(b, &sub)?.to_string()))
        })
        .collect()
}

fn lattice_from_json(doc: &Json, path: &str) -> Result<OrthomodularLattice> {
    if let Some(f) = doc.get("format") {
        if f.as_str() != Some(LATTICE_FORMAT) {
            return Err(perr(&format!("{path}.format"), format!("expected {LATTICE_FORMAT:?}")));
        }
    }
    let names: Vec<String> = field(doc, "elements", path)?
        .as_array()
        .ok_or_else(|| perr(&format!("{path}.elements"), "expected a list"))?
        .iter()
        .enumerate()
        .map(|(i, n)| as_str(n, &format!("{path}.elements[{i}]")).map(str::to_string))
        .collect::<Result<_>>()?;
    let leq = string_pairs(field(doc, "leq", path)?, &format!("{path}.leq"))?;
    let ortho = string_pairs(field(doc, "ortho", path)?, &format!("{path}.ortho"))?;
    OrthomodularLattice::new(&names, &leq, &ortho)
}

/// Lattice document (`.oml.json`): element names, generating order pairs
/// and orthocomplement pairs.
pub fn write_lattice(l: &OrthomodularLattice) -> String {
    to_text(lattice_json(l))
}

pub fn read_lattice(text: &str) -> Result<OrthomodularLattice> {
    lattice_from_json(&parse_json(text)?, "$")
}

/// Connection document: both lattices inline plus the two maps by name.
pub fn write_connection(g: &GaloisConnection) -> String {
    let map = |from: &OrthomodularLattice, to: &OrthomodularLattice, f: &[usize]| {
        let m: Map<String, Json> = f
            .iter()
            .enumerate()
            .map(|(x, &y)| (from.name(x).to_string(), json!(to.name(y))))
            .collect();
        Json::Object(m)
    };
    to_text(json!({
        "format": CONNECTION_FORMAT,
        "source": lattice_json(&g.source),
        "target": lattice_json(&g.target),
        "sharp": map(&g.source, &g.target, &g.sharp),
        "cosharp": map(&g.target, &g.source, &g.cosharp),
    }))
}

pub fn read_connection(text: &str) -> Result<GaloisConnection> {
    let doc = parse_json(text)?;
    check_format(&doc, CONNECTION_FORMAT)?;
    let source = Arc::new(lattice_from_json(field(&doc, "source", "$")?, "$.source")?);
    let target = Arc::new(lattice_from_json(field(&doc, "target", "$")?, "$.target")?);
    let map = |key: &str, from: &OrthomodularLattice, to: &OrthomodularLattice| -> Result<Vec<usize>> {
        let path = format!("$.{key}");
        let obj = field(&doc, key, "$")?
            .as_object()
            .ok_or_else(|| perr(&path, "expected an object"))?;
        (0..from.len())
            .map(|x| {
                let sub = format!("{path}.{}", from.name(x));
                let y = obj
                    .get(from.name(x))
                    .ok_or_else(|| perr(&sub, "missing image"))?;
                let y = as_str(y, &sub)?;
                to.index(y).ok_or_else(|| perr(&sub, format!("unknown element {y:?}")))
            })
            .collect()
    };
    let sharp = map("sharp", &source, &target)?;
    let cosharp = map("cosharp", &target, &source)?;
    GaloisConnection::new(source, target, sharp, cosharp)
}

// ------------------------------------------------------------------- CSV

/// One row of a walk distribution: step, coin branch (absent when
/// marginalized), position, probability.
pub type DistRow = (usize, Option<Branch>, i64, Prob);

/// `step,position,probability` (or `step,branch,position,probability` when
/// `joint`), rows ordered by step, position, branch. Exact probabilities
/// are written as fractions, floats with 17 significant digits.
pub fn write_distribution_csv(rows: &[DistRow], joint: bool) -> String {
    let mut sorted: Vec<&DistRow> = rows.iter().collect();
    sorted.sort_by_key(|a| (a.0, a.2, a.1));
    let mut out = String::from(if joint {
        "step,branch,position,probability\n"
    } else {
        "step,position,probability\n"
    });
    for (step, branch, pos, p) in sorted {
        match (joint, branch) {
            (true, Some(b)) => out.push_str(&format!("{step},{b},{pos},{p}\n")),
            (true, None) => out.push_str(&format!("{step},,{pos},{p}\n")),
            (false, _) => out.push_str(&format!("{step},{pos},{p}\n")),
        }
    }
    out
}
