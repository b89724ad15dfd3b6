//! Canonical JSON envelopes for series, tables and algebra elements.
//!
//! Envelope shape:
//! `{"entries": [{"value": V, "word": [i1, ..., in]}], "flavor": F,
//!   "order": N, "s": s}`
//! with `F` either `"scalar"` or `"b_valued"`. Keys serialize alphabetically,
//! entries in (length, lexicographic) word order, rationals as
//! `[numerator, denominator]` in lowest terms; output is byte-stable across
//! runs.

use crate::coeffalg::{GroupAlgElem, GroupWord, Matrix};
use crate::scalar::{Rat, Scalar};
use crate::series::{FormalSeries, Word};
use crate::{Error, Result};
use serde_json::{json, Map, Value};

/// A deserialized table payload: scalar or operator-valued.
#[derive(Clone, Debug, PartialEq)]
pub enum TablePayload {
    Scalar(FormalSeries<Rat>),
    BValued(FormalSeries<Matrix<Rat>>),
}

impl TablePayload {
    pub fn s(&self) -> usize {
        match self {
            TablePayload::Scalar(f) => f.s(),
            TablePayload::BValued(f) => f.s(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            TablePayload::Scalar(f) => f.order(),
            TablePayload::BValued(f) => f.order(),
        }
    }
}

/// Exact rational to `[num, den]`; errors when the value does not fit i64.
pub fn rat_to_json(r: &Rat) -> Result<Value> {
    let num = i64::try_from(r.numer().clone())
        .map_err(|_| Error::Capacity(format!("rational {r} exceeds the i64 envelope")))?;
    let den = i64::try_from(r.denom().clone())
        .map_err(|_| Error::Capacity(format!("rational {r} exceeds the i64 envelope")))?;
    Ok(json!([num, den]))
}

pub fn rat_from_json(v: &Value) -> Result<Rat> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::Parse(format!("expected [num, den], got {v}")))?;
    let num = arr[0]
        .as_i64()
        .ok_or_else(|| Error::Parse(format!("bad numerator {}", arr[0])))?;
    let den = arr[1]
        .as_i64()
        .filter(|&d| d != 0)
        .ok_or_else(|| Error::Parse(format!("bad denominator {}", arr[1])))?;
    Ok(Rat::from_ratio(num, den))
}

pub fn matrix_to_json(m: &Matrix<Rat>) -> Result<Value> {
    let mut rows = Vec::with_capacity(m.dim());
    for r in 0..m.dim() {
        let mut row = Vec::with_capacity(m.dim());
        for c in 0..m.dim() {
            row.push(rat_to_json(m.get(r, c))?);
        }
        rows.push(Value::Array(row));
    }
    Ok(Value::Array(rows))
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix<Rat>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let dim = rows.len();
    let mut m = Matrix::zero(dim);
    for (r, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .filter(|c| c.len() == dim)
            .ok_or_else(|| Error::Parse("matrix rows must be square".into()))?;
        for (c, cell) in cells.iter().enumerate() {
            m.set(r, c, rat_from_json(cell)?);
        }
    }
    Ok(m)
}

fn word_to_json(w: &Word) -> Value {
    Value::Array(
        w.letters()
            .iter()
            .map(|&l| Value::Number(l.into()))
            .collect(),
    )
}

fn word_from_json(v: &Value, s: usize) -> Result<Word> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("word must be an array of letters".into()))?;
    let letters = arr
        .iter()
        .map(|x| {
            x.as_u64()
                .filter(|&l| l >= 1 && l <= 255)
                .map(|l| l as u8)
                .ok_or_else(|| Error::Parse(format!("bad letter {x}")))
        })
        .collect::<Result<Vec<u8>>>()?;
    Word::new(letters, s)
}

pub fn table_to_json(t: &TablePayload) -> Result<Value> {
    let mut root = Map::new();
    let (s, order, flavor) = (t.s(), t.order(), match t {
        TablePayload::Scalar(_) => "scalar",
        TablePayload::BValued(_) => "b_valued",
    });
    let mut entries = Vec::new();
    match t {
        TablePayload::Scalar(f) => {
            for (w, c) in f.entries() {
                let mut e = Map::new();
                e.insert("value".into(), rat_to_json(c)?);
                e.insert("word".into(), word_to_json(w));
                entries.push(Value::Object(e));
            }
        }
        TablePayload::BValued(f) => {
            for (w, c) in f.entries() {
                let mut e = Map::new();
                e.insert("value".into(), matrix_to_json(c)?);
                e.insert("word".into(), word_to_json(w));
                entries.push(Value::Object(e));
            }
        }
    }
    root.insert("entries".into(), Value::Array(entries));
    root.insert("flavor".into(), Value::String(flavor.into()));
    root.insert("order".into(), Value::Number(order.into()));
    root.insert("s".into(), Value::Number(s.into()));
    Ok(Value::Object(root))
}

/// Canonical compact text form; byte-stable for identical tables.
pub fn table_to_string(t: &TablePayload) -> Result<String> {
    Ok(serde_json::to_string(&table_to_json(t)?)?)
}

pub fn table_from_json(v: &Value) -> Result<TablePayload> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("table envelope must be an object".into()))?;
    let s = obj
        .get("s")
        .and_then(Value::as_u64)
        .filter(|&s| s >= 1)
        .ok_or_else(|| Error::Parse("missing or bad \"s\"".into()))? as usize;
    let order = obj
        .get("order")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing or bad \"order\"".into()))? as usize;
    let flavor = obj
        .get("flavor")
        .and_then(Value::as_str)
        .unwrap_or("scalar");
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"entries\"".into()))?;
    match flavor {
        "scalar" => {
            let mut f = FormalSeries::zero(s, order);
            for e in entries {
                let (w, v) = entry_parts(e, s)?;
                f.set(w, rat_from_json(v)?)?;
            }
            Ok(TablePayload::Scalar(f))
        }
        "b_valued" => {
            let mut f = FormalSeries::zero(s, order);
            let mut dim = None;
            for e in entries {
                let (w, v) = entry_parts(e, s)?;
                let m = matrix_from_json(v)?;
                match dim {
                    None => dim = Some(m.dim()),
                    Some(d) if d == m.dim() => {}
                    _ => return Err(Error::Parse("inconsistent matrix dimensions".into())),
                }
                f.set(w, m)?;
            }
            Ok(TablePayload::BValued(f))
        }
        other => Err(Error::Parse(format!("unknown flavor {other:?}"))),
    }
}

fn entry_parts<'v>(e: &'v Value, s: usize) -> Result<(Word, &'v Value)> {
    let obj = e
        .as_object()
        .ok_or_else(|| Error::Parse("entry must be an object".into()))?;
    let w = word_from_json(
        obj.get("word")
            .ok_or_else(|| Error::Parse("entry missing \"word\"".into()))?,
        s,
    )?;
    let v = obj
        .get("value")
        .ok_or_else(|| Error::Parse("entry missing \"value\"".into()))?;
    Ok((w, v))
}

pub fn table_from_str(text: &str) -> Result<TablePayload> {
    table_from_json(&serde_json::from_str(text)?)
}

/// Group-algebra element as a list of `{"coeff": [n, d], "word": "abA"}`.
pub fn group_elem_to_json(x: &GroupAlgElem) -> Result<Value> {
    let mut terms = Vec::new();
    for (w, c) in x.terms() {
        let mut e = Map::new();
        e.insert("coeff".into(), rat_to_json(c)?);
        e.insert("word".into(), Value::String(w.to_string()));
        terms.push(Value::Object(e));
    }
    Ok(Value::Array(terms))
}

pub fn group_elem_from_json(v: &Value) -> Result<GroupAlgElem> {
    let terms = v
        .as_array()
        .ok_or_else(|| Error::Parse("group element must be an array of terms".into()))?;
    let mut pairs = Vec::new();
    for t in terms {
        let obj = t
            .as_object()
            .ok_or_else(|| Error::Parse("term must be an object".into()))?;
        let word: GroupWord = obj
            .get("word")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("term missing \"word\"".into()))?
            .parse()?;
        let coeff = rat_from_json(
            obj.get("coeff")
                .ok_or_else(|| Error::Parse("term missing \"coeff\"".into()))?,
        )?;
        pairs.push((word, coeff));
    }
    Ok(GroupAlgElem::from_terms(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    #[test]
    fn scalar_envelope_roundtrip() {
        let mut f = FormalSeries::zero(2, 4);
        f.set(Word::new(vec![1, 2], 2).unwrap(), rat(2, 4)).unwrap();
        f.set(Word::new(vec![2], 2).unwrap(), rat_int(-3)).unwrap();
        let t = TablePayload::Scalar(f);
        let text = table_to_string(&t).unwrap();
        // canonical: reduced rationals, graded word order, alphabetical keys
        assert_eq!(
            text,
            "{\"entries\":[{\"value\":[-3,1],\"word\":[2]},{\"value\":[1,2],\"word\":[1,2]}],\"flavor\":\"scalar\",\"order\":4,\"s\":2}"
        );
        let back = table_from_str(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(table_to_string(&back).unwrap(), text);
    }

    #[test]
    fn b_valued_envelope_roundtrip() {
        let mut f = FormalSeries::zero(1, 3);
        f.set(
            Word::new(vec![1, 1], 1).unwrap(),
            Matrix::identity(2).scale(&rat(1, 3)),
        )
        .unwrap();
        let t = TablePayload::BValued(f);
        let text = table_to_string(&t).unwrap();
        let back = table_from_str(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(table_to_string(&back).unwrap(), text);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(table_from_str("{}").is_err());
        assert!(table_from_str("{\"s\":1,\"order\":2,\"entries\":[{\"word\":[1],\"value\":[1,0]}]}").is_err());
        assert!(table_from_str("{\"s\":1,\"order\":2,\"entries\":[{\"word\":[9],\"value\":[1,1]}]}").is_err());
        assert!(table_from_str("{\"s\":1,\"order\":1,\"entries\":[{\"word\":[1,1],\"value\":[1,1]}]}").is_err());
    }

    #[test]
    fn group_elem_roundtrip() {
        let x = GroupAlgElem::from_terms([
            (GroupWord::identity(), rat(1, 2)),
            (GroupWord::h(), rat_int(2)),
        ]);
        let v = group_elem_to_json(&x).unwrap();
        let back = group_elem_from_json(&v).unwrap();
        assert_eq!(back, x);
    }
}
