//! JSON encodings of the engine's data: exact scalars as strings, monomials
//! as exponent lists, elements as term lists, cochains as sparse tables, and
//! the self-describing input document the CLI consumes. All maps serialize
//! with sorted keys, so equal data produces byte-identical JSON.

use crate::algebra::{AlgElement, BasedAlgebra, Monomial};
use crate::cohomology::{CochainBasisIndex, ExactMatrix, OutIndex};
use crate::complex::{BiDegree, Cochain, Factorisation, TotalCochain, ValueSort};
use crate::corpus;
use crate::deformation::DeformationData;
use crate::error::{Error, Result};
use crate::scalar::{FieldScalar, QRat, Rat, Scalar};
use crate::twist::{extend_from_generators, Side, TensorElement, TwistMap};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Scalars that can enter and leave documents as canonical strings.
pub trait JsonScalar: FieldScalar {
    fn parse_str(s: &str) -> Result<Self>;
}

impl JsonScalar for Rat {
    fn parse_str(s: &str) -> Result<Self> {
        Rat::parse(s)
    }
}

impl JsonScalar for QRat {
    fn parse_str(s: &str) -> Result<Self> {
        QRat::parse(s)
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn as_object<'v>(v: &'v Value, what: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| invalid(format!("{what} must be an object")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(format!("{what} must be an array")))
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| invalid(format!("{what} must be a string")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| invalid(format!("{what} must be a nonnegative integer")))
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(invalid(format!("unknown field {key:?} in {what}")));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// elements

pub fn monomial_to_json(m: &Monomial) -> Value {
    Value::Array(m.0.iter().map(|&e| json!(e)).collect())
}

pub fn monomial_from_json(v: &Value) -> Result<Monomial> {
    let arr = as_array(v, "monomial")?;
    let exps = arr
        .iter()
        .map(|x| {
            x.as_u64()
                .map(|e| e as u32)
                .ok_or_else(|| invalid("monomial exponents must be nonnegative integers"))
        })
        .collect::<Result<Vec<u32>>>()?;
    Ok(Monomial(exps))
}

pub fn alg_element_to_json<K: Scalar>(x: &AlgElement<K>) -> Value {
    Value::Array(
        x.terms()
            .map(|(m, c)| {
                json!({"monomial": monomial_to_json(m), "coeff": c.canonical_string()})
            })
            .collect(),
    )
}

pub fn alg_element_from_json<K: JsonScalar>(v: &Value) -> Result<AlgElement<K>> {
    let arr = as_array(v, "element")?;
    let mut out = AlgElement::zero();
    for term in arr {
        let obj = as_object(term, "element term")?;
        reject_unknown(obj, &["monomial", "coeff"], "element term")?;
        let m = monomial_from_json(obj.get("monomial").ok_or_else(|| invalid("missing monomial"))?)?;
        let c = K::parse_str(as_str(
            obj.get("coeff").ok_or_else(|| invalid("missing coeff"))?,
            "coeff",
        )?)?;
        out.add_term(m, &c);
    }
    Ok(out)
}

/// X-valued tensors serialize with explicit b and a slots.
pub fn x_element_to_json<K: Scalar>(x: &TensorElement<K>) -> Value {
    Value::Array(
        x.x_terms()
            .map(|(b, a, c)| {
                json!({
                    "b": monomial_to_json(b),
                    "a": monomial_to_json(a),
                    "coeff": c.canonical_string(),
                })
            })
            .collect(),
    )
}

pub fn x_element_from_json<K: JsonScalar>(v: &Value) -> Result<TensorElement<K>> {
    let arr = as_array(v, "tensor")?;
    let mut out = TensorElement::zero(vec![Side::B, Side::A]);
    for term in arr {
        let obj = as_object(term, "tensor term")?;
        reject_unknown(obj, &["b", "a", "coeff"], "tensor term")?;
        let b = monomial_from_json(obj.get("b").ok_or_else(|| invalid("missing b slot"))?)?;
        let a = monomial_from_json(obj.get("a").ok_or_else(|| invalid("missing a slot"))?)?;
        let c = K::parse_str(as_str(
            obj.get("coeff").ok_or_else(|| invalid("missing coeff"))?,
            "coeff",
        )?)?;
        out.add_term(vec![b, a], &c);
    }
    Ok(out)
}

fn value_to_json<K: Scalar>(sort: ValueSort, v: &TensorElement<K>) -> Value {
    match sort {
        ValueSort::Interior => x_element_to_json(v),
        ValueSort::EdgeA | ValueSort::EdgeB => {
            let e = crate::complex::tensor_to_alg(v);
            alg_element_to_json(&e)
        }
    }
}

fn value_from_json<K: JsonScalar>(bd: BiDegree, v: &Value) -> Result<TensorElement<K>> {
    match bd.sort() {
        ValueSort::Interior => x_element_from_json(v),
        ValueSort::EdgeA => Ok(crate::complex::alg_to_tensor(
            &alg_element_from_json::<K>(v)?,
            Side::A,
        )),
        ValueSort::EdgeB => Ok(crate::complex::alg_to_tensor(
            &alg_element_from_json::<K>(v)?,
            Side::B,
        )),
    }
}

// ---------------------------------------------------------------------------
// cochains

/// Serializes a cochain by tabulating it on the tuples within the cap.
pub fn cochain_to_json<K: Scalar>(
    fac: &Factorisation<K>,
    c: &Cochain<K>,
    cap: u32,
) -> Value {
    let bd = c.bidegree();
    let mut entries = Vec::new();
    for (a_args, b_args) in fac.enumerate_tuples(bd.m, bd.n, cap) {
        let v = c.eval(&a_args, &b_args);
        if v.is_zero() {
            continue;
        }
        let mut obj = Map::new();
        if !a_args.is_empty() {
            obj.insert(
                "a_args".into(),
                Value::Array(a_args.iter().map(monomial_to_json).collect()),
            );
        }
        if !b_args.is_empty() {
            obj.insert(
                "b_args".into(),
                Value::Array(b_args.iter().map(monomial_to_json).collect()),
            );
        }
        obj.insert("value".into(), value_to_json(bd.sort(), &v));
        entries.push(Value::Object(obj));
    }
    Value::Array(entries)
}

/// Reads a table cochain; tuples not listed are zero.
pub fn cochain_from_json<K: JsonScalar>(bd: BiDegree, v: &Value) -> Result<Cochain<K>> {
    let arr = as_array(v, "cochain")?;
    let mut table = BTreeMap::new();
    for entry in arr {
        let obj = as_object(entry, "cochain entry")?;
        reject_unknown(obj, &["a_args", "b_args", "value"], "cochain entry")?;
        let a_args = match obj.get("a_args") {
            Some(v) => as_array(v, "a_args")?
                .iter()
                .map(monomial_from_json)
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let b_args = match obj.get("b_args") {
            Some(v) => as_array(v, "b_args")?
                .iter()
                .map(monomial_from_json)
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        if a_args.len() != bd.m || b_args.len() != bd.n {
            return Err(invalid(format!(
                "cochain entry arity mismatch: expected {bd}, got ({}, {})",
                a_args.len(),
                b_args.len()
            )));
        }
        let value = value_from_json::<K>(
            bd,
            obj.get("value").ok_or_else(|| invalid("missing value"))?,
        )?;
        if !value.is_zero() {
            table.insert((a_args, b_args), value);
        }
    }
    Ok(Cochain::from_table(bd, table))
}

// ---------------------------------------------------------------------------
// documents

/// Task parameters shared by all commands.
#[derive(Clone, Debug, Default)]
pub struct TaskParams {
    pub degree_cap: Option<u32>,
    pub order: Option<usize>,
    /// `None` = formal q; `Some(r)` = specialize q to the rational r.
    pub q: Option<Rat>,
}

/// A parsed input document over a fixed scalar kind.
pub struct TypedDocument<K: Scalar> {
    pub fac: Factorisation<K>,
    pub deformation: Option<DeformationData<K>>,
    pub task: TaskParams,
}

/// Which scalar kind a document needs: formal q or plain rationals.
pub fn document_scalar_kind(doc: &Value) -> Result<&'static str> {
    let obj = as_object(doc, "document")?;
    reject_unknown(
        obj,
        &["corpus", "algebras", "twist", "deformation", "task"],
        "document",
    )?;
    let task = parse_task(obj.get("task"))?;
    if let Some(corpus_v) = obj.get("corpus") {
        let c = as_object(corpus_v, "corpus")?;
        let id = as_str(c.get("id").ok_or_else(|| invalid("corpus.id required"))?, "corpus.id")?;
        let entry = corpus::entry(id)
            .ok_or_else(|| invalid(format!("unknown corpus id {id:?}")))?;
        if entry.scalar_kind == "q-rational" && task.q.is_none() {
            return Ok("q-rational");
        }
        return Ok("rational");
    }
    // explicit documents: q_plane / q_flip pull in the q parameter
    let uses_q = ["algebras", "twist"].iter().any(|k| {
        obj.get(*k)
            .map(|v| {
                let s = v.to_string();
                s.contains("q_plane") || s.contains("q_flip")
            })
            .unwrap_or(false)
    });
    if uses_q && task.q.is_none() {
        Ok("q-rational")
    } else {
        Ok("rational")
    }
}

pub fn parse_task(v: Option<&Value>) -> Result<TaskParams> {
    let Some(v) = v else {
        return Ok(TaskParams::default());
    };
    let obj = as_object(v, "task")?;
    reject_unknown(obj, &["degree_cap", "order", "q"], "task")?;
    let degree_cap = obj
        .get("degree_cap")
        .map(|v| as_usize(v, "degree_cap").map(|d| d as u32))
        .transpose()?;
    let order = obj.get("order").map(|v| as_usize(v, "order")).transpose()?;
    let q = match obj.get("q") {
        None => None,
        Some(v) => {
            let s = as_str(v, "q")?;
            if s == "formal" {
                None
            } else {
                Some(Rat::parse(s)?)
            }
        }
    };
    Ok(TaskParams {
        degree_cap,
        order,
        q,
    })
}

fn parse_algebra<K: JsonScalar>(v: &Value, q: &K, default_name: &str) -> Result<Arc<BasedAlgebra<K>>> {
    let obj = as_object(v, "algebra")?;
    reject_unknown(
        obj,
        &["family", "generators", "names", "unit", "table"],
        "algebra",
    )?;
    let family = as_str(
        obj.get("family").ok_or_else(|| invalid("algebra.family required"))?,
        "family",
    )?;
    match family {
        "commutative_poly" => {
            let gens = as_array(
                obj.get("generators")
                    .ok_or_else(|| invalid("commutative_poly needs generators"))?,
                "generators",
            )?
            .iter()
            .map(|g| as_str(g, "generator").map(|s| s.to_string()))
            .collect::<Result<Vec<String>>>()?;
            let refs: Vec<&str> = gens.iter().map(|s| s.as_str()).collect();
            Ok(Arc::new(BasedAlgebra::commutative_poly(default_name, &refs)?))
        }
        "q_plane" => Ok(Arc::new(BasedAlgebra::q_plane(default_name, q.clone()))),
        "table" => {
            let names = as_array(
                obj.get("names").ok_or_else(|| invalid("table needs names"))?,
                "names",
            )?
            .iter()
            .map(|g| as_str(g, "name").map(|s| s.to_string()))
            .collect::<Result<Vec<String>>>()?;
            let unit = as_usize(
                obj.get("unit").ok_or_else(|| invalid("table needs a unit slot"))?,
                "unit",
            )?;
            let table_v = as_array(
                obj.get("table").ok_or_else(|| invalid("table needs entries"))?,
                "table",
            )?;
            let mut table = Vec::with_capacity(table_v.len());
            for row in table_v {
                let row = as_array(row, "table row")?
                    .iter()
                    .map(alg_element_from_json::<K>)
                    .collect::<Result<Vec<_>>>()?;
                table.push(row);
            }
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            Ok(Arc::new(BasedAlgebra::table(default_name, &refs, unit, table)?))
        }
        other => Err(invalid(format!("unknown algebra family {other:?}"))),
    }
}

fn parse_twist<K: JsonScalar>(
    v: &Value,
    a: Arc<BasedAlgebra<K>>,
    b: Arc<BasedAlgebra<K>>,
    q: &K,
) -> Result<TwistMap<K>> {
    let obj = as_object(v, "twist")?;
    reject_unknown(obj, &["kind", "rules", "verify_degree"], "twist")?;
    let kind = as_str(
        obj.get("kind").ok_or_else(|| invalid("twist.kind required"))?,
        "kind",
    )?;
    match kind {
        "flip" => Ok(TwistMap::flip(a, b)),
        "q_flip" => Ok(TwistMap::q_flip(a, b, q.clone())),
        "rules" => {
            let verify_degree = obj
                .get("verify_degree")
                .map(|v| as_usize(v, "verify_degree").map(|d| d as u32))
                .transpose()?
                .unwrap_or(4);
            let rules_v = as_array(
                obj.get("rules").ok_or_else(|| invalid("twist.rules required"))?,
                "rules",
            )?;
            let gens_a: BTreeMap<String, Monomial> = a.generators().into_iter().collect();
            let gens_b: BTreeMap<String, Monomial> = b.generators().into_iter().collect();
            let mut rules = BTreeMap::new();
            for rule in rules_v {
                let obj = as_object(rule, "twist rule")?;
                reject_unknown(obj, &["a_gen", "b_gen", "value"], "twist rule")?;
                let ga = as_str(
                    obj.get("a_gen").ok_or_else(|| invalid("rule needs a_gen"))?,
                    "a_gen",
                )?;
                let gb = as_str(
                    obj.get("b_gen").ok_or_else(|| invalid("rule needs b_gen"))?,
                    "b_gen",
                )?;
                let ma = gens_a
                    .get(ga)
                    .ok_or_else(|| invalid(format!("unknown A generator {ga:?}")))?;
                let mb = gens_b
                    .get(gb)
                    .ok_or_else(|| invalid(format!("unknown B generator {gb:?}")))?;
                let value = x_element_from_json::<K>(
                    obj.get("value").ok_or_else(|| invalid("rule needs value"))?,
                )?;
                rules.insert((ma.clone(), mb.clone()), value);
            }
            extend_from_generators(a, b, rules, verify_degree)
        }
        other => Err(invalid(format!("unknown twist kind {other:?}"))),
    }
}

fn parse_deformation<K: JsonScalar>(fac: &Factorisation<K>, v: &Value) -> Result<DeformationData<K>> {
    let obj = as_object(v, "deformation")?;
    reject_unknown(obj, &["order", "mu_a", "mu_b", "psi"], "deformation")?;
    let order = as_usize(
        obj.get("order").ok_or_else(|| invalid("deformation.order required"))?,
        "order",
    )?;
    let read_series = |key: &str, bd: BiDegree| -> Result<Vec<Cochain<K>>> {
        match obj.get(key) {
            None => Ok(Vec::new()),
            Some(v) => as_array(v, key)?
                .iter()
                .map(|c| cochain_from_json::<K>(bd, c))
                .collect(),
        }
    };
    DeformationData::new(
        fac.clone(),
        order,
        read_series("mu_a", BiDegree::new(2, 0))?,
        read_series("mu_b", BiDegree::new(0, 2))?,
        read_series("psi", BiDegree::new(1, 1))?,
    )
}

/// Parses a document over the scalar kind `K`; `q` is the value the formal
/// parameter takes in this kind (the generator for the rational-function
/// field, a specialized rational otherwise).
pub fn parse_document<K: JsonScalar>(doc: &Value, q: K) -> Result<TypedDocument<K>> {
    let obj = as_object(doc, "document")?;
    let task = parse_task(obj.get("task"))?;
    if let Some(corpus_v) = obj.get("corpus") {
        if obj.contains_key("algebras") || obj.contains_key("twist") || obj.contains_key("deformation")
        {
            return Err(invalid(
                "a corpus document must not also carry explicit algebras/twist/deformation",
            ));
        }
        return parse_corpus_document(corpus_v, q, task);
    }
    let algebras = as_object(
        obj.get("algebras").ok_or_else(|| invalid("document needs algebras"))?,
        "algebras",
    )?;
    reject_unknown(algebras, &["a", "b"], "algebras")?;
    let a = parse_algebra(
        algebras.get("a").ok_or_else(|| invalid("algebras.a required"))?,
        &q,
        "A",
    )?;
    let b = parse_algebra(
        algebras.get("b").ok_or_else(|| invalid("algebras.b required"))?,
        &q,
        "B",
    )?;
    let twist = parse_twist(
        obj.get("twist").ok_or_else(|| invalid("document needs a twist"))?,
        a,
        b,
        &q,
    )?;
    let fac = Factorisation::new(twist);
    let deformation = obj
        .get("deformation")
        .map(|v| parse_deformation(&fac, v))
        .transpose()?;
    Ok(TypedDocument {
        fac,
        deformation,
        task,
    })
}

fn parse_corpus_document<K: JsonScalar>(
    v: &Value,
    q: K,
    task: TaskParams,
) -> Result<TypedDocument<K>> {
    let obj = as_object(v, "corpus")?;
    reject_unknown(obj, &["id", "order", "c"], "corpus")?;
    let id = as_str(obj.get("id").ok_or_else(|| invalid("corpus.id required"))?, "id")?;
    let entry = corpus::entry(id).ok_or_else(|| invalid(format!("unknown corpus id {id:?}")))?;
    let order = match obj.get("order") {
        Some(v) => as_usize(v, "corpus.order")?,
        None => entry.default_order,
    };
    let c = match obj.get("c") {
        Some(v) => Rat::parse(as_str(v, "corpus.c")?)?,
        None => Rat::zero(),
    };
    let mut task = task;
    task.degree_cap = task.degree_cap.or(Some(entry.default_degree_cap));
    task.order = task.order.or(Some(order));
    // corpus constructors are scalar-specific; downcast through K's parser
    build_corpus_typed::<K>(id, order, &c, q, task)
}

/// Builds a corpus case over K. The rational entries require K to parse
/// rational strings; the q-rational entry works for any K given its q.
fn build_corpus_typed<K: JsonScalar>(
    id: &str,
    order: usize,
    c: &Rat,
    q: K,
    task: TaskParams,
) -> Result<TypedDocument<K>> {
    if id == "example_3_4" {
        let (fac, def) = corpus::example_3_4(q, order)?;
        return Ok(TypedDocument {
            fac,
            deformation: Some(def),
            task,
        });
    }
    // remaining entries are rational; re-encode through JSON to the K kind
    let (fac, def) = match id {
        "example_3_3" => corpus::example_3_3(order)?,
        "example_3_3_closed_form" => corpus::example_3_3_closed_form(c, order)?,
        "example_3_5" => corpus::example_3_5(order)?,
        "heisenberg" => corpus::heisenberg(order)?,
        other => return Err(invalid(format!("unknown corpus id {other:?}"))),
    };
    let cap = corpus::entry(id).map(|e| e.default_degree_cap).unwrap_or(4);
    let cap = task.degree_cap.unwrap_or(cap).max(cap);
    let doc = export_document(&fac, &def, cap, "formal")?;
    parse_document(&doc, q)
}

/// Serializes a case as an explicit input document: algebra family
/// descriptors, the twist (generator rules, flip, or weighted flip), and the
/// deformation tabulated within the cap. `q_label` is written into the task
/// when a weighted family is present ("formal" or a rational string).
pub fn export_document<K: JsonScalar>(
    fac: &Factorisation<K>,
    def: &DeformationData<K>,
    cap: u32,
    q_label: &str,
) -> Result<Value> {
    let mut uses_q = false;
    let mut algebra_json = |alg: &BasedAlgebra<K>| -> Result<Value> {
        match alg.shape() {
            crate::algebra::BasisShape::Poly { generators } => {
                match alg.product_rule() {
                    crate::algebra::ProductRule::AddExponents => Ok(json!({
                        "family": "commutative_poly",
                        "generators": generators,
                    })),
                    crate::algebra::ProductRule::QWeighted { .. } => {
                        uses_q = true;
                        Ok(json!({"family": "q_plane"}))
                    }
                    _ => Err(invalid("cannot export a closure-product algebra")),
                }
            }
            crate::algebra::BasisShape::Table { names, unit } => {
                let dim = names.len();
                let mut table = Vec::with_capacity(dim);
                for i in 0..dim {
                    let mut row = Vec::with_capacity(dim);
                    for j in 0..dim {
                        let v = alg.basis_product(
                            &Monomial(vec![i as u32]),
                            &Monomial(vec![j as u32]),
                        );
                        row.push(alg_element_to_json(&v));
                    }
                    table.push(Value::Array(row));
                }
                Ok(json!({
                    "family": "table",
                    "names": names,
                    "unit": unit,
                    "table": table,
                }))
            }
        }
    };
    let a_json = algebra_json(&fac.a)?;
    let b_json = algebra_json(&fac.b)?;
    let twist_json = match fac.twist.descriptor() {
        crate::twist::TwistDescriptor::Flip => json!({"kind": "flip"}),
        crate::twist::TwistDescriptor::QFlip => {
            uses_q = true;
            json!({"kind": "q_flip"})
        }
        crate::twist::TwistDescriptor::Generators => {
            let mut rules = Vec::new();
            for (ga_name, ga) in fac.a.generators() {
                for (gb_name, gb) in fac.b.generators() {
                    let v = fac.twist.apply_basis(&ga, &gb)?;
                    rules.push(json!({
                        "a_gen": ga_name,
                        "b_gen": gb_name,
                        "value": x_element_to_json(&v),
                    }));
                }
            }
            json!({"kind": "rules", "rules": rules, "verify_degree": 2})
        }
        crate::twist::TwistDescriptor::Closure => {
            return Err(invalid("cannot export a closure twist"))
        }
    };
    let series_json = |bd: BiDegree, at: &dyn Fn(usize) -> Cochain<K>| -> Value {
        let _ = bd;
        Value::Array(
            (1..=def.order())
                .map(|i| cochain_to_json(fac, &at(i), cap))
                .collect(),
        )
    };
    let mut task = Map::new();
    task.insert("degree_cap".into(), json!(cap));
    task.insert("order".into(), json!(def.order()));
    if uses_q {
        task.insert("q".into(), json!(q_label));
    }
    let doc = json!({
        "algebras": {
            "a": a_json,
            "b": b_json,
        },
        "twist": twist_json,
        "deformation": {
            "order": def.order(),
            "mu_a": series_json(BiDegree::new(2, 0), &|i| def.mu_a_at(i)),
            "mu_b": series_json(BiDegree::new(0, 2), &|i| def.mu_b_at(i)),
            "psi": series_json(BiDegree::new(1, 1), &|i| def.psi_at(i)),
        },
        "task": Value::Object(task),
    });
    Ok(doc)
}

// ---------------------------------------------------------------------------
// matrices

/// Sparse triplet form with the row/column coordinate descriptors alongside.
pub fn matrix_to_json<K: Scalar>(
    m: &ExactMatrix<K>,
    rows: &[CochainBasisIndex],
    cols: &[CochainBasisIndex],
) -> Value {
    let triplets: Vec<Value> = m
        .entries()
        .map(|(&(r, c), v)| json!([r, c, v.canonical_string()]))
        .collect();
    json!({
        "rows": m.rows,
        "cols": m.cols,
        "entries": triplets,
        "row_index": rows.iter().map(basis_index_to_json).collect::<Vec<_>>(),
        "col_index": cols.iter().map(basis_index_to_json).collect::<Vec<_>>(),
    })
}

pub fn basis_index_to_json(ix: &CochainBasisIndex) -> Value {
    let out = match &ix.out {
        OutIndex::Edge(m) => json!({"monomial": monomial_to_json(m)}),
        OutIndex::Interior(b, a) => json!({
            "b": monomial_to_json(b),
            "a": monomial_to_json(a),
        }),
    };
    json!({
        "bidegree": [ix.bidegree.m, ix.bidegree.n],
        "a_args": ix.a_args.iter().map(monomial_to_json).collect::<Vec<_>>(),
        "b_args": ix.b_args.iter().map(monomial_to_json).collect::<Vec<_>>(),
        "out": out,
    })
}

/// A total cochain tabulated as JSON, component by component.
pub fn total_cochain_to_json<K: Scalar>(
    fac: &Factorisation<K>,
    tc: &TotalCochain<K>,
    cap: u32,
) -> Value {
    let mut components = Map::new();
    for bd in TotalCochain::<K>::bidegrees(tc.degree()) {
        let c = tc.component(bd.m, bd.n);
        components.insert(format!("{},{}", bd.m, bd.n), cochain_to_json(fac, &c, cap));
    }
    Value::Object(components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_round_trip() {
        let mut x = AlgElement::<Rat>::zero();
        x.add_term(Monomial(vec![2, 1]), &Rat::from_frac(3, 4));
        x.add_term(Monomial(vec![0, 0]), &Rat::from_int(-2));
        let v = alg_element_to_json(&x);
        let back = alg_element_from_json::<Rat>(&v).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn unknown_fields_rejected() {
        let doc = json!({"algebrs": {}});
        assert!(document_scalar_kind(&doc).is_err());
        let term = json!([{"monomial": [1], "coeff": "1/1", "extra": 0}]);
        assert!(alg_element_from_json::<Rat>(&term).is_err());
    }

    #[test]
    fn corpus_document_parses() {
        let doc = json!({
            "corpus": {"id": "example_3_5"},
            "task": {"degree_cap": 2}
        });
        assert_eq!(document_scalar_kind(&doc).unwrap(), "rational");
        let typed = parse_document::<Rat>(&doc, Rat::one()).unwrap();
        assert!(typed.fac.is_finite_dimensional());
        assert!(typed.deformation.is_some());
        let q_doc = json!({"corpus": {"id": "example_3_4"}});
        assert_eq!(document_scalar_kind(&q_doc).unwrap(), "q-rational");
    }

    #[test]
    fn exported_document_reimports_identically() {
        let (fac, def) = corpus::example_3_3(2).unwrap();
        let doc = export_document(&fac, &def, 4, "formal").unwrap();
        let typed = parse_document::<Rat>(&doc, Rat::one()).unwrap();
        let redef = typed.deformation.unwrap();
        for (a_args, b_args) in fac.enumerate_tuples(1, 1, 4) {
            assert_eq!(
                redef.psi_at(1).eval(&a_args, &b_args),
                def.psi_at(1).eval(&a_args, &b_args)
            );
        }
        for (a_args, _) in fac.enumerate_tuples(2, 0, 4) {
            assert_eq!(
                redef.mu_a_at(1).eval(&a_args, &[]),
                def.mu_a_at(1).eval(&a_args, &[])
            );
        }
    }
}
