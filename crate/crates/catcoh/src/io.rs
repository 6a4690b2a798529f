//! JSON file formats: categories (tensor and bitensor), groups, cochains,
//! bigraded cochains, cocycle tables, and deformed categories with
//! jet-valued associator entries.
//!
//! Scalars are stored as strings: `p/q` or `n` for rationals, a decimal
//! residue for prime fields, `[c0,c1,...]` for cyclotomic coefficient
//! vectors. Jet entries read `c0 + c1*e + c2*e^2`.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::category::{AssociatorTable, BitensorDatum, CounitIso, FusionDatum, UnitIso, UnitSpec};
use crate::complex::Cochain;
use crate::deform::DeformationCandidate;
use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::matrix::Mat;
use crate::poly::parse_poly;
use crate::scalar::{parse_scalar, FieldSpec, Scalar};
use crate::tree::{channels, ParenTree};

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn get<'v>(v: &'v Value, key: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| perr(format!("missing field {key:?}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| perr(format!("{what} must be a nonnegative integer")))
}

fn as_str<'v>(v: &'v Value, what: &str) -> Result<&'v str> {
    v.as_str()
        .ok_or_else(|| perr(format!("{what} must be a string")))
}

fn as_array<'v>(v: &'v Value, what: &str) -> Result<&'v Vec<Value>> {
    v.as_array()
        .ok_or_else(|| perr(format!("{what} must be an array")))
}

pub fn parse_field(v: &Value) -> Result<FieldSpec> {
    let kind = as_str(get(v, "kind")?, "field.kind")?;
    let f = match kind {
        "rational" => FieldSpec::Rational,
        "prime" => FieldSpec::Prime(get(v, "p")?.as_u64().ok_or_else(|| perr("field.p"))?),
        "cyclotomic" => {
            FieldSpec::Cyclotomic(get(v, "n")?.as_u64().ok_or_else(|| perr("field.n"))? as u32)
        }
        other => return Err(perr(format!("unknown field kind {other:?}"))),
    };
    f.validate()?;
    Ok(f)
}

pub fn field_to_json(f: &FieldSpec) -> Value {
    match f {
        FieldSpec::Rational => json!({"kind": "rational"}),
        FieldSpec::Prime(p) => json!({"kind": "prime", "p": p}),
        FieldSpec::Cyclotomic(n) => json!({"kind": "cyclotomic", "n": n}),
    }
}

/// Command-line style field override: `rational`, `prime:p`, `cyclotomic:n`.
pub fn parse_field_text(s: &str) -> Result<FieldSpec> {
    let f = if s == "rational" {
        FieldSpec::Rational
    } else if let Some(p) = s.strip_prefix("prime:") {
        FieldSpec::Prime(p.parse().map_err(|_| perr("bad prime"))?)
    } else if let Some(n) = s.strip_prefix("cyclotomic:") {
        FieldSpec::Cyclotomic(n.parse().map_err(|_| perr("bad cyclotomic index"))?)
    } else {
        return Err(perr(format!("unknown field {s:?}")));
    };
    f.validate()?;
    Ok(f)
}

fn parse_matrix(v: &Value, field: &FieldSpec, rows: usize, cols: usize) -> Result<Mat<Scalar>> {
    let data = as_array(v, "matrix")?;
    if data.len() != rows {
        return Err(perr(format!(
            "matrix has {} rows, expected {rows}",
            data.len()
        )));
    }
    let mut m = Mat::new(rows, cols);
    for (r, row) in data.iter().enumerate() {
        let row = as_array(row, "matrix row")?;
        if row.len() != cols {
            return Err(perr(format!(
                "matrix row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (c, cell) in row.iter().enumerate() {
            let s = parse_scalar(as_str(cell, "matrix entry")?, field)?;
            m.set(r, c, s);
        }
    }
    Ok(m)
}

fn matrix_to_json(m: &Mat<Scalar>, field: &FieldSpec) -> Value {
    let zero = field.zero();
    let dense = m.to_dense(&zero);
    Value::Array(
        dense
            .into_iter()
            .map(|row| {
                Value::Array(
                    row.into_iter()
                        .map(|s| Value::String(s.to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn parse_usize_3d(v: &Value, what: &str, r: usize) -> Result<Vec<Vec<Vec<usize>>>> {
    let a = as_array(v, what)?;
    if a.len() != r {
        return Err(perr(format!("{what} must have {r} planes")));
    }
    a.iter()
        .map(|p| {
            let p = as_array(p, what)?;
            if p.len() != r {
                return Err(perr(format!("{what} plane must have {r} rows")));
            }
            p.iter()
                .map(|row| {
                    let row = as_array(row, what)?;
                    if row.len() != r {
                        return Err(perr(format!("{what} row must have {r} entries")));
                    }
                    row.iter().map(|x| as_usize(x, what)).collect()
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// groups
// ---------------------------------------------------------------------------

pub fn load_group(path: &Path) -> Result<GroupTable> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| perr(format!("{e}")))?;
    group_from_json(&v)
}

pub fn group_from_json(v: &Value) -> Result<GroupTable> {
    let order = as_usize(get(v, "order")?, "order")?;
    let mul_v = as_array(get(v, "mul")?, "mul")?;
    if mul_v.len() != order {
        return Err(perr("mul table has wrong number of rows"));
    }
    let mut mul = Vec::with_capacity(order);
    for row in mul_v {
        let row = as_array(row, "mul row")?;
        mul.push(
            row.iter()
                .map(|x| as_usize(x, "mul entry"))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    GroupTable::new(mul)
}

pub fn group_to_json(g: &GroupTable) -> Value {
    json!({"order": g.order(), "mul": g.table()})
}

// ---------------------------------------------------------------------------
// categories
// ---------------------------------------------------------------------------

pub enum CategoryFile {
    Tensor(FusionDatum),
    Bitensor(BitensorDatum),
}

impl CategoryFile {
    pub fn base(&self) -> &FusionDatum {
        match self {
            CategoryFile::Tensor(d) => d,
            CategoryFile::Bitensor(d) => &d.base,
        }
    }
}

/// Parses a category file without running the coherence validation; the
/// structural invariants (shapes, ring axioms) are still enforced.
pub fn parse_category(text: &str, field_override: Option<&FieldSpec>) -> Result<CategoryFile> {
    let v: Value = serde_json::from_str(text).map_err(|e| perr(format!("{e}")))?;
    let field = match field_override {
        Some(f) => f.clone(),
        None => parse_field(get(&v, "field")?)?,
    };
    let simples: Vec<String> = as_array(get(&v, "simples")?, "simples")?
        .iter()
        .map(|s| as_str(s, "simple label").map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    let r = simples.len();
    let unit = match get(&v, "unit")? {
        Value::Number(n) => {
            UnitSpec::Simple(n.as_u64().ok_or_else(|| perr("unit index"))? as usize)
        }
        Value::Array(a) => UnitSpec::Sum(
            a.iter()
                .map(|x| as_usize(x, "unit multiplicity"))
                .collect::<Result<Vec<_>>>()?,
        ),
        _ => return Err(perr("unit must be an index or a multiplicity vector")),
    };
    let fusion = parse_usize_3d(get(&v, "fusion")?, "fusion", r)?;
    let mut blocks = BTreeMap::new();
    if let Some(fv) = v.get("F") {
        for b in as_array(fv, "F")? {
            let i = as_usize(get(b, "i")?, "F.i")?;
            let j = as_usize(get(b, "j")?, "F.j")?;
            let k = as_usize(get(b, "k")?, "F.k")?;
            let l = as_usize(get(b, "l")?, "F.l")?;
            let rows = as_usize(get(b, "rows")?, "F.rows")?;
            let cols = as_usize(get(b, "cols")?, "F.cols")?;
            let m = parse_matrix(get(b, "matrix")?, &field, rows, cols)?;
            blocks.insert((i, j, k, l), m);
        }
    }
    let unit_iso = match v.get("unit_iso") {
        None => None,
        Some(u) => {
            let rho = as_array(get(u, "rho")?, "unit_iso.rho")?
                .iter()
                .map(|s| parse_scalar(as_str(s, "rho entry")?, &field))
                .collect::<Result<Vec<_>>>()?;
            let lambda = as_array(get(u, "lambda")?, "unit_iso.lambda")?
                .iter()
                .map(|s| parse_scalar(as_str(s, "lambda entry")?, &field))
                .collect::<Result<Vec<_>>>()?;
            Some(UnitIso { rho, lambda })
        }
    };
    let base = FusionDatum {
        field: field.clone(),
        simples,
        unit,
        fusion,
        f_table: AssociatorTable { blocks },
        unit_iso,
    };
    base.validate_structure()?;

    if v.get("delta").is_none() {
        return Ok(CategoryFile::Tensor(base));
    }
    let delta = parse_usize_3d(get(&v, "delta")?, "delta", r)?;
    let mut cof = BTreeMap::new();
    if let Some(cv) = v.get("coF") {
        for b in as_array(cv, "coF")? {
            let k = as_usize(get(b, "k")?, "coF.k")?;
            let a = as_usize(get(b, "a")?, "coF.a")?;
            let bb = as_usize(get(b, "b")?, "coF.b")?;
            let c = as_usize(get(b, "c")?, "coF.c")?;
            let rows = as_usize(get(b, "rows")?, "coF.rows")?;
            let cols = as_usize(get(b, "cols")?, "coF.cols")?;
            cof.insert(
                (k, a, bb, c),
                parse_matrix(get(b, "matrix")?, &field, rows, cols)?,
            );
        }
    }
    let mut kappa = BTreeMap::new();
    if let Some(kv) = v.get("kappa") {
        for b in as_array(kv, "kappa")? {
            let x = as_usize(get(b, "x")?, "kappa.x")?;
            let y = as_usize(get(b, "y")?, "kappa.y")?;
            let u = as_usize(get(b, "u")?, "kappa.u")?;
            let w = as_usize(get(b, "v")?, "kappa.v")?;
            let rows = as_usize(get(b, "rows")?, "kappa.rows")?;
            let cols = as_usize(get(b, "cols")?, "kappa.cols")?;
            kappa.insert(
                (x, y, u, w),
                parse_matrix(get(b, "matrix")?, &field, rows, cols)?,
            );
        }
    }
    let counit = match v.get("counit") {
        None => None,
        Some(c) => Some(
            as_array(c, "counit")?
                .iter()
                .map(|x| as_usize(x, "counit entry"))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    let mut counit_iso = CounitIso::default();
    if let Some(ci) = v.get("counit_iso") {
        if let Some(rv) = ci.get("r") {
            counit_iso.r = Some(
                as_array(rv, "counit_iso.r")?
                    .iter()
                    .map(|s| parse_scalar(as_str(s, "r entry")?, &field))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        if let Some(lv) = ci.get("l") {
            counit_iso.l = Some(
                as_array(lv, "counit_iso.l")?
                    .iter()
                    .map(|s| parse_scalar(as_str(s, "l entry")?, &field))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        if let Some(ev) = ci.get("eta") {
            counit_iso.eta = Some(parse_scalar(as_str(ev, "eta")?, &field)?);
        }
        if let Some(tv) = ci.get("tau") {
            for b in as_array(tv, "counit_iso.tau")? {
                let a = as_usize(get(b, "a")?, "tau.a")?;
                let bb = as_usize(get(b, "b")?, "tau.b")?;
                let rows = as_usize(get(b, "rows")?, "tau.rows")?;
                let cols = as_usize(get(b, "cols")?, "tau.cols")?;
                counit_iso.tau.insert(
                    (a, bb),
                    parse_matrix(get(b, "matrix")?, &field, rows, cols)?,
                );
            }
        }
        if let Some(emv) = ci.get("eps_mult") {
            for b in as_array(emv, "counit_iso.eps_mult")? {
                let x = as_usize(get(b, "x")?, "eps_mult.x")?;
                let y = as_usize(get(b, "y")?, "eps_mult.y")?;
                let rows = as_usize(get(b, "rows")?, "eps_mult.rows")?;
                let cols = as_usize(get(b, "cols")?, "eps_mult.cols")?;
                counit_iso
                    .eps_mult
                    .insert((x, y), parse_matrix(get(b, "matrix")?, &field, rows, cols)?);
            }
        }
    }
    let datum = BitensorDatum {
        base,
        delta,
        cof,
        kappa,
        counit,
        counit_iso,
    };
    datum.validate_structure()?;
    Ok(CategoryFile::Bitensor(datum))
}

/// Loads and fully validates a category file (pentagon and, for bitensor
/// data, the coproduct-side coherence axioms).
pub fn load_category(path: &Path, field_override: Option<&FieldSpec>) -> Result<CategoryFile> {
    let text = std::fs::read_to_string(path)?;
    let parsed = parse_category(&text, field_override)?;
    match &parsed {
        CategoryFile::Tensor(d) => {
            crate::tree::validate_fusion(d)?;
        }
        CategoryFile::Bitensor(d) => {
            crate::bicomplex::validate_bitensor(d)?;
        }
    }
    Ok(parsed)
}

pub fn fusion_to_json(d: &FusionDatum) -> Value {
    let mut m = Map::new();
    m.insert("field".into(), field_to_json(&d.field));
    m.insert(
        "simples".into(),
        Value::Array(d.simples.iter().map(|s| Value::String(s.clone())).collect()),
    );
    m.insert(
        "unit".into(),
        match &d.unit {
            UnitSpec::Simple(i) => json!(i),
            UnitSpec::Sum(v) => json!(v),
        },
    );
    m.insert("fusion".into(), json!(d.fusion));
    if !d.f_table.blocks.is_empty() {
        let blocks: Vec<Value> = d
            .f_table
            .blocks
            .iter()
            .map(|(&(i, j, k, l), b)| {
                json!({
                    "i": i, "j": j, "k": k, "l": l,
                    "rows": b.rows(), "cols": b.cols(),
                    "matrix": matrix_to_json(b, &d.field),
                })
            })
            .collect();
        m.insert("F".into(), Value::Array(blocks));
    }
    if let Some(iso) = &d.unit_iso {
        m.insert(
            "unit_iso".into(),
            json!({
                "rho": iso.rho.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "lambda": iso.lambda.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            }),
        );
    }
    Value::Object(m)
}

pub fn bitensor_to_json(d: &BitensorDatum) -> Value {
    let mut m = match fusion_to_json(&d.base) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    m.insert("delta".into(), json!(d.delta));
    let field = &d.base.field;
    if !d.cof.is_empty() {
        let blocks: Vec<Value> = d
            .cof
            .iter()
            .map(|(&(k, a, b, c), mat)| {
                json!({
                    "k": k, "a": a, "b": b, "c": c,
                    "rows": mat.rows(), "cols": mat.cols(),
                    "matrix": matrix_to_json(mat, field),
                })
            })
            .collect();
        m.insert("coF".into(), Value::Array(blocks));
    }
    if !d.kappa.is_empty() {
        let blocks: Vec<Value> = d
            .kappa
            .iter()
            .map(|(&(x, y, u, v), mat)| {
                json!({
                    "x": x, "y": y, "u": u, "v": v,
                    "rows": mat.rows(), "cols": mat.cols(),
                    "matrix": matrix_to_json(mat, field),
                })
            })
            .collect();
        m.insert("kappa".into(), Value::Array(blocks));
    }
    if let Some(c) = &d.counit {
        m.insert("counit".into(), json!(c));
    }
    let ci = &d.counit_iso;
    if ci.r.is_some()
        || ci.l.is_some()
        || ci.eta.is_some()
        || !ci.tau.is_empty()
        || !ci.eps_mult.is_empty()
    {
        let mut cm = Map::new();
        if let Some(r) = &ci.r {
            cm.insert(
                "r".into(),
                json!(r.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            );
        }
        if let Some(l) = &ci.l {
            cm.insert(
                "l".into(),
                json!(l.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
            );
        }
        if let Some(e) = &ci.eta {
            cm.insert("eta".into(), Value::String(e.to_string()));
        }
        m.insert("counit_iso".into(), Value::Object(cm));
    }
    Value::Object(m)
}

pub fn write_category(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(
        path,
        format!("{}\n", serde_json::to_string_pretty(v).unwrap()),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// cochains
// ---------------------------------------------------------------------------

pub fn cochain_to_json(datum: &FusionDatum, c: &Cochain) -> Value {
    let comps: Vec<Value> = c
        .components
        .iter()
        .map(|(tuple, m)| {
            json!({
                "tuple": tuple,
                "matrix": matrix_to_json(m, &datum.field),
            })
        })
        .collect();
    json!({"degree": c.degree, "components": comps})
}

pub fn cochain_from_json(datum: &FusionDatum, v: &Value) -> Result<Cochain> {
    let degree = as_usize(get(v, "degree")?, "degree")?;
    let mut out = Cochain::zero(degree);
    let lc = ParenTree::left_comb(degree);
    let rc = ParenTree::right_comb(degree);
    for comp in as_array(get(v, "components")?, "components")? {
        let tuple: Vec<usize> = as_array(get(comp, "tuple")?, "tuple")?
            .iter()
            .map(|x| as_usize(x, "tuple entry"))
            .collect::<Result<Vec<_>>>()?;
        if tuple.len() != degree {
            return Err(perr("component tuple length does not match the degree"));
        }
        if tuple.iter().any(|&t| t >= datum.rank()) {
            return Err(perr("component tuple entry out of range"));
        }
        let rows = channels(datum, &rc, &tuple).len();
        let cols = channels(datum, &lc, &tuple).len();
        let m = parse_matrix(get(comp, "matrix")?, &datum.field, rows, cols)?;
        out.set_component(tuple, m);
    }
    Ok(out)
}

pub fn load_cochain(datum: &FusionDatum, path: &Path) -> Result<Cochain> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| perr(format!("{e}")))?;
    cochain_from_json(datum, &v)
}

// ---------------------------------------------------------------------------
// bigraded cochains
// ---------------------------------------------------------------------------

pub fn bicochain_to_json(datum: &BitensorDatum, c: &crate::bicomplex::BiCochain) -> Result<Value> {
    let (i, j) = c.bidegree;
    let fd = crate::word::word_f_std(i, j);
    let gd = crate::word::word_g_std(i, j);
    let field = &datum.base.field;
    let mut comps = Vec::new();
    for (tuple, m) in &c.components {
        let fch = fd.channels(datum, tuple);
        let gch = gd.channels(datum, tuple);
        // split by output grading
        let mut by_out: BTreeMap<Vec<usize>, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (fi, fc) in fch.iter().enumerate() {
            by_out
                .entry(fd.out_tuple(fc, tuple))
                .or_default()
                .0
                .push(fi);
        }
        for (gi, gc) in gch.iter().enumerate() {
            by_out
                .entry(gd.out_tuple(gc, tuple))
                .or_default()
                .1
                .push(gi);
        }
        let mut blocks = Vec::new();
        for (out_tuple, (fis, gis)) in &by_out {
            if fis.is_empty() || gis.is_empty() {
                continue;
            }
            let mut sub = Mat::new(gis.len(), fis.len());
            for (rr, &gi) in gis.iter().enumerate() {
                for (cc, &fi) in fis.iter().enumerate() {
                    if let Some(v) = m.get(gi, fi) {
                        sub.set(rr, cc, v.clone());
                    }
                }
            }
            if !sub.is_zero() {
                blocks.push(json!({
                    "out_tuple": out_tuple,
                    "matrix": matrix_to_json(&sub, field),
                }));
            }
        }
        comps.push(json!({"tuple": tuple, "blocks": blocks}));
    }
    Ok(json!({"bidegree": [i, j], "components": comps}))
}

// ---------------------------------------------------------------------------
// cocycle tables
// ---------------------------------------------------------------------------

/// Multiplicative 3-cochain table on a group: values indexed g*|G|^2 + h*|G| + k.
pub fn load_omega(path: &Path, group: &GroupTable, field: &FieldSpec) -> Result<Vec<Scalar>> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| perr(format!("{e}")))?;
    let order = as_usize(get(&v, "order")?, "order")?;
    if order != group.order() {
        return Err(perr("cocycle table order does not match the group"));
    }
    let vals = as_array(get(&v, "values")?, "values")?;
    if vals.len() != order * order * order {
        return Err(perr("cocycle table has the wrong number of values"));
    }
    vals.iter()
        .map(|s| parse_scalar(as_str(s, "value")?, field))
        .collect()
}

// ---------------------------------------------------------------------------
// deformed categories
// ---------------------------------------------------------------------------

/// Writes a category whose associator entries are jets in the deformation
/// parameter: the order-0 part is the classical datum, the higher parts are
/// the candidate's coefficient cochains.
pub fn deformed_to_json(datum: &FusionDatum, cand: &DeformationCandidate) -> Value {
    let mut m = match fusion_to_json(datum) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    let order = cand.order();
    m.insert("deform_order".into(), json!(order));
    // jet-valued F entries for every triple with a nonzero classical block
    // or a nonzero deformation component
    let r = datum.rank();
    let lc = ParenTree::left_comb(3);
    let rc = ParenTree::right_comb(3);
    let mut blocks = Vec::new();
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let tuple = [i, j, k];
                let lch = channels(datum, &lc, &tuple);
                let rch = channels(datum, &rc, &tuple);
                for l in 0..r {
                    let cols: Vec<usize> = lch
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.total == l)
                        .map(|(idx, _)| idx)
                        .collect();
                    let rows: Vec<usize> = rch
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.total == l)
                        .map(|(idx, _)| idx)
                        .collect();
                    if rows.is_empty() || cols.is_empty() {
                        continue;
                    }
                    let classical = datum.f_block(i, j, k, l);
                    let mut entries: Vec<Vec<String>> = Vec::new();
                    for (rr, &rg) in rows.iter().enumerate() {
                        let mut row = Vec::new();
                        for (cc, &cg) in cols.iter().enumerate() {
                            let mut parts = vec![classical
                                .get(rr, cc)
                                .cloned()
                                .unwrap_or_else(|| datum.field.zero())
                                .to_string()];
                            for t in 1..=order {
                                let coeff = cand
                                    .coefficient(t)
                                    .and_then(|c| c.component(&tuple))
                                    .and_then(|m| m.get(rg, cg))
                                    .cloned()
                                    .unwrap_or_else(|| datum.field.zero());
                                if t == 1 {
                                    parts.push(format!("{coeff}*e"));
                                } else {
                                    parts.push(format!("{coeff}*e^{t}"));
                                }
                            }
                            row.push(parts.join(" + "));
                        }
                        entries.push(row);
                    }
                    blocks.push(json!({
                        "i": i, "j": j, "k": k, "l": l,
                        "rows": rows.len(), "cols": cols.len(),
                        "matrix": entries,
                    }));
                }
            }
        }
    }
    m.insert("F".into(), Value::Array(blocks));
    Value::Object(m)
}

/// Reads a deformed category: returns the classical datum and the
/// deformation coefficients.
pub fn load_deformed(path: &Path) -> Result<(FusionDatum, DeformationCandidate)> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| perr(format!("{e}")))?;
    let order = as_usize(get(&v, "deform_order")?, "deform_order")?;
    let field = parse_field(get(&v, "field")?)?;
    // strip the F table, parse the skeleton, then parse jets
    let mut plain = v.clone();
    if let Value::Object(m) = &mut plain {
        m.remove("F");
        m.remove("deform_order");
    }
    let base = match parse_category(&plain.to_string(), None)? {
        CategoryFile::Tensor(d) => d,
        CategoryFile::Bitensor(_) => return Err(perr("deformed bitensor files are not supported")),
    };
    let mut datum = base;
    let mut cochains = vec![Cochain::zero(3); order];
    let lc = ParenTree::left_comb(3);
    let rc = ParenTree::right_comb(3);
    if let Some(fv) = v.get("F") {
        let mut blocks = BTreeMap::new();
        for b in as_array(fv, "F")? {
            let i = as_usize(get(b, "i")?, "F.i")?;
            let j = as_usize(get(b, "j")?, "F.j")?;
            let k = as_usize(get(b, "k")?, "F.k")?;
            let l = as_usize(get(b, "l")?, "F.l")?;
            let tuple = [i, j, k];
            let lch = channels(&datum, &lc, &tuple);
            let rch = channels(&datum, &rc, &tuple);
            let cols: Vec<usize> = lch
                .iter()
                .enumerate()
                .filter(|(_, c)| c.total == l)
                .map(|(idx, _)| idx)
                .collect();
            let rows: Vec<usize> = rch
                .iter()
                .enumerate()
                .filter(|(_, c)| c.total == l)
                .map(|(idx, _)| idx)
                .collect();
            let data = as_array(get(b, "matrix")?, "F.matrix")?;
            let mut classical = Mat::new(rows.len(), cols.len());
            for (rr, rowv) in data.iter().enumerate() {
                for (cc, cell) in as_array(rowv, "F row")?.iter().enumerate() {
                    let poly = parse_poly(as_str(cell, "F entry")?, &field, order + 1)?;
                    classical.set(rr, cc, poly.coeff(0).clone());
                    for t in 1..=order {
                        let coeff = poly.coeff(t);
                        if coeff.is_zero() {
                            continue;
                        }
                        let comp = cochains[t - 1]
                            .components
                            .entry(tuple.to_vec())
                            .or_insert_with(|| Mat::new(rch.len(), lch.len()));
                        comp.add_to(rows[rr], cols[cc], coeff.clone());
                    }
                }
            }
            blocks.insert((i, j, k, l), classical);
        }
        // drop identity blocks for a compact table
        blocks.retain(|_, b| *b != Mat::identity(b.rows(), &field.one()));
        datum.f_table = AssociatorTable { blocks };
    }
    for c in &mut cochains {
        c.components.retain(|_, m| !m.is_zero());
    }
    datum.validate_structure()?;
    crate::tree::validate_fusion(&datum)?;
    Ok((datum, DeformationCandidate::new(cochains)?))
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    std::fs::write(
        path,
        format!("{}\n", serde_json::to_string_pretty(v).unwrap()),
    )?;
    Ok(())
}
