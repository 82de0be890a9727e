//! JSON file formats for channels, algebras, representations and codes.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Parse errors carry the index path of the offending value, e.g.
//! `kraus[1][0][2]`.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::algebra::{generate, Block, DecomposeOptions, OperatorAlgebra};
use crate::channel::{fixtures as channel_fixtures, QuantumChannel};
use crate::error::{Error, Result};
use crate::numerics::{c64, ComplexMatrix, ComplexVector, C64};
use crate::qec::{fixtures as code_fixtures, SubsystemCode};
use crate::representation::{fixtures as rep_fixtures, Representation};

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::parse(path, format!("expected an array, found {}", kind(v))))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::parse(path, format!("expected an object, found {}", kind(v))))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::parse(path, format!("expected a non-negative integer, found {}", kind(v))))
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(path, format!("missing field `{key}`")))
}

pub fn parse_complex(v: &Value, path: &str) -> Result<C64> {
    let pair = as_array(v, path)?;
    if pair.len() != 2 {
        return Err(Error::parse(path, format!("expected [re, im], found {} entries", pair.len())));
    }
    let part = |k: usize| {
        pair[k]
            .as_f64()
            .ok_or_else(|| Error::parse(index(path, k), format!("expected a number, found {}", kind(&pair[k]))))
    };
    Ok(c64(part(0)?, part(1)?))
}

/// A matrix as an array of rows; all rows must have the same length.
pub fn parse_matrix(v: &Value, path: &str) -> Result<ComplexMatrix> {
    let rows = as_array(v, path)?;
    let mut data = Vec::new();
    let mut cols = None;
    for (i, row) in rows.iter().enumerate() {
        let rpath = index(path, i);
        let entries = as_array(row, &rpath)?;
        match cols {
            None => cols = Some(entries.len()),
            Some(c) if c != entries.len() => {
                return Err(Error::parse(rpath, format!("row has {} entries, expected {c}", entries.len())))
            }
            _ => {}
        }
        for (j, z) in entries.iter().enumerate() {
            data.push(parse_complex(z, &index(&rpath, j))?);
        }
    }
    let cols = cols.unwrap_or(0);
    Ok(ComplexMatrix::from_row_slice(rows.len(), cols, &data))
}

fn parse_square(v: &Value, path: &str, n: Option<usize>) -> Result<ComplexMatrix> {
    let m = parse_matrix(v, path)?;
    let expected = n.unwrap_or(m.nrows());
    if m.shape() != (expected, expected) {
        return Err(Error::parse(
            path,
            format!("expected a {expected}x{expected} matrix, found {}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(m)
}

fn parse_matrix_list(v: &Value, path: &str, n: Option<usize>) -> Result<Vec<ComplexMatrix>> {
    let items = as_array(v, path)?;
    let mut out: Vec<ComplexMatrix> = Vec::with_capacity(items.len());
    for (k, item) in items.iter().enumerate() {
        let dim = n.or_else(|| out.first().map(|m| m.nrows()));
        out.push(parse_square(item, &index(path, k), dim)?);
    }
    Ok(out)
}

pub fn parse_vector(v: &Value, path: &str) -> Result<ComplexVector> {
    let entries = as_array(v, path)?;
    let data = entries
        .iter()
        .enumerate()
        .map(|(k, z)| parse_complex(z, &index(path, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexVector::from_vec(data))
}

/// `{"dim": n, "kraus": [...]}` or `{"fixture": name}`.
pub fn parse_channel(v: &Value) -> Result<QuantumChannel> {
    let obj = as_object(v, "")?;
    if let Some(name) = obj.get("fixture") {
        let name = name
            .as_str()
            .ok_or_else(|| Error::parse("fixture", "expected a fixture name"))?;
        return channel_fixtures::by_name(name);
    }
    let n = as_usize(field(obj, "dim", "")?, "dim")?;
    let kraus = parse_matrix_list(field(obj, "kraus", "")?, "kraus", Some(n))?;
    if kraus.is_empty() {
        return Err(Error::parse("kraus", "at least one Kraus operator is required"));
    }
    QuantumChannel::new(kraus)
}

/// Algebra input: `{"generators": [...]}`, `{"blocks": [...], "kernel_dim":
/// k, "embedding": matrix|null}`, `{"code": name}`, or one of the strings
/// `"full"` and `"scalars"` (which need the ambient dimension `n`).
pub fn parse_algebra(v: &Value, path: &str, n: Option<usize>, opts: &DecomposeOptions) -> Result<OperatorAlgebra> {
    if let Some(name) = v.as_str() {
        let n = n.ok_or_else(|| Error::parse(path, format!("`{name}` needs a known ambient dimension")))?;
        return match name {
            "full" => Ok(OperatorAlgebra::full(n)),
            "scalars" => Ok(OperatorAlgebra::scalars(n)),
            other => Err(Error::parse(path, format!("unknown algebra reference `{other}`"))),
        };
    }
    let obj = as_object(v, path)?;
    if let Some(name) = obj.get("code") {
        let name = name
            .as_str()
            .ok_or_else(|| Error::parse(join(path, "code"), "expected a code fixture name"))?;
        return Ok(code_fixtures::by_name(name)?.algebra().clone());
    }
    if let Some(gens) = obj.get("generators") {
        let gpath = join(path, "generators");
        let gens = parse_matrix_list(gens, &gpath, n)?;
        let dim = n
            .or_else(|| gens.first().map(|g| g.nrows()))
            .ok_or_else(|| Error::parse(gpath, "cannot infer the dimension of an empty generator list"))?;
        return generate(dim, &gens, opts);
    }
    let bpath = join(path, "blocks");
    let mut blocks = Vec::new();
    for (k, b) in as_array(field(obj, "blocks", path)?, &bpath)?.iter().enumerate() {
        let p = index(&bpath, k);
        let b = as_object(b, &p)?;
        blocks.push(Block::new(
            as_usize(field(b, "dimA", &p)?, &join(&p, "dimA"))?,
            as_usize(field(b, "dimB", &p)?, &join(&p, "dimB"))?,
        ));
    }
    let kernel_dim = match obj.get("kernel_dim") {
        Some(k) => as_usize(k, &join(path, "kernel_dim"))?,
        None => 0,
    };
    let embedding = match obj.get("embedding") {
        None | Some(Value::Null) => None,
        Some(m) => Some(parse_square(m, &join(path, "embedding"), None)?),
    };
    OperatorAlgebra::from_structure(blocks, kernel_dim, embedding)
}

/// `{"domain": ..., "images": [...]}` or `{"domain": ...,
/// "kraus_conjugation": [...]}`, or `{"fixture": name}`. A missing domain
/// means `L(C^n)`.
pub fn parse_representation(v: &Value, n: Option<usize>, opts: &DecomposeOptions) -> Result<Representation> {
    let obj = as_object(v, "")?;
    if let Some(name) = obj.get("fixture") {
        return match name.as_str() {
            Some("doubling") => Ok(rep_fixtures::doubling()),
            Some("bit_flip_correction") => Ok(rep_fixtures::bit_flip_correction()),
            Some(other) => Err(Error::UnknownFixture(other.to_string())),
            None => Err(Error::parse("fixture", "expected a fixture name")),
        };
    }
    let images = obj
        .get("images")
        .map(|v| parse_matrix_list(v, "images", None))
        .transpose()?;
    let kraus = obj
        .get("kraus_conjugation")
        .map(|v| parse_matrix_list(v, "kraus_conjugation", None))
        .transpose()?;
    let inferred = n
        .or_else(|| images.as_ref().and_then(|m| m.first()).map(|m| m.nrows()))
        .or_else(|| kraus.as_ref().and_then(|m| m.first()).map(|m| m.ncols()));
    let domain = match obj.get("domain") {
        Some(d) => parse_algebra(d, "domain", inferred, opts)?,
        None => OperatorAlgebra::full(
            inferred.ok_or_else(|| Error::parse("", "cannot infer the domain dimension"))?,
        ),
    };
    match (images, kraus) {
        (Some(images), None) => Representation::new(domain, images),
        (None, Some(kraus)) => Representation::from_kraus_conjugation(domain, &kraus),
        _ => Err(Error::parse("", "expected exactly one of `images` and `kraus_conjugation`")),
    }
}

/// `{"dimA": a, "dimB": b, "embedding": W}`, `{"span": [...]}` or
/// `{"fixture": name}`.
pub fn parse_code(v: &Value) -> Result<SubsystemCode> {
    let obj = as_object(v, "")?;
    if let Some(name) = obj.get("fixture") {
        let name = name
            .as_str()
            .ok_or_else(|| Error::parse("fixture", "expected a code fixture name"))?;
        return code_fixtures::by_name(name);
    }
    if let Some(span) = obj.get("span") {
        let vectors = as_array(span, "span")?
            .iter()
            .enumerate()
            .map(|(k, v)| parse_vector(v, &index("span", k)))
            .collect::<Result<Vec<_>>>()?;
        let n = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::parse("span", "at least one vector is required"))?;
        return SubsystemCode::from_span(n, &vectors);
    }
    let a = as_usize(field(obj, "dimA", "")?, "dimA")?;
    let b = as_usize(field(obj, "dimB", "")?, "dimB")?;
    let w = parse_matrix(field(obj, "embedding", "")?, "embedding")?;
    SubsystemCode::new(a, b, w)
}

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrices_to_json(ms: &[ComplexMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix_to_json).collect())
}

pub fn channel_to_json(ch: &QuantumChannel) -> Value {
    json!({ "dim": ch.dim(), "kraus": matrices_to_json(ch.kraus()) })
}

pub fn algebra_to_json(alg: &OperatorAlgebra) -> Value {
    let blocks: Vec<Value> = alg
        .blocks()
        .iter()
        .map(|b| json!({ "dimA": b.dim_a, "dimB": b.dim_b }))
        .collect();
    json!({
        "blocks": blocks,
        "kernel_dim": alg.kernel_dim(),
        "embedding": matrix_to_json(alg.embedding()),
    })
}

pub fn representation_to_json(rep: &Representation) -> Value {
    json!({
        "domain": algebra_to_json(rep.domain()),
        "images": matrices_to_json(rep.images()),
    })
}

pub fn code_to_json(code: &SubsystemCode) -> Value {
    json!({
        "dimA": code.dim_a(),
        "dimB": code.dim_b(),
        "embedding": matrix_to_json(code.isometry()),
    })
}

/// Read and parse a JSON file.
pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::channels_equal;
    use crate::numerics::{real, subspace_equal};
    use crate::random;

    #[test]
    fn channel_round_trip() {
        let ch = random::random_channel(&mut random::rng(1), 3, 2);
        let back = parse_channel(&channel_to_json(&ch)).unwrap();
        assert!(channels_equal(&ch, &back, 1e-14));
    }

    #[test]
    fn channel_fixture_reference() {
        let ch = parse_channel(&json!({ "fixture": "bit_flip_3q" })).unwrap();
        assert_eq!(ch.dim(), 8);
        assert!(matches!(
            parse_channel(&json!({ "fixture": "nope" })),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn parse_errors_carry_index_paths() {
        let bad = json!({ "dim": 2, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1]]]] });
        match parse_channel(&bad) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "kraus[0][1][1]"),
            other => panic!("unexpected {other:?}"),
        }
        let wrong_dim = json!({ "dim": 3, "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]] });
        match parse_channel(&wrong_dim) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "kraus[0]"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_channel(&json!({ "kraus": [] })) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("dim")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn algebra_formats() {
        let opts = DecomposeOptions::default();
        let x = json!([[[0, 0], [1, 0]], [[1, 0], [0, 0]]]);
        let alg = parse_algebra(&json!({ "generators": [x] }), "", None, &opts).unwrap();
        assert_eq!(alg.blocks(), &[Block::new(1, 1), Block::new(1, 1)]);
        let w = random::haar_unitary(&mut random::rng(2), 3);
        let built = OperatorAlgebra::from_structure(vec![Block::new(1, 2)], 1, Some(w)).unwrap();
        let back = parse_algebra(&algebra_to_json(&built), "", None, &opts).unwrap();
        assert!(subspace_equal(built.basis(), back.basis(), 1e-12).unwrap().equal);
        assert_eq!(parse_algebra(&json!("full"), "", Some(3), &opts).unwrap().dim(), 9);
        assert!(parse_algebra(&json!("full"), "", None, &opts).is_err());
    }

    #[test]
    fn representation_formats() {
        let opts = DecomposeOptions::default();
        let rep = rep_fixtures::bit_flip_correction();
        let back = parse_representation(&representation_to_json(&rep), None, &opts).unwrap();
        for b in rep.domain().basis().basis() {
            assert!((rep.apply(b) - back.apply(b)).norm() < 1e-12);
        }
        let id = json!({ "kraus_conjugation": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]] });
        let rep = parse_representation(&id, None, &opts).unwrap();
        assert_eq!(rep.domain().dim(), 4);
        assert!(rep.verify(1e-12).unwrap().passed());
    }

    #[test]
    fn code_formats() {
        let span = json!({ "span": [
            [[1, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0]],
            [[0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [1, 0]]
        ]});
        let code = parse_code(&span).unwrap();
        let c0 = code_fixtures::bit_flip_code(0);
        assert!((code.projection() - c0.projection()).norm() < 1e-14);
        let back = parse_code(&code_to_json(&code_fixtures::flip_pair_code())).unwrap();
        assert_eq!((back.dim_a(), back.dim_b()), (2, 2));
        let skewed = json!({ "span": [[[1, 0], [1, 0]]] });
        let code = parse_code(&skewed).unwrap();
        assert!((code.isometry().norm() - 1.0).abs() < 1e-12);
        assert!((code.projection()[(0, 1)] - real(0.5)).norm() < 1e-12);
    }
}
