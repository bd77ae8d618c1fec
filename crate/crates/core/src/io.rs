//! JSON field files.
//!
//! A file is one JSON document with a `metadata` object and a flat `data`
//! array of `[re, im]` pairs. Pairs run over sites in row-major order
//! (`k₁` slowest), then the component axis (rank 1) or plane in canonical
//! order (rank 2), then the matrix entries row-major. Rank 0 files hold one
//! group element per site.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::algebra::{AlgebraElement, AlgebraKind, GroupElement};
use crate::cochain::{Cochain, ConnectionField, CurvatureField, Field, GaugeField};
use crate::hodge::Metric;
use crate::lattice::{Boundary, Window};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot access '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed field file at key '{key}': {reason}")]
    Malformed { key: &'static str, reason: String },

    #[error("unsupported format_version {found} (this build reads version {FORMAT_VERSION})")]
    UnsupportedVersion { found: u64 },

    #[error("length mismatch at key '{key}': metadata implies {expected} entries, found {found}")]
    LengthMismatch { key: &'static str, expected: usize, found: usize },

    #[error("invalid metadata key '{key}': {reason}")]
    InvalidMetadata { key: &'static str, reason: String },
}

impl FormatError {
    /// The metadata or document key the error refers to.
    pub fn key(&self) -> Option<&'static str> {
        match self {
            FormatError::Io { .. } => None,
            FormatError::Malformed { key, .. }
            | FormatError::LengthMismatch { key, .. }
            | FormatError::InvalidMetadata { key, .. } => Some(key),
            FormatError::UnsupportedVersion { .. } => Some("format_version"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub format_version: u64,
    pub rank: usize,
    pub dims: [usize; 4],
    pub boundary: Boundary,
    /// Provenance only; operations take the metric explicitly.
    pub metric: Option<Metric>,
    pub algebra: AlgebraKind,
}

/// A field together with the metric it was produced under, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub field: Field,
    pub metric: Option<Metric>,
}

impl FieldFile {
    pub fn new(field: Field, metric: Option<Metric>) -> Self {
        Self { field, metric }
    }

    pub fn metadata(&self) -> Metadata {
        let w = self.field.window();
        Metadata {
            format_version: FORMAT_VERSION,
            rank: self.field.rank(),
            dims: w.dims(),
            boundary: w.boundary(),
            metric: self.metric,
            algebra: self.field.algebra(),
        }
    }

    /// The JSON document, one `[re, im]` pair per line.
    pub fn to_json(&self) -> String {
        let meta = serde_json::to_string_pretty(&self.metadata()).expect("metadata serializes");
        let meta = meta.replace('\n', "\n  ");
        let mut out = format!("{{\n  \"metadata\": {meta},\n  \"data\": [");
        let pairs = field_pairs(&self.field);
        for (n, [re, im]) in pairs.iter().enumerate() {
            let sep = if n + 1 == pairs.len() { "" } else { "," };
            out.push_str(&format!("\n    [{}, {}]{sep}", number(*re), number(*im)));
        }
        out.push_str(if pairs.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| FormatError::Malformed { key: "document", reason: e.to_string() })?;
        let root = doc
            .as_object()
            .ok_or_else(|| FormatError::Malformed { key: "document", reason: "expected a JSON object".into() })?;
        let meta = root
            .get("metadata")
            .and_then(Value::as_object)
            .ok_or_else(|| FormatError::Malformed { key: "metadata", reason: "missing or not an object".into() })?;

        let version = meta
            .get("format_version")
            .ok_or_else(|| FormatError::Malformed { key: "format_version", reason: "missing".into() })?;
        let version = version.as_u64().ok_or_else(|| FormatError::Malformed {
            key: "format_version",
            reason: format!("expected a non-negative integer, got {version}"),
        })?;
        if version != FORMAT_VERSION {
            return Err(FormatError::UnsupportedVersion { found: version });
        }

        let rank: usize = meta_key(meta, "rank")?;
        if rank > 2 {
            return Err(FormatError::InvalidMetadata { key: "rank", reason: format!("{rank} is not 0, 1 or 2") });
        }
        let dims: [usize; 4] = meta_key(meta, "dims")?;
        if dims.contains(&0) {
            return Err(FormatError::InvalidMetadata { key: "dims", reason: "extents must be positive".into() });
        }
        let boundary: Boundary = meta_key(meta, "boundary")?;
        let algebra: AlgebraKind = meta_key(meta, "algebra")?;
        let metric: Option<Metric> = match meta.get("metric") {
            None | Some(Value::Null) => None,
            Some(_) => Some(meta_key(meta, "metric")?),
        };

        let data = root
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| FormatError::Malformed { key: "data", reason: "missing or not an array".into() })?;
        let pairs = data
            .iter()
            .map(|v| match v.as_array().map(Vec::as_slice) {
                Some([re, im]) => re.as_f64().zip(im.as_f64()).map(|(r, i)| [r, i]),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| FormatError::Malformed {
                key: "data",
                reason: "entries must be [re, im] number pairs".into(),
            })?;

        let window = Window::new(dims, boundary);
        let slots = [1, 4, 6][rank];
        let expected = window.num_sites() * slots * 4;
        if pairs.len() != expected {
            return Err(FormatError::LengthMismatch { key: "data", expected, found: pairs.len() });
        }
        let values: Vec<AlgebraElement> =
            pairs.chunks_exact(4).map(|c| AlgebraElement::from_pairs([c[0], c[1], c[2], c[3]])).collect();
        let field = match rank {
            0 => Field::Gauge(
                GaugeField::from_values(window, algebra, values.into_iter().map(GroupElement::from_matrix).collect())
                    .expect("length checked"),
            ),
            1 => Field::Connection(ConnectionField::with_values(window, algebra, values)),
            _ => Field::Curvature(CurvatureField::with_values(window, algebra, values)),
        };
        Ok(Self { field, metric })
    }
}

fn meta_key<T: DeserializeOwned>(meta: &Map<String, Value>, key: &'static str) -> Result<T, FormatError> {
    let v = meta.get(key).ok_or_else(|| FormatError::Malformed { key, reason: "missing".into() })?;
    T::deserialize(v).map_err(|e| FormatError::InvalidMetadata { key, reason: e.to_string() })
}

/// Shortest decimal that parses back to the same `f64`.
fn number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn field_pairs(field: &Field) -> Vec<[f64; 2]> {
    let values: Vec<AlgebraElement> = match field {
        Field::Gauge(g) => g.values().iter().map(|x| *x.matrix()).collect(),
        Field::Connection(a) => a.values().to_vec(),
        Field::Curvature(f) => f.values().to_vec(),
    };
    values.iter().flat_map(|x| x.to_pairs()).collect()
}

pub fn save(file: &FieldFile, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, file.to_json()).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn load(path: impl AsRef<Path>) -> Result<FieldFile, FormatError> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    FieldFile::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rank: usize, seed: u64) -> Field {
        let w = Window::new([2, 3, 1, 2], Boundary::Zero);
        match rank {
            0 => Field::Gauge(GaugeField::random(w, AlgebraKind::Su2, seed, 1.0)),
            1 => Field::Connection(ConnectionField::random(w, AlgebraKind::Sl2c, seed, 1.0)),
            _ => Field::Curvature(CurvatureField::random(w, AlgebraKind::Su2, seed, 1e-3)),
        }
    }

    fn bits(f: &Field) -> Vec<u64> {
        field_pairs(f).iter().flat_map(|p| p.map(f64::to_bits)).collect()
    }

    #[test]
    fn round_trip_is_bitwise() {
        for rank in 0..3 {
            for metric in [None, Some(Metric::Mink)] {
                let file = FieldFile::new(sample(rank, 3), metric);
                let back = FieldFile::from_json(&file.to_json()).unwrap();
                assert_eq!(back, file);
                assert_eq!(bits(&back.field), bits(&file.field));
            }
        }
    }

    #[test]
    fn awkward_floats_survive() {
        let w = Window::periodic(1);
        let x = AlgebraElement::from_pairs([[0.1, -0.0], [f64::MIN_POSITIVE, 5e-324], [1e308, -1.0 / 3.0], [0.0, 2.0]]);
        let f = Field::Connection(ConnectionField::with_values(w, AlgebraKind::Gl2, vec![x; 4]));
        let file = FieldFile::new(f, None);
        let back = FieldFile::from_json(&file.to_json()).unwrap();
        assert_eq!(bits(&back.field), bits(&file.field));
    }

    #[test]
    fn layout_is_canonical() {
        let w = Window::periodic(2);
        let a = ConnectionField::random(w, AlgebraKind::Su2, 1, 1.0);
        let json = FieldFile::new(Field::Connection(a.clone()), None).to_json();
        let doc: Value = serde_json::from_str(&json).unwrap();
        let data = doc["data"].as_array().unwrap();
        let k = crate::lattice::LatticeIndex::new(1, 0, 1, 1);
        let slot = w.site_offset(k).unwrap() * 4 + 2;
        let entry = a.get(k, crate::lattice::Axis::X3).to_pairs()[1];
        assert_eq!(data[slot * 4 + 1], serde_json::json!(entry));
        assert_eq!(doc["metadata"]["dims"], serde_json::json!([2, 2, 2, 2]));
        assert_eq!(doc["metadata"]["boundary"], "periodic");
        assert_eq!(doc["metadata"]["metric"], Value::Null);
    }

    #[test]
    fn errors_name_their_key() {
        let good = FieldFile::new(sample(1, 0), Some(Metric::Euclid)).to_json();
        let mut doc: Value = serde_json::from_str(&good).unwrap();

        let err = FieldFile::from_json("{ not json").unwrap_err();
        assert!(matches!(err, FormatError::Malformed { key: "document", .. }));

        let mut d = doc.clone();
        d["metadata"]["format_version"] = 7.into();
        let err = FieldFile::from_json(&d.to_string()).unwrap_err();
        assert!(matches!(err, FormatError::UnsupportedVersion { found: 7 }));
        assert!(err.to_string().contains("format_version"));

        let mut d = doc.clone();
        d["data"].as_array_mut().unwrap().pop();
        let err = FieldFile::from_json(&d.to_string()).unwrap_err();
        assert!(matches!(err, FormatError::LengthMismatch { key: "data", .. }));

        for (key, bad) in [("rank", Value::from(3)), ("dims", Value::from("4,4")), ("algebra", Value::from("u3"))] {
            let mut d = doc.clone();
            d["metadata"][key] = bad;
            let err = FieldFile::from_json(&d.to_string()).unwrap_err();
            assert!(matches!(err, FormatError::InvalidMetadata { .. }), "{key}: {err}");
            assert_eq!(err.key(), Some(key));
            assert!(err.to_string().contains(key));
        }

        doc["metadata"].as_object_mut().unwrap().remove("boundary");
        let err = FieldFile::from_json(&doc.to_string()).unwrap_err();
        assert!(matches!(err, FormatError::Malformed { key: "boundary", .. }));
    }

    #[test]
    fn save_and_load_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.field");
        let file = FieldFile::new(sample(2, 9), Some(Metric::Euclid));
        save(&file, &path).unwrap();
        assert_eq!(load(&path).unwrap(), file);
        assert!(matches!(load(dir.path().join("missing")), Err(FormatError::Io { .. })));
    }
}
