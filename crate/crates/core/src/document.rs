//! The JSON exchange format for complexes and normal forms.
//!
//! A complex document looks like
//!
//! ```json
//! {"dimension": 2, "generators": [[1, 2, 3], [2, 3, 4]], "equivalence": [[1, 4]], "metadata": {"name": "strip"}}
//! ```
//!
//! `equivalence` and `metadata` are optional. The zero complex is written with
//! dimension -1 and no generators. Output is pretty-printed with sorted keys
//! and sorted generators, so equal documents serialize to identical bytes.

use std::collections::BTreeSet;

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{Complex, Simplex, VertexId};
use crate::normalize::StarNormalForm;
use crate::quotient::RegularEquivalence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Malformed { line: usize, column: usize, message: String },
    #[error("generator {index} has {found} vertices, dimension {dimension} needs {}", dimension + 1)]
    DimensionMismatch { index: usize, dimension: i64, found: usize },
    #[error("generator {index} repeats vertex {vertex}")]
    DuplicateVertexInGenerator { index: usize, vertex: u32 },
    #[error("generator {index} is listed twice")]
    DuplicateGenerator { index: usize },
    #[error("equivalence mentions vertex {0}, which is not in any generator")]
    UnknownVertex(u32),
    #[error("vertex {0} appears in more than one equivalence class")]
    OverlappingClasses(u32),
    #[error("complex is not uniform and cannot be written as a document")]
    NotUniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexDocument {
    pub dimension: i64,
    pub generators: Vec<Vec<u32>>,
    pub equivalence: Option<Vec<Vec<u32>>>,
    pub metadata: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    dimension: i64,
    generators: Vec<Vec<u32>>,
    #[serde(default)]
    equivalence: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    metadata: Option<Value>,
}

impl ComplexDocument {
    pub fn from_complex(k: &Complex) -> Result<Self, DocumentError> {
        if !k.is_uniform() {
            return Err(DocumentError::NotUniform);
        }
        Ok(ComplexDocument {
            dimension: k.dimension() as i64,
            generators: k.generators().map(|g| g.vertices().iter().map(|v| v.0).collect()).collect(),
            equivalence: None,
            metadata: None,
        })
    }

    pub fn with_metadata(mut self, metadata: Value) -> Self {
        self.metadata = Some(metadata);
        self
    }

    pub fn complex(&self) -> Complex {
        self.generators
            .iter()
            .map(|g| Simplex::new(g.iter().copied()).expect("validated document"))
            .collect()
    }

    pub fn equivalence(&self) -> Option<RegularEquivalence> {
        self.equivalence
            .as_ref()
            .map(|classes| RegularEquivalence::from_classes(classes.iter().map(|c| c.iter().copied())).expect("validated document"))
    }

    fn to_value(&self) -> Value {
        let mut doc = json!({
            "dimension": self.dimension,
            "generators": self.generators,
        });
        if let Some(eq) = &self.equivalence {
            doc["equivalence"] = json!(eq);
        }
        if let Some(meta) = &self.metadata {
            doc["metadata"] = meta.clone();
        }
        doc
    }
}

pub fn parse(bytes: &[u8]) -> Result<ComplexDocument, DocumentError> {
    let raw: RawDocument = serde_json::from_slice(bytes).map_err(|e| DocumentError::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.dimension < -1 {
        return Err(DocumentError::Malformed { line: 0, column: 0, message: format!("dimension {} is below -1", raw.dimension) });
    }
    let mut seen = BTreeSet::new();
    let mut generators = Vec::with_capacity(raw.generators.len());
    for (index, g) in raw.generators.into_iter().enumerate() {
        if g.len() as i64 != raw.dimension + 1 {
            return Err(DocumentError::DimensionMismatch { index, dimension: raw.dimension, found: g.len() });
        }
        let mut sorted = g;
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(DocumentError::DuplicateVertexInGenerator { index, vertex: w[0] });
        }
        if !seen.insert(sorted.clone()) {
            return Err(DocumentError::DuplicateGenerator { index });
        }
        generators.push(sorted);
    }
    generators.sort();

    let equivalence = match raw.equivalence {
        None => None,
        Some(classes) => {
            let vertices: BTreeSet<u32> = generators.iter().flatten().copied().collect();
            let mut used = BTreeSet::new();
            let mut out = Vec::with_capacity(classes.len());
            for mut class in classes {
                class.sort_unstable();
                for &v in &class {
                    if !vertices.contains(&v) {
                        return Err(DocumentError::UnknownVertex(v));
                    }
                    if !used.insert(v) {
                        return Err(DocumentError::OverlappingClasses(v));
                    }
                }
                out.push(class);
            }
            out.sort();
            Some(out)
        }
    };
    Ok(ComplexDocument { dimension: raw.dimension, generators, equivalence, metadata: raw.metadata })
}

fn to_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json values always serialize");
    out.push(b'\n');
    out
}

pub fn serialize(doc: &ComplexDocument) -> Vec<u8> {
    to_bytes(&doc.to_value())
}

fn simplex_list<'a>(it: impl Iterator<Item = &'a Simplex>) -> Value {
    json!(it.map(|s| s.vertices().iter().map(|v| v.0).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn normal_form_value(nf: &StarNormalForm) -> Value {
    let sphere = ComplexDocument::from_complex(&nf.sphere).expect("links of uniform complexes are uniform");
    let pairs: Vec<Value> = nf.pairing.pairs.iter().map(|(g, p)| simplex_list([g, p].into_iter())).collect();
    let mut doc = json!({
        "apex": nf.apex.0,
        "sphere": sphere.to_value(),
        "equivalence": nf.eq.classes().iter().map(|c| c.iter().map(|v| v.0).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "pairing": {
            "pairs": pairs,
            "unpaired": simplex_list(nf.pairing.unpaired.iter()),
        },
        "trace": serde_json::to_value(&nf.trace).expect("trace serializes"),
        "steps": nf.steps,
    });
    if nf.manifold_unverified {
        doc["manifold_unverified"] = json!(true);
    }
    doc
}

pub fn serialize_normal_form(nf: &StarNormalForm) -> Vec<u8> {
    to_bytes(&normal_form_value(nf))
}

pub fn serialize_value(v: &Value) -> Vec<u8> {
    to_bytes(v)
}

/// Parses a comma-separated vertex list such as `"1,2"`.
pub fn parse_simplex(text: &str) -> Result<Simplex, DocumentError> {
    let malformed = |message: String| DocumentError::Malformed { line: 1, column: 0, message };
    let labels = text
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|e| malformed(format!("bad vertex {t:?}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Simplex::new(labels.iter().copied().map(VertexId)).map_err(|e| malformed(e.to_string()))
}
