//! Simplexes and complexes as chains over the two-element field.
//!
//! A [`Complex`] stores its generators only; lower faces are derived on
//! demand. Adding a simplex that is already present removes it, so `+` on
//! complexes is symmetric difference.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque vertex label. Only equality and order are meaningful.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("vertex {0} appears more than once in a simplex")]
    RepeatedVertex(VertexId),
    #[error("join operands share vertex {0}")]
    SharedVertex(VertexId),
}

/// A simplex, stored as its strictly increasing vertex list.
///
/// The empty simplex is allowed; it is the unit for joins and shows up as the
/// link of a generator inside its own complex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Simplex {
    vertices: Vec<VertexId>,
}

impl TryFrom<Vec<VertexId>> for Simplex {
    type Error = ComplexError;

    fn try_from(vertices: Vec<VertexId>) -> Result<Self, Self::Error> {
        Simplex::new(vertices)
    }
}

impl From<Simplex> for Vec<VertexId> {
    fn from(s: Simplex) -> Self {
        s.vertices
    }
}

/// Panics on repeated vertices; meant for literals in tests and fixtures.
impl<const N: usize> From<[u32; N]> for Simplex {
    fn from(vertices: [u32; N]) -> Self {
        Simplex::new(vertices).expect("simplex literal with repeated vertex")
    }
}

impl Simplex {
    pub fn new<I, V>(vertices: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let mut vertices: Vec<VertexId> = vertices.into_iter().map(Into::into).collect();
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(ComplexError::RepeatedVertex(w[0]));
        }
        Ok(Simplex { vertices })
    }

    pub fn empty() -> Self {
        Simplex::default()
    }

    pub fn vertex(v: impl Into<VertexId>) -> Self {
        Simplex { vertices: vec![v.into()] }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of vertices minus one; the empty simplex has dimension -1.
    pub fn dimension(&self) -> isize {
        self.vertices.len() as isize - 1
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// True if every vertex of `self` is a vertex of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.vertices.iter();
        'outer: for v in &self.vertices {
            for w in it.by_ref() {
                if w == v {
                    continue 'outer;
                }
                if w > v {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.vertices.iter().all(|v| !other.contains_vertex(*v))
    }

    /// Join of two simplexes: the union of disjoint vertex sets.
    pub fn join(&self, other: &Simplex) -> Result<Simplex, ComplexError> {
        if let Some(v) = self.vertices.iter().find(|v| other.contains_vertex(**v)) {
            return Err(ComplexError::SharedVertex(*v));
        }
        let mut vertices = Vec::with_capacity(self.len() + other.len());
        vertices.extend_from_slice(&self.vertices);
        vertices.extend_from_slice(&other.vertices);
        vertices.sort_unstable();
        Ok(Simplex { vertices })
    }

    /// Vertices of `self` that are not in `other`.
    pub fn difference(&self, other: &Simplex) -> Simplex {
        Simplex {
            vertices: self
                .vertices
                .iter()
                .copied()
                .filter(|v| !other.contains_vertex(*v))
                .collect(),
        }
    }

    pub fn with_vertex(&self, v: VertexId) -> Result<Simplex, ComplexError> {
        self.join(&Simplex::vertex(v))
    }

    pub fn without_vertex(&self, v: VertexId) -> Simplex {
        Simplex { vertices: self.vertices.iter().copied().filter(|&w| w != v).collect() }
    }

    /// Codimension-one faces in increasing order. A vertex has none.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.len() <= 1 {
            return Vec::new();
        }
        let mut out: Vec<Simplex> = (0..self.len())
            .map(|skip| Simplex {
                vertices: self
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, v)| *v)
                    .collect(),
            })
            .collect();
        out.sort();
        out
    }

    /// Every nonempty face, the simplex itself included.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.len();
        assert!(n < 31, "simplex too large for face enumeration");
        (1u32..(1u32 << n))
            .map(|mask| Simplex {
                vertices: (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.vertices[i])
                    .collect(),
            })
            .collect()
    }

    /// The boundary of a single simplex as a complex.
    pub fn boundary(&self) -> Complex {
        Complex::from_iter(self.facets())
    }

    pub(crate) fn map_vertices(&self, f: impl Fn(VertexId) -> VertexId) -> Result<Simplex, ComplexError> {
        Simplex::new(self.vertices.iter().map(|&v| f(v)))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A finite formal sum of simplexes with coefficients in Z2.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Complex {
    generators: BTreeSet<Simplex>,
}

impl Complex {
    /// The zero complex.
    pub fn new() -> Self {
        Complex::default()
    }

    pub fn from_simplex(s: Simplex) -> Self {
        let mut generators = BTreeSet::new();
        generators.insert(s);
        Complex { generators }
    }

    /// Adds `s` over Z2. Returns true if `s` is present afterwards.
    pub fn toggle(&mut self, s: Simplex) -> bool {
        if self.generators.remove(&s) {
            false
        } else {
            self.generators.insert(s);
            true
        }
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.generators.contains(s)
    }

    /// Generators in lexicographic order.
    pub fn generators(&self) -> impl DoubleEndedIterator<Item = &Simplex> + ExactSizeIterator {
        self.generators.iter()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.generators.iter().flat_map(|g| g.vertices().iter().copied()).collect()
    }

    pub fn max_vertex(&self) -> Option<VertexId> {
        self.generators.iter().filter_map(|g| g.vertices().last().copied()).max()
    }

    /// Largest generator dimension; -1 for the zero complex.
    pub fn dimension(&self) -> isize {
        self.generators.iter().map(Simplex::dimension).max().unwrap_or(-1)
    }

    /// All generators share one dimension. The zero complex counts as uniform.
    pub fn is_uniform(&self) -> bool {
        let mut dims = self.generators.iter().map(Simplex::len);
        match dims.next() {
            None => true,
            Some(d) => dims.all(|e| e == d),
        }
    }

    /// True if `face` is contained in some generator.
    pub fn has_face(&self, face: &Simplex) -> bool {
        self.generators.iter().any(|g| face.is_face_of(g))
    }

    pub fn boundary(&self) -> Complex {
        let mut out = Complex::new();
        for g in &self.generators {
            for f in g.facets() {
                out.toggle(f);
            }
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.boundary().is_empty()
    }

    /// Bilinear join. Fails if the two complexes share a vertex.
    pub fn join(&self, other: &Complex) -> Result<Complex, ComplexError> {
        let mine = self.vertices();
        if let Some(v) = other.vertices().into_iter().find(|v| mine.contains(v)) {
            return Err(ComplexError::SharedVertex(v));
        }
        let mut out = Complex::new();
        for q in &self.generators {
            for p in &other.generators {
                out.toggle(q.join(p)?);
            }
        }
        Ok(out)
    }

    /// Cone over `self` with apex `v`.
    pub fn cone(&self, v: VertexId) -> Result<Complex, ComplexError> {
        Complex::from_simplex(Simplex::vertex(v)).join(self)
    }

    /// `{ B : A ∪ B is a generator, A ∩ B = ∅ }`.
    pub fn link(&self, a: &Simplex) -> Complex {
        self.generators
            .iter()
            .filter(|g| a.is_face_of(g))
            .map(|g| g.difference(a))
            .collect()
    }

    /// Generators that do not contain `a`.
    pub fn residual(&self, a: &Simplex) -> Complex {
        self.generators.iter().filter(|g| !a.is_face_of(g)).cloned().collect()
    }

    /// Generators that do contain `a`.
    pub fn star(&self, a: &Simplex) -> Complex {
        self.generators.iter().filter(|g| a.is_face_of(g)).cloned().collect()
    }

    /// Distinct nonempty faces of all generators, grouped by dimension.
    pub fn faces_by_dimension(&self) -> BTreeMap<usize, BTreeSet<Simplex>> {
        let mut out: BTreeMap<usize, BTreeSet<Simplex>> = BTreeMap::new();
        for g in &self.generators {
            for f in g.faces() {
                out.entry(f.len() - 1).or_default().insert(f);
            }
        }
        out
    }

    /// Number of distinct faces in each dimension, starting at 0.
    pub fn f_vector(&self) -> Vec<usize> {
        let faces = self.faces_by_dimension();
        let top = faces.keys().next_back().map_or(0, |d| d + 1);
        (0..top).map(|d| faces.get(&d).map_or(0, BTreeSet::len)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Generators partitioned by shared-vertex adjacency, ordered by least generator.
    pub fn connected_components(&self) -> Vec<Complex> {
        let gens: Vec<&Simplex> = self.generators.iter().collect();
        let mut parent: Vec<usize> = (0..gens.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            for v in g.vertices() {
                match owner.get(v) {
                    Some(&j) => {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri.max(rj)] = ri.min(rj);
                        }
                    }
                    None => {
                        owner.insert(*v, i);
                    }
                }
            }
        }
        let mut parts: BTreeMap<usize, Complex> = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            let root = find(&mut parent, i);
            parts.entry(root).or_default().generators.insert((*g).clone());
        }
        parts.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    pub(crate) fn map_vertices(&self, f: impl Fn(VertexId) -> VertexId) -> Result<Complex, ComplexError> {
        let mut out = Complex::new();
        for g in &self.generators {
            out.toggle(g.map_vertices(&f)?);
        }
        Ok(out)
    }
}

impl FromIterator<Simplex> for Complex {
    /// Collects with Z2 semantics: a simplex listed twice cancels.
    fn from_iter<T: IntoIterator<Item = Simplex>>(iter: T) -> Self {
        let mut out = Complex::new();
        for s in iter {
            out.toggle(s);
        }
        out
    }
}

impl AddAssign<&Complex> for Complex {
    fn add_assign(&mut self, rhs: &Complex) {
        for s in &rhs.generators {
            self.toggle(s.clone());
        }
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;

    fn add(self, rhs: &Complex) -> Complex {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Complex {
    type Output = Complex;

    fn add(mut self, rhs: Complex) -> Complex {
        self += &rhs;
        self
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.generators.is_empty() {
            return write!(f, "0");
        }
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{g:?}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Yes,
    No,
    Unknown,
}

/// A three-valued answer with an optional explanation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn yes() -> Self {
        Verdict { outcome: Outcome::Yes, witness: None }
    }

    pub fn no(witness: impl Into<String>) -> Self {
        Verdict { outcome: Outcome::No, witness: Some(witness.into()) }
    }

    pub fn unknown(witness: impl Into<String>) -> Self {
        Verdict { outcome: Outcome::Unknown, witness: Some(witness.into()) }
    }

    pub fn is_yes(&self) -> bool {
        self.outcome == Outcome::Yes
    }
}
