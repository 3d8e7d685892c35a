//! Stellar moves: subdivision (starring), weld, relabeling, plus the vertex
//! split used by normalization traces.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex, ComplexError, Simplex, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("simplex {0} is not a face of any generator")]
    FaceAbsent(Simplex),
    #[error("vertex {0} already occurs in the complex")]
    VertexInUse(VertexId),
    #[error("the empty simplex cannot be starred or welded")]
    EmptySimplex,
    #[error("not weldable: {0}")]
    NotWeldable(String),
    #[error("relabeling is not injective: two vertices map to {0}")]
    NotInjective(VertexId),
    #[error("generator {0} is not in the complex")]
    GeneratorAbsent(Simplex),
    #[error("invalid vertex split: {0}")]
    BadSplit(String),
    #[error("move {index} failed: {source}")]
    AtMove {
        index: usize,
        #[source]
        source: Box<MoveError>,
    },
    #[error("move {0} is a vertex split and has no inverse")]
    NotInvertible(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// A vertex relabeling. Vertices not mentioned map to themselves.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<(VertexId, VertexId)>", into = "Vec<(VertexId, VertexId)>")]
pub struct Relabeling(BTreeMap<VertexId, VertexId>);

impl Relabeling {
    pub fn new() -> Self {
        Relabeling::default()
    }

    pub fn insert(&mut self, from: VertexId, to: VertexId) {
        self.0.insert(from, to);
    }

    pub fn image(&self, v: VertexId) -> VertexId {
        self.0.get(&v).copied().unwrap_or(v)
    }

    pub fn inverse(&self) -> Relabeling {
        Relabeling(self.0.iter().map(|(&k, &v)| (v, k)).collect())
    }
}

impl<V: Into<VertexId>> FromIterator<(V, V)> for Relabeling {
    fn from_iter<T: IntoIterator<Item = (V, V)>>(iter: T) -> Self {
        Relabeling(iter.into_iter().map(|(a, b)| (a.into(), b.into())).collect())
    }
}

impl From<Vec<(VertexId, VertexId)>> for Relabeling {
    fn from(pairs: Vec<(VertexId, VertexId)>) -> Self {
        Relabeling(pairs.into_iter().collect())
    }
}

impl From<Relabeling> for Vec<(VertexId, VertexId)> {
    fn from(r: Relabeling) -> Self {
        r.0.into_iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveRecord {
    Subdivide { simplex: Simplex, vertex: VertexId },
    Weld { simplex: Simplex, vertex: VertexId },
    Relabel { permutation: Relabeling },
    /// Replace `old` by `fresh` inside one generator, recording `old ≃ fresh`.
    /// Not a stellar move; it only appears in normalization traces.
    SplitVertex { generator: Simplex, old: VertexId, fresh: VertexId },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MoveSequence {
    pub moves: Vec<MoveRecord>,
}

impl MoveSequence {
    pub fn new() -> Self {
        MoveSequence::default()
    }

    pub fn push(&mut self, m: MoveRecord) {
        self.moves.push(m);
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MoveRecord> {
        self.moves.iter()
    }
}

impl From<Vec<MoveRecord>> for MoveSequence {
    fn from(moves: Vec<MoveRecord>) -> Self {
        MoveSequence { moves }
    }
}

/// Smallest label above every vertex of `k`.
pub fn fresh_vertex(k: &Complex) -> VertexId {
    k.max_vertex().map_or(VertexId(0), |v| VertexId(v.0 + 1))
}

/// Stellar subdivision `(A a)K = a⋆∂A⋆lk(A,K) + Q(A,K)`.
///
/// Starring at a single vertex would erase the star (its boundary is zero),
/// so that case relabels the vertex to `a` instead.
pub fn subdivide(k: &Complex, a: &Simplex, vertex: VertexId) -> Result<Complex, MoveError> {
    if a.is_empty() {
        return Err(MoveError::EmptySimplex);
    }
    if !k.has_face(a) {
        return Err(MoveError::FaceAbsent(a.clone()));
    }
    if k.vertices().contains(&vertex) {
        return Err(MoveError::VertexInUse(vertex));
    }
    if a.len() == 1 {
        let old = a.vertices()[0];
        return Ok(k.map_vertices(|v| if v == old { vertex } else { v })?);
    }
    let starred = a.boundary().join(&k.link(a))?.cone(vertex)?;
    Ok(starred + k.residual(a))
}

/// Stellar weld `(A a)⁻¹K = A⋆B + Q(a,K)` where `lk(a,K) = ∂A⋆B`.
pub fn weld(k: &Complex, a: &Simplex, vertex: VertexId) -> Result<Complex, MoveError> {
    if a.is_empty() {
        return Err(MoveError::EmptySimplex);
    }
    if !k.vertices().contains(&vertex) {
        return Err(MoveError::NotWeldable(format!("vertex {vertex} does not occur")));
    }
    if a.contains_vertex(vertex) {
        return Err(MoveError::NotWeldable(format!("{a} contains the welded vertex {vertex}")));
    }
    if k.has_face(a) {
        return Err(MoveError::NotWeldable(format!("{a} is already a simplex of the complex")));
    }
    if a.len() == 1 {
        let new = a.vertices()[0];
        return Ok(k.map_vertices(|v| if v == vertex { new } else { v })?);
    }
    let link = k.link(&Simplex::vertex(vertex));
    let b = factor_link(&link, a).ok_or_else(|| {
        MoveError::NotWeldable(format!("link of {vertex} does not factor as ∂{a}⋆B"))
    })?;
    Ok(Complex::from_simplex(a.clone()).join(&b)? + k.residual(&Simplex::vertex(vertex)))
}

/// Divides `link` by `∂A`: returns the maximal `B` with `∂A⋆B ⊆ link`, if
/// `∂A⋆B` is all of `link`.
pub fn factor_link(link: &Complex, a: &Simplex) -> Option<Complex> {
    if a.len() < 2 || link.is_empty() {
        return None;
    }
    let facets = a.facets();
    let mut quotient: BTreeSet<Simplex> = BTreeSet::new();
    for l in link.generators() {
        let rest = l.difference(a);
        if l.len() - rest.len() != a.len() - 1 || quotient.contains(&rest) {
            continue;
        }
        let covered = facets
            .iter()
            .all(|f| f.join(&rest).map(|s| link.contains(&s)).unwrap_or(false));
        if covered {
            quotient.insert(rest);
        }
    }
    let b: Complex = quotient.into_iter().collect();
    let product = a.boundary().join(&b).ok()?;
    (!b.is_empty() && &product == link).then_some(b)
}

/// Finds some simplex `A` such that `(A v)⁻¹` applies to `k`.
///
/// Candidates are formed from the first link generator plus one outside
/// vertex; smaller `A` are tried first.
pub fn find_weld(k: &Complex, vertex: VertexId) -> Option<Simplex> {
    let link = k.link(&Simplex::vertex(vertex));
    let first = link.generators().next()?.clone();
    let outside: Vec<VertexId> = link
        .vertices()
        .into_iter()
        .filter(|v| !first.contains_vertex(*v))
        .collect();
    let n = first.len();
    for size in 1..=n {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let part: Vec<VertexId> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| first.vertices()[i])
                .collect();
            for &x in &outside {
                let mut verts = part.clone();
                verts.push(x);
                let cand = Simplex::new(verts).ok()?;
                if !k.has_face(&cand) && factor_link(&link, &cand).is_some() {
                    return Some(cand);
                }
            }
        }
    }
    None
}

/// Applies a vertex relabeling. Fails if two vertices of `k` collide.
pub fn relabel(k: &Complex, perm: &Relabeling) -> Result<Complex, MoveError> {
    let mut seen = BTreeSet::new();
    for v in k.vertices() {
        let image = perm.image(v);
        if !seen.insert(image) {
            return Err(MoveError::NotInjective(image));
        }
    }
    Ok(k.map_vertices(|v| perm.image(v))?)
}

/// Replaces `old` by `fresh` in generator `g`.
pub fn split_vertex(k: &Complex, g: &Simplex, old: VertexId, fresh: VertexId) -> Result<Complex, MoveError> {
    if !k.contains(g) {
        return Err(MoveError::GeneratorAbsent(g.clone()));
    }
    if !g.contains_vertex(old) {
        return Err(MoveError::BadSplit(format!("{old} is not a vertex of {g}")));
    }
    if g.contains_vertex(fresh) {
        return Err(MoveError::BadSplit(format!("{fresh} is already a vertex of {g}")));
    }
    let replaced = g.without_vertex(old).with_vertex(fresh)?;
    if k.contains(&replaced) {
        return Err(MoveError::BadSplit(format!("{replaced} is already a generator")));
    }
    let mut out = k.clone();
    out.toggle(g.clone());
    out.toggle(replaced);
    Ok(out)
}

pub fn apply_move(k: &Complex, m: &MoveRecord) -> Result<Complex, MoveError> {
    match m {
        MoveRecord::Subdivide { simplex, vertex } => subdivide(k, simplex, *vertex),
        MoveRecord::Weld { simplex, vertex } => weld(k, simplex, *vertex),
        MoveRecord::Relabel { permutation } => relabel(k, permutation),
        MoveRecord::SplitVertex { generator, old, fresh } => split_vertex(k, generator, *old, *fresh),
    }
}

/// Applies moves left to right; the error carries the index of the first failure.
pub fn apply_sequence(k: &Complex, seq: &MoveSequence) -> Result<Complex, MoveError> {
    let mut current = k.clone();
    for (index, m) in seq.iter().enumerate() {
        current = apply_move(&current, m).map_err(|e| MoveError::AtMove { index, source: Box::new(e) })?;
    }
    Ok(current)
}

/// Reverses a sequence of stellar moves. Vertex splits are rejected.
pub fn invert_sequence(seq: &MoveSequence) -> Result<MoveSequence, MoveError> {
    let mut out = Vec::with_capacity(seq.len());
    for (index, m) in seq.iter().enumerate().rev() {
        out.push(match m {
            MoveRecord::Subdivide { simplex, vertex } => MoveRecord::Weld { simplex: simplex.clone(), vertex: *vertex },
            MoveRecord::Weld { simplex, vertex } => MoveRecord::Subdivide { simplex: simplex.clone(), vertex: *vertex },
            MoveRecord::Relabel { permutation } => MoveRecord::Relabel { permutation: permutation.inverse() },
            MoveRecord::SplitVertex { .. } => return Err(MoveError::NotInvertible(index)),
        });
    }
    Ok(out.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(gens: &[&[u32]]) -> Complex {
        gens.iter().map(|g| Simplex::new(g.iter().copied()).unwrap()).collect()
    }

    fn s(v: &[u32]) -> Simplex {
        Simplex::new(v.iter().copied()).unwrap()
    }

    #[test]
    fn subdivide_a_generator() {
        let k = c(&[&[1, 2, 3]]);
        assert_eq!(subdivide(&k, &s(&[1, 2, 3]), VertexId(9)).unwrap(), c(&[&[9, 1, 2], &[9, 1, 3], &[9, 2, 3]]));
    }

    #[test]
    fn subdivide_an_edge() {
        let k = c(&[&[1, 2, 3]]);
        assert_eq!(subdivide(&k, &s(&[1, 2]), VertexId(9)).unwrap(), c(&[&[9, 1, 3], &[9, 2, 3]]));
    }

    #[test]
    fn subdivide_errors() {
        let k = c(&[&[1, 2, 3]]);
        assert_eq!(subdivide(&k, &s(&[4, 5]), VertexId(9)), Err(MoveError::FaceAbsent(s(&[4, 5]))));
        assert_eq!(subdivide(&k, &s(&[1, 2]), VertexId(3)), Err(MoveError::VertexInUse(VertexId(3))));
        assert_eq!(subdivide(&k, &Simplex::empty(), VertexId(9)), Err(MoveError::EmptySimplex));
    }

    #[test]
    fn subdivide_at_vertex_relabels() {
        let k = c(&[&[1, 2, 3], &[2, 3, 4]]);
        let out = subdivide(&k, &s(&[2]), VertexId(9)).unwrap();
        assert_eq!(out, c(&[&[1, 9, 3], &[9, 3, 4]]));
        assert_eq!(weld(&out, &s(&[2]), VertexId(9)).unwrap(), k);
    }

    #[test]
    fn weld_examples() {
        let k = c(&[&[9, 1, 3], &[9, 2, 3]]);
        assert_eq!(weld(&k, &s(&[1, 2]), VertexId(9)).unwrap(), c(&[&[1, 2, 3]]));

        let sphere = c(&[&[1, 2, 3, 4]]).boundary();
        let sub = subdivide(&sphere, &s(&[1, 2]), VertexId(9)).unwrap();
        assert_eq!(weld(&sub, &s(&[1, 2]), VertexId(9)).unwrap(), sphere);

        assert!(matches!(weld(&c(&[&[1, 2, 3]]), &s(&[1, 2]), VertexId(1)), Err(MoveError::NotWeldable(_))));
    }

    #[test]
    fn weld_across_a_square() {
        // link of 9 is the 4-cycle 1-2-3-4, which is ∂(1 3)⋆((2)+(4))
        let k = c(&[&[9, 1, 2], &[9, 2, 3], &[9, 3, 4], &[9, 1, 4]]);
        assert_eq!(weld(&k, &s(&[1, 3]), VertexId(9)).unwrap(), c(&[&[1, 2, 3], &[1, 3, 4]]));
        assert!(matches!(weld(&k, &s(&[1, 2, 3]), VertexId(9)), Err(MoveError::NotWeldable(_))));
    }

    #[test]
    fn factor_link_recovers_the_link_of_a() {
        let k = c(&[&[1, 2, 3, 4]]).boundary();
        let a = s(&[1, 2]);
        let sub = subdivide(&k, &a, VertexId(9)).unwrap();
        let b = factor_link(&sub.link(&s(&[9])), &a).unwrap();
        assert_eq!(b, k.link(&a));
    }

    #[test]
    fn find_weld_undoes_subdivision() {
        let k = c(&[&[1, 2, 3, 4, 5]]).boundary();
        let sub = subdivide(&k, &s(&[2, 3, 4]), VertexId(6)).unwrap();
        let a = find_weld(&sub, VertexId(6)).unwrap();
        assert_eq!(weld(&sub, &a, VertexId(6)).unwrap(), k);
        assert_eq!(find_weld(&k, VertexId(1)), None);
    }

    #[test]
    fn relabel_examples() {
        let perm: Relabeling = [(1u32, 4u32), (2, 5), (3, 6)].into_iter().collect();
        assert_eq!(relabel(&c(&[&[1, 2, 3]]), &perm).unwrap(), c(&[&[4, 5, 6]]));
        let k = c(&[&[1, 2, 3], &[2, 3, 4]]);
        assert_eq!(relabel(&k, &Relabeling::new()).unwrap(), k);
        let bad: Relabeling = [(1u32, 2u32), (2, 2)].into_iter().collect();
        assert_eq!(relabel(&c(&[&[1, 2]]), &bad), Err(MoveError::NotInjective(VertexId(2))));
    }

    #[test]
    fn sequences() {
        let k = c(&[&[1, 2, 3, 4]]).boundary();
        let a = s(&[1, 2]);
        let seq: MoveSequence = vec![
            MoveRecord::Subdivide { simplex: a.clone(), vertex: VertexId(9) },
            MoveRecord::Weld { simplex: a, vertex: VertexId(9) },
        ]
        .into();
        assert_eq!(apply_sequence(&k, &seq).unwrap(), k);
        assert_eq!(apply_sequence(&k, &MoveSequence::new()).unwrap(), k);

        let two: MoveSequence = vec![
            MoveRecord::Subdivide { simplex: s(&[1, 2]), vertex: VertexId(9) },
            MoveRecord::Subdivide { simplex: s(&[9, 3]), vertex: VertexId(10) },
        ]
        .into();
        let out = apply_sequence(&c(&[&[1, 2, 3]]), &two).unwrap();
        assert_eq!(out, c(&[&[10, 3, 1], &[10, 3, 2], &[10, 9, 1], &[10, 9, 2]]));
        let back = invert_sequence(&two).unwrap();
        assert_eq!(apply_sequence(&out, &back).unwrap(), c(&[&[1, 2, 3]]));
    }

    #[test]
    fn sequence_error_reports_index() {
        let seq: MoveSequence = vec![
            MoveRecord::Subdivide { simplex: s(&[1, 2]), vertex: VertexId(9) },
            MoveRecord::Subdivide { simplex: s(&[1, 2]), vertex: VertexId(10) },
        ]
        .into();
        match apply_sequence(&c(&[&[1, 2, 3]]), &seq) {
            Err(MoveError::AtMove { index: 1, source }) => assert_eq!(*source, MoveError::FaceAbsent(s(&[1, 2]))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn splits_do_not_invert() {
        let seq: MoveSequence = vec![
            MoveRecord::Relabel { permutation: [(1u32, 7u32)].into_iter().collect() },
            MoveRecord::SplitVertex { generator: s(&[1, 2]), old: VertexId(1), fresh: VertexId(5) },
        ]
        .into();
        assert_eq!(invert_sequence(&seq), Err(MoveError::NotInvertible(1)));
    }

    #[test]
    fn split_vertex_replaces_one_generator() {
        let k = c(&[&[1, 2, 3], &[2, 3, 4]]);
        let out = split_vertex(&k, &s(&[2, 3, 4]), VertexId(4), VertexId(7)).unwrap();
        assert_eq!(out, c(&[&[1, 2, 3], &[2, 3, 7]]));
        assert!(split_vertex(&k, &s(&[2, 3, 5]), VertexId(5), VertexId(7)).is_err());
    }

    #[test]
    fn trace_json_shape() {
        let seq: MoveSequence = vec![MoveRecord::Weld { simplex: s(&[1, 2]), vertex: VertexId(9) }].into();
        let json = serde_json::to_string(&seq).unwrap();
        assert_eq!(json, r#"[{"kind":"weld","simplex":[1,2],"vertex":9}]"#);
        let back: MoveSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seq);
    }
}
