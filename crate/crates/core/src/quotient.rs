//! Regular vertex equivalences, the generator pairing they induce, and the
//! cell structure of the quotient `S/≃`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{Complex, Simplex, Verdict, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("vertex {0} is not a vertex of the complex")]
    UnknownVertex(VertexId),
    #[error("vertex {0} belongs to more than one class")]
    OverlappingClasses(VertexId),
    #[error("equivalence is not regular: {0}")]
    NotRegular(String),
}

/// A partition of vertex labels. Vertices that are never mentioned form
/// singleton classes; every class is represented by its least member.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<VertexId>>", into = "Vec<Vec<VertexId>>")]
pub struct RegularEquivalence {
    representative: BTreeMap<VertexId, VertexId>,
}

impl RegularEquivalence {
    pub fn identity() -> Self {
        RegularEquivalence::default()
    }

    pub fn from_classes<I, C, V>(classes: I) -> Result<Self, QuotientError>
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = V>,
        V: Into<VertexId>,
    {
        let mut seen = BTreeSet::new();
        let mut eq = RegularEquivalence::identity();
        for class in classes {
            let members: Vec<VertexId> = class.into_iter().map(Into::into).collect();
            for &v in &members {
                if !seen.insert(v) {
                    return Err(QuotientError::OverlappingClasses(v));
                }
            }
            for w in members.iter().skip(1) {
                eq.union(members[0], *w);
            }
        }
        Ok(eq)
    }

    pub fn class_of(&self, v: VertexId) -> VertexId {
        self.representative.get(&v).copied().unwrap_or(v)
    }

    pub fn equivalent(&self, a: VertexId, b: VertexId) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    /// Merges the classes of `a` and `b`.
    pub fn union(&mut self, a: VertexId, b: VertexId) {
        let (ra, rb) = (self.class_of(a), self.class_of(b));
        if ra == rb {
            return;
        }
        let (keep, drop) = (ra.min(rb), ra.max(rb));
        for r in self.representative.values_mut() {
            if *r == drop {
                *r = keep;
            }
        }
        self.representative.insert(drop, keep);
        self.representative.insert(keep, keep);
    }

    /// Non-singleton classes, each sorted, ordered by least member.
    pub fn classes(&self) -> Vec<Vec<VertexId>> {
        let mut by_rep: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (&v, &r) in &self.representative {
            by_rep.entry(r).or_default().push(v);
        }
        by_rep.into_values().filter(|c| c.len() > 1).collect()
    }

    /// Every vertex that sits in a non-singleton class.
    pub fn members(&self) -> BTreeSet<VertexId> {
        self.classes().into_iter().flatten().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.classes().is_empty()
    }

    /// Keeps only the given vertices; classes that become singletons vanish.
    pub fn restrict(&self, keep: &BTreeSet<VertexId>) -> RegularEquivalence {
        let classes = self
            .classes()
            .into_iter()
            .map(|c| c.into_iter().filter(|v| keep.contains(v)).collect::<Vec<_>>());
        RegularEquivalence::from_classes(classes).expect("restriction of a partition is a partition")
    }

    /// Sorted class representatives of the vertices of `s`, repeats kept.
    pub fn project(&self, s: &Simplex) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = s.vertices().iter().map(|&v| self.class_of(v)).collect();
        out.sort_unstable();
        out
    }

    /// The image of `s` when its vertices are distinct classes.
    pub fn project_simplex(&self, s: &Simplex) -> Option<Simplex> {
        Simplex::new(self.project(s)).ok()
    }
}

impl TryFrom<Vec<Vec<VertexId>>> for RegularEquivalence {
    type Error = QuotientError;

    fn try_from(classes: Vec<Vec<VertexId>>) -> Result<Self, Self::Error> {
        RegularEquivalence::from_classes(classes)
    }
}

impl From<RegularEquivalence> for Vec<Vec<VertexId>> {
    fn from(eq: RegularEquivalence) -> Self {
        eq.classes()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GeneratorPairing {
    pub pairs: Vec<(Simplex, Simplex)>,
    pub unpaired: Vec<Simplex>,
}

impl GeneratorPairing {
    pub fn is_perfect(&self) -> bool {
        self.unpaired.is_empty()
    }
}

fn check_vertices(s: &Complex, eq: &RegularEquivalence) -> Result<(), QuotientError> {
    let verts = s.vertices();
    match eq.members().into_iter().find(|v| !verts.contains(v)) {
        Some(v) => Err(QuotientError::UnknownVertex(v)),
        None => Ok(()),
    }
}

/// Checks both regularity conditions: no generator has two equivalent
/// vertices, and each generator has at most one other generator whose
/// vertex classes cover its own.
pub fn validate_regular(s: &Complex, eq: &RegularEquivalence) -> Result<Verdict, QuotientError> {
    check_vertices(s, eq)?;
    let gens: Vec<&Simplex> = s.generators().collect();
    let mut projected = Vec::with_capacity(gens.len());
    for g in &gens {
        let p = eq.project(g);
        if let Some(w) = p.windows(2).find(|w| w[0] == w[1]) {
            let pair: Vec<VertexId> = g.vertices().iter().copied().filter(|&v| eq.class_of(v) == w[0]).collect();
            return Ok(Verdict::no(format!(
                "condition (i): generator {g} has equivalent vertices {:?}",
                pair
            )));
        }
        projected.push(p.into_iter().collect::<BTreeSet<_>>());
    }
    for (i, g) in gens.iter().enumerate() {
        let matches: Vec<&Simplex> = gens
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && projected[i].is_subset(&projected[j]))
            .map(|(_, p)| *p)
            .collect();
        if matches.len() > 1 {
            return Ok(Verdict::no(format!(
                "condition (ii): generator {g} is equivalent to {}",
                matches.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
    }
    Ok(Verdict::yes())
}

fn require_regular(s: &Complex, eq: &RegularEquivalence) -> Result<(), QuotientError> {
    let v = validate_regular(s, eq)?;
    if v.is_yes() {
        Ok(())
    } else {
        Err(QuotientError::NotRegular(v.witness.unwrap_or_default()))
    }
}

/// Pairs each generator with the other generator carrying the same vertex classes.
pub fn derive_pairing(s: &Complex, eq: &RegularEquivalence) -> Result<GeneratorPairing, QuotientError> {
    require_regular(s, eq)?;
    let mut groups: BTreeMap<Vec<VertexId>, Vec<Simplex>> = BTreeMap::new();
    for g in s.generators() {
        groups.entry(eq.project(g)).or_default().push(g.clone());
    }
    let mut pairing = GeneratorPairing::default();
    for mut group in groups.into_values() {
        match group.len() {
            1 => pairing.unpaired.push(group.pop().expect("nonempty")),
            2 => {
                let b = group.pop().expect("two");
                let a = group.pop().expect("two");
                pairing.pairs.push((a, b));
            }
            // generators of different dimensions can share a class set only
            // in non-uniform complexes; leave them unpaired
            _ => pairing.unpaired.extend(group),
        }
    }
    pairing.pairs.sort();
    pairing.unpaired.sort();
    Ok(pairing)
}

/// Faces of `S` grouped by their vertex-class sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientComplex {
    /// Orbit representatives per dimension, written on class representatives.
    pub cells_by_dimension: BTreeMap<usize, BTreeSet<Simplex>>,
    /// Boundary cells of every 1- and 2-cell.
    pub incidence: BTreeMap<Simplex, Vec<Simplex>>,
    /// Face counts of the unidentified complex.
    pub source_f_vector: Vec<usize>,
    /// Number of generators of the unidentified complex.
    pub source_generators: usize,
}

impl QuotientComplex {
    pub fn cell_counts(&self) -> Vec<usize> {
        let top = self.cells_by_dimension.keys().next_back().map_or(0, |d| d + 1);
        (0..top).map(|d| self.cells_by_dimension.get(&d).map_or(0, BTreeSet::len)).collect()
    }

    pub fn cells(&self, dim: usize) -> impl Iterator<Item = &Simplex> {
        self.cells_by_dimension.get(&dim).into_iter().flatten()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.cell_counts())
    }

    /// Euler characteristic of the cone `a⋆(S/≃)`.
    ///
    /// Only `S` is identified: the apex and every cone cell `a⋆σ`, one per
    /// face `σ` of `S`, stay distinct. So `χ = 1 − χ(S) + χ(S/≃)`.
    pub fn cone_euler_characteristic(&self) -> i64 {
        1 - alternating_sum(&self.source_f_vector) + self.euler_characteristic()
    }
}

fn alternating_sum(counts: &[usize]) -> i64 {
    counts
        .iter()
        .enumerate()
        .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
        .sum()
}

pub fn quotient_cells(s: &Complex, eq: &RegularEquivalence) -> Result<QuotientComplex, QuotientError> {
    require_regular(s, eq)?;
    let mut cells_by_dimension: BTreeMap<usize, BTreeSet<Simplex>> = BTreeMap::new();
    let faces = s.faces_by_dimension();
    for (&d, faces) in &faces {
        for f in faces {
            let cell = eq
                .project_simplex(f)
                .ok_or_else(|| QuotientError::NotRegular(format!("face {f} has equivalent vertices")))?;
            cells_by_dimension.entry(d).or_default().insert(cell);
        }
    }
    let mut incidence = BTreeMap::new();
    for d in [1usize, 2] {
        for cell in cells_by_dimension.get(&d).into_iter().flatten() {
            incidence.insert(cell.clone(), cell.facets());
        }
    }
    Ok(QuotientComplex {
        cells_by_dimension,
        incidence,
        source_f_vector: s.f_vector(),
        source_generators: s.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Outcome;

    fn c(gens: &[&[u32]]) -> Complex {
        gens.iter().map(|g| Simplex::new(g.iter().copied()).unwrap()).collect()
    }

    fn eq(classes: &[&[u32]]) -> RegularEquivalence {
        RegularEquivalence::from_classes(classes.iter().map(|c| c.iter().copied())).unwrap()
    }

    #[test]
    fn union_keeps_least_representative() {
        let mut e = RegularEquivalence::identity();
        e.union(VertexId(5), VertexId(9));
        e.union(VertexId(9), VertexId(2));
        assert_eq!(e.class_of(VertexId(9)), VertexId(2));
        assert_eq!(e.class_of(VertexId(5)), VertexId(2));
        assert_eq!(e.classes(), vec![vec![VertexId(2), VertexId(5), VertexId(9)]]);
        assert_eq!(e.restrict(&[VertexId(5), VertexId(9)].into()).classes(), vec![vec![VertexId(5), VertexId(9)]]);
        assert!(e.restrict(&[VertexId(5)].into()).is_identity());
    }

    #[test]
    fn overlapping_classes_rejected() {
        assert_eq!(
            RegularEquivalence::from_classes([vec![1u32, 2], vec![2, 3]]),
            Err(QuotientError::OverlappingClasses(VertexId(2)))
        );
    }

    #[test]
    fn identity_is_regular() {
        let s = c(&[&[1, 2, 3, 4]]).boundary();
        assert!(validate_regular(&s, &RegularEquivalence::identity()).unwrap().is_yes());
        let p = derive_pairing(&s, &RegularEquivalence::identity()).unwrap();
        assert!(p.pairs.is_empty());
        assert_eq!(p.unpaired.len(), 4);
    }

    #[test]
    fn condition_one_violation() {
        let v = validate_regular(&c(&[&[1, 2]]), &eq(&[&[1, 2]])).unwrap();
        assert_eq!(v.outcome, Outcome::No);
        assert!(v.witness.unwrap().contains("condition (i)"));
    }

    #[test]
    fn condition_two_violation() {
        let square = c(&[&[1, 2], &[2, 3], &[3, 4], &[1, 4]]);
        let v = validate_regular(&square, &eq(&[&[1, 3], &[2, 4]])).unwrap();
        assert_eq!(v.outcome, Outcome::No);
        assert!(v.witness.unwrap().contains("condition (ii)"));
    }

    #[test]
    fn unknown_vertex() {
        assert_eq!(
            validate_regular(&c(&[&[1, 2]]), &eq(&[&[1, 7]])),
            Err(QuotientError::UnknownVertex(VertexId(7)))
        );
    }

    #[test]
    fn forced_pairing() {
        let s = c(&[&[1, 2], &[3, 4]]);
        let p = derive_pairing(&s, &eq(&[&[1, 3], &[2, 4]])).unwrap();
        assert_eq!(p.pairs, vec![(Simplex::from([1, 2]), Simplex::from([3, 4]))]);
        assert!(p.is_perfect());
        assert!(matches!(derive_pairing(&c(&[&[1, 2]]), &eq(&[&[1, 2]])), Err(QuotientError::NotRegular(_))));
    }

    #[test]
    fn identity_quotient_of_triangle_boundary() {
        let q = quotient_cells(&c(&[&[1, 2, 3]]).boundary(), &RegularEquivalence::identity()).unwrap();
        assert_eq!(q.cell_counts(), vec![3, 3]);
        assert_eq!(q.euler_characteristic(), 0);
    }

    #[test]
    fn square_with_opposite_sides_glued() {
        // hexagon 1-2-3-4-5-6 with (1 2)~(4 5) via 1~4, 2~5: an identified polygon
        let hex = c(&[&[1, 2], &[2, 3], &[3, 4], &[4, 5], &[5, 6], &[1, 6]]);
        let e = eq(&[&[1, 4], &[2, 5]]);
        assert!(validate_regular(&hex, &e).unwrap().is_yes());
        let p = derive_pairing(&hex, &e).unwrap();
        assert_eq!(p.pairs, vec![(Simplex::from([1, 2]), Simplex::from([4, 5]))]);
        let q = quotient_cells(&hex, &e).unwrap();
        // vertices {1,4},{2,5},3,6 and edges 12, 23, 34→13, 56→26, 16
        assert_eq!(q.cell_counts(), vec![4, 5]);
        assert_eq!(q.incidence[&Simplex::from([1, 2])], vec![Simplex::from([1]), Simplex::from([2])]);
    }

    #[test]
    fn serde_as_class_lists() {
        let e = eq(&[&[4, 1], &[7, 9, 8]]);
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, "[[1,4],[7,8,9]]");
        let back: RegularEquivalence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, e);
    }
}
