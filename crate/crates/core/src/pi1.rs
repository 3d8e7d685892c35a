//! Fundamental-group presentations read off a star normal form.
//!
//! For a surface the link of the apex is a polygon whose edges are glued in
//! pairs. The presentation is the polygon word together with one trivial
//! relator per edge of a spanning tree of the glued boundary graph, since the
//! gluing may leave several vertex classes. In
//! higher dimension the group is the edge-path group of the 2-skeleton of the
//! quotient `S/≃`, taken relative to a breadth-first spanning tree.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::complex::{Simplex, VertexId};
use crate::normalize::StarNormalForm;
use crate::quotient::{quotient_cells, QuotientComplex, QuotientError};
use crate::smith::invariant_factors;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Pi1Error {
    #[error("surface has {0} unpaired boundary edges; the polygon word needs a closed surface")]
    OpenSurface(usize),
    #[error("bad normal form: {0}")]
    BadNormalForm(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
}

/// One generator raised to ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub exponent: i32,
}

impl Letter {
    pub fn new(generator: usize, exponent: i32) -> Self {
        debug_assert!(exponent == 1 || exponent == -1);
        Letter { generator, exponent }
    }

    fn inverse(self) -> Self {
        Letter { generator: self.generator, exponent: -self.exponent }
    }
}

pub type Word = Vec<Letter>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    fn letter_text(&self, l: &Letter) -> String {
        let name = &self.generators[l.generator];
        if l.exponent < 0 {
            format!("{name}^-1")
        } else {
            name.clone()
        }
    }

    pub fn relator_text(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter().map(|l| self.letter_text(l)).collect::<Vec<_>>().join(" ")
    }

    /// Free and cyclic reduction, removal of trivial or repeated relators, and
    /// elimination of generators killed by a one-letter relator.
    pub fn simplify(&self) -> GroupPresentation {
        let mut generators: Vec<Option<String>> = self.generators.iter().cloned().map(Some).collect();
        let mut relators: Vec<Word> = self.relators.iter().map(|w| cyclic_reduce(w)).collect();
        loop {
            relators.retain(|w| !w.is_empty());
            let Some(killed) = relators.iter().find(|w| w.len() == 1).map(|w| w[0].generator) else {
                break;
            };
            generators[killed] = None;
            relators = relators
                .iter()
                .map(|w| cyclic_reduce(&w.iter().copied().filter(|l| l.generator != killed).collect::<Vec<_>>()))
                .collect();
        }
        let mut index = BTreeMap::new();
        let mut names = Vec::new();
        for (old, name) in generators.into_iter().enumerate() {
            if let Some(name) = name {
                index.insert(old, names.len());
                names.push(name);
            }
        }
        let mut seen = BTreeSet::new();
        let relators = relators
            .into_iter()
            .map(|w| w.into_iter().map(|l| Letter::new(index[&l.generator], l.exponent)).collect::<Word>())
            .filter(|w| seen.insert(w.clone()))
            .collect();
        GroupPresentation { generators: names, relators }
    }

    /// Relators × generators matrix of exponent sums.
    pub fn exponent_sum_matrix(&self) -> Vec<Vec<i64>> {
        self.relators
            .iter()
            .map(|w| {
                let mut row = vec![0i64; self.generators.len()];
                for l in w {
                    row[l.generator] += l.exponent as i64;
                }
                row
            })
            .collect()
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|w| self.relator_text(w)).collect();
        write!(f, "⟨{} | {}⟩", self.generators.join(", "), rels.join(", "))
    }
}

impl Serialize for GroupPresentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            generators: &'a [String],
            relators: Vec<Vec<String>>,
        }
        Repr {
            generators: &self.generators,
            relators: self
                .relators
                .iter()
                .map(|w| w.iter().map(|l| self.letter_text(l)).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

fn cyclic_reduce(w: &[Letter]) -> Word {
    let mut out = free_reduce(w);
    while out.len() >= 2 && out[0] == out[out.len() - 1].inverse() {
        out.pop();
        out.remove(0);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    /// Torsion coefficients greater than one, each dividing the next.
    pub torsion: Vec<i64>,
}

impl AbelianInvariants {
    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn abelianization(p: &GroupPresentation) -> AbelianInvariants {
    let factors = invariant_factors(&p.exponent_sum_matrix());
    AbelianInvariants {
        free_rank: p.generators.len() - factors.len(),
        torsion: factors.into_iter().filter(|&d| d > 1).collect(),
    }
}

fn surface_dimension(nf: &StarNormalForm) -> Result<isize, Pi1Error> {
    if nf.sphere.is_empty() || !nf.sphere.is_uniform() {
        return Err(Pi1Error::BadNormalForm("sphere is empty or not uniform".into()));
    }
    Ok(nf.sphere.dimension() + 1)
}

/// The boundary word of the polygon `S` for a surface, one symbol per
/// generator pair, read once around the cycle starting at its least vertex.
pub fn polygon_word(nf: &StarNormalForm) -> Result<GroupPresentation, Pi1Error> {
    if surface_dimension(nf)? != 2 {
        return Err(Pi1Error::BadNormalForm("polygon words exist only for surfaces".into()));
    }
    if !nf.pairing.unpaired.is_empty() {
        return Err(Pi1Error::OpenSurface(nf.pairing.unpaired.len()));
    }
    let mut symbol: BTreeMap<&Simplex, usize> = BTreeMap::new();
    for (i, (g, p)) in nf.pairing.pairs.iter().enumerate() {
        symbol.insert(g, i);
        symbol.insert(p, i);
    }
    let generators = (1..=nf.pairing.pairs.len()).map(|i| format!("x{i}")).collect();

    let mut neighbours: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in nf.sphere.generators() {
        let (u, v) = (e.vertices()[0], e.vertices()[1]);
        neighbours.entry(u).or_default().push(v);
        neighbours.entry(v).or_default().push(u);
    }
    if neighbours.values().any(|n| n.len() != 2) {
        return Err(Pi1Error::BadNormalForm("link of the apex is not a cycle".into()));
    }
    let start = *neighbours.keys().next().expect("nonempty");
    let mut word = Vec::with_capacity(nf.sphere.len());
    let (mut prev, mut here) = (start, *neighbours[&start].iter().min().expect("two neighbours"));
    loop {
        let edge = Simplex::new([prev, here]).expect("distinct");
        let forward = nf.eq.class_of(prev) < nf.eq.class_of(here);
        word.push(Letter::new(symbol[&edge], if forward { 1 } else { -1 }));
        if here == start {
            break;
        }
        let next = neighbours[&here].iter().copied().find(|&v| v != prev).expect("cycle");
        prev = here;
        here = next;
    }
    if word.len() != nf.sphere.len() {
        return Err(Pi1Error::BadNormalForm("link of the apex is not a single cycle".into()));
    }
    Ok(GroupPresentation { generators, relators: vec![word] })
}

/// How the spanning tree of the quotient 1-skeleton is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeChoice {
    /// Breadth-first from the least vertex, neighbours in increasing order.
    BreadthFirst,
    /// Breadth-first from a random root with shuffled neighbour order.
    Random(u64),
}

/// Edge-path presentation of the 2-skeleton of a quotient complex.
///
/// Edges are oriented from the lesser class to the greater one. Generators
/// are the edges outside the spanning tree; every 2-cell contributes the word
/// read along its boundary.
pub fn edge_path_presentation(q: &QuotientComplex, tree: TreeChoice) -> GroupPresentation {
    let vertices: Vec<VertexId> = q.cells(0).map(|s| s.vertices()[0]).collect();
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = vertices.iter().map(|&v| (v, Vec::new())).collect();
    for e in q.cells(1) {
        let (u, v) = (e.vertices()[0], e.vertices()[1]);
        adjacency.get_mut(&u).expect("vertex cell").push(v);
        adjacency.get_mut(&v).expect("vertex cell").push(u);
    }
    let mut rng = match tree {
        TreeChoice::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TreeChoice::BreadthFirst => None,
    };

    let mut tree_edges: BTreeSet<Simplex> = BTreeSet::new();
    let mut visited: BTreeSet<VertexId> = BTreeSet::new();
    let mut roots = vertices.clone();
    if let Some(rng) = rng.as_mut() {
        roots.shuffle(rng);
    }
    for root in roots {
        if !visited.insert(root) {
            continue;
        }
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let mut next = adjacency[&u].clone();
            match rng.as_mut() {
                Some(rng) => next.shuffle(rng),
                None => next.sort_unstable(),
            }
            for v in next {
                if visited.insert(v) {
                    tree_edges.insert(Simplex::new([u, v]).expect("distinct"));
                    queue.push_back(v);
                }
            }
        }
    }

    let mut index: BTreeMap<Simplex, usize> = BTreeMap::new();
    let mut generators = Vec::new();
    for e in q.cells(1).filter(|e| !tree_edges.contains(*e)) {
        index.insert(e.clone(), generators.len());
        generators.push(format!("e{}_{}", e.vertices()[0], e.vertices()[1]));
    }
    let relators = q
        .cells(2)
        .map(|t| {
            let [a, b, c] = [t.vertices()[0], t.vertices()[1], t.vertices()[2]];
            [(a, b, 1), (b, c, 1), (a, c, -1)]
                .into_iter()
                .filter_map(|(u, v, exp)| {
                    index.get(&Simplex::new([u, v]).expect("distinct")).map(|&g| Letter::new(g, exp))
                })
                .collect()
        })
        .collect();
    GroupPresentation { generators, relators }
}

/// The polygon word plus a length-one relator for each pair symbol on a
/// spanning tree of the graph whose vertices are the vertex classes of `S`
/// and whose edges are the pair symbols.
pub fn surface_presentation(nf: &StarNormalForm, tree: TreeChoice) -> Result<GroupPresentation, Pi1Error> {
    let mut p = polygon_word(nf)?;
    let mut adjacency: BTreeMap<VertexId, Vec<(usize, VertexId)>> = BTreeMap::new();
    for (i, (g, _)) in nf.pairing.pairs.iter().enumerate() {
        let (u, v) = (nf.eq.class_of(g.vertices()[0]), nf.eq.class_of(g.vertices()[1]));
        adjacency.entry(u).or_default().push((i, v));
        adjacency.entry(v).or_default().push((i, u));
    }
    let mut rng = match tree {
        TreeChoice::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        TreeChoice::BreadthFirst => None,
    };
    let mut roots: Vec<VertexId> = adjacency.keys().copied().collect();
    if let Some(rng) = rng.as_mut() {
        roots.shuffle(rng);
    }
    let mut visited = BTreeSet::new();
    for root in roots {
        if !visited.insert(root) {
            continue;
        }
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let mut next = adjacency[&u].clone();
            match rng.as_mut() {
                Some(rng) => next.shuffle(rng),
                None => next.sort_unstable(),
            }
            for (symbol, v) in next {
                if visited.insert(v) {
                    p.relators.push(vec![Letter::new(symbol, 1)]);
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(p)
}

/// A presentation of the fundamental group of the normal form, simplified.
pub fn presentation(nf: &StarNormalForm) -> Result<GroupPresentation, Pi1Error> {
    presentation_with_tree(nf, TreeChoice::BreadthFirst)
}

pub fn presentation_with_tree(nf: &StarNormalForm, tree: TreeChoice) -> Result<GroupPresentation, Pi1Error> {
    match surface_dimension(nf)? {
        2 => Ok(surface_presentation(nf, tree)?.simplify()),
        n if n > 2 => {
            let q = quotient_cells(&nf.sphere, &nf.eq)?;
            Ok(edge_path_presentation(&q, tree).simplify())
        }
        n => Err(Pi1Error::BadNormalForm(format!("dimension {n} is below 2"))),
    }
}
