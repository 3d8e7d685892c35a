//! Rewriting a connected stellar manifold into star normal form `a⋆(S/≃)`.
//!
//! The input is first starred at its least generator with a fresh apex `a`.
//! Each step then absorbs one generator `p` of the residual `Q(a, N)` that
//! shares a codimension-one face `F` with the link `S = lk(a, N)`, by
//! starring `F` at a fresh `b` and welding the edge `(a w)` at `b`, where
//! `w` is the vertex of `p` opposite `F`. The new link is `S + ∂p`.
//!
//! When `w` already occurs on the link, `p` is first split: `w` is replaced
//! by a fresh vertex `d` inside `p` and `d ≃ w` is recorded. Every vertex
//! created this way is equivalent to exactly one input vertex (its class
//! representative, since fresh labels exceed every input label), so a face
//! of the link and a face of the residual are the same face of the input
//! exactly when their vertex classes agree. Adjacency is tested on classes.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::complex::{Complex, Simplex, Verdict, VertexId};
use crate::moves::{apply_sequence, split_vertex, subdivide, weld, MoveError, MoveRecord, MoveSequence};
use crate::quotient::{derive_pairing, validate_regular, GeneratorPairing, QuotientError, RegularEquivalence};
use crate::recognition::{is_stellar_manifold, recognize_ball_or_sphere, RecognitionError, Shape, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("complex is empty")]
    Empty,
    #[error("complex is not uniform")]
    NotUniform,
    #[error("normalization needs dimension at least 2, got {0}")]
    UnsupportedDimension(isize),
    #[error("complex is not connected ({0} generators left unreached)")]
    NotConnected(usize),
    #[error("not a stellar manifold: {0}")]
    NotManifold(String),
    #[error("face {face} lies in {count} generators, expected 2")]
    InteriorFaceDegree { face: Simplex, count: usize },
    #[error("no residual generator shares a face with the link")]
    NoAdjacentGenerator,
    #[error("step {step} broke the link recursion identity")]
    StepIdentity { step: usize },
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Recognition(#[from] RecognitionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepCase {
    /// The opposite vertex was not on the link.
    Extend,
    /// The opposite vertex was on the link and had to be split off.
    Split,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationState {
    pub complex: Complex,
    pub apex: VertexId,
    /// All identifications made so far, including vertices that have since
    /// left the link.
    pub eq: RegularEquivalence,
    pub trace: MoveSequence,
    pub step_index: usize,
    pub last_case: Option<StepCase>,
}

impl NormalizationState {
    pub fn link(&self) -> Complex {
        self.complex.link(&Simplex::vertex(self.apex))
    }

    pub fn residual(&self) -> Complex {
        self.complex.residual(&Simplex::vertex(self.apex))
    }

    fn fresh(&self, working: &Complex) -> VertexId {
        let top = working
            .max_vertex()
            .into_iter()
            .chain(self.eq.members().into_iter().next_back())
            .max()
            .map_or(0, |v| v.0);
        VertexId(top + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarNormalForm {
    pub apex: VertexId,
    pub sphere: Complex,
    pub eq: RegularEquivalence,
    pub pairing: GeneratorPairing,
    pub trace: MoveSequence,
    pub steps: usize,
    /// Set when manifoldness of the input could only be reported as unknown.
    pub manifold_unverified: bool,
}

impl StarNormalForm {
    /// The unidentified cone `a⋆S`.
    pub fn cone(&self) -> Complex {
        self.sphere.cone(self.apex).expect("apex is not a vertex of the sphere")
    }
}

/// Builds `N₀ = (g a)M` for the least generator `g` and the next free label `a`.
pub fn start(m: &Complex) -> Result<NormalizationState, NormalizeError> {
    let g = m.generators().next().ok_or(NormalizeError::Empty)?.clone();
    let apex = crate::moves::fresh_vertex(m);
    let complex = subdivide(m, &g, apex)?;
    Ok(NormalizationState {
        complex,
        apex,
        eq: RegularEquivalence::identity(),
        trace: vec![MoveRecord::Subdivide { simplex: g, vertex: apex }].into(),
        step_index: 0,
        last_case: None,
    })
}

/// Absorbs the lexicographically least residual generator adjacent to the link.
pub fn normalize_step(state: &NormalizationState) -> Result<NormalizationState, NormalizeError> {
    let apex = state.apex;
    let link = state.link();
    let residual = state.residual();
    let eq = &state.eq;

    let mut copies: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
    for s in link.generators() {
        if let Some(image) = eq.project_simplex(s) {
            copies.entry(image).or_default().push(s.clone());
        }
    }
    let (p, face, on_link) = residual
        .generators()
        .find_map(|p| {
            p.facets()
                .into_iter()
                .find_map(|f| copies.get(&f).map(|c| (p.clone(), f, c.clone())))
        })
        .ok_or(NormalizeError::NoAdjacentGenerator)?;

    let degree = on_link.len() + residual.generators().filter(|g| face.is_face_of(g)).count();
    if degree != 2 {
        return Err(NormalizeError::InteriorFaceDegree { face, count: degree });
    }
    let shared = on_link[0].clone();
    let w = p.difference(&face).vertices()[0];
    let w_on_link = link.vertices().iter().any(|&v| eq.class_of(v) == w);

    let mut trace = state.trace.clone();
    let mut eq = eq.clone();
    let mut working = state.complex.clone();
    let mut current = p.clone();

    // rename the shared face inside p to the labels it carries on the link
    for &u in shared.vertices() {
        let original = eq.class_of(u);
        if original != u {
            working = split_vertex(&working, &current, original, u)?;
            trace.push(MoveRecord::SplitVertex { generator: current.clone(), old: original, fresh: u });
            current = current.without_vertex(original).with_vertex(u).map_err(MoveError::from)?;
        }
    }

    let (opposite, case) = if w_on_link {
        let d = state.fresh(&working);
        working = split_vertex(&working, &current, w, d)?;
        trace.push(MoveRecord::SplitVertex { generator: current.clone(), old: w, fresh: d });
        current = current.without_vertex(w).with_vertex(d).map_err(MoveError::from)?;
        eq.union(w, d);
        (d, StepCase::Split)
    } else {
        (w, StepCase::Extend)
    };

    let b = state.fresh(&working);
    working = subdivide(&working, &shared, b)?;
    trace.push(MoveRecord::Subdivide { simplex: shared.clone(), vertex: b });
    let edge = Simplex::new([apex, opposite]).map_err(MoveError::from)?;
    working = weld(&working, &edge, b)?;
    trace.push(MoveRecord::Weld { simplex: edge, vertex: b });

    // N_{k+1} = a⋆(lk + ∂p) + Q∖p, with p written in link labels
    let mut rest = residual.clone();
    rest.toggle(p);
    let expected = (&link + &current.boundary()).cone(apex).map_err(MoveError::from)? + rest;
    if working != expected {
        return Err(NormalizeError::StepIdentity { step: state.step_index + 1 });
    }

    Ok(NormalizationState {
        complex: working,
        apex,
        eq,
        trace,
        step_index: state.step_index + 1,
        last_case: Some(case),
    })
}

/// Runs the whole normalization.
pub fn normalize(m: &Complex) -> Result<StarNormalForm, NormalizeError> {
    if m.is_empty() {
        return Err(NormalizeError::Empty);
    }
    if !m.is_uniform() {
        return Err(NormalizeError::NotUniform);
    }
    let n = m.dimension();
    if n < 2 {
        return Err(NormalizeError::UnsupportedDimension(n));
    }
    let parts = m.connected_components().len();
    if parts > 1 {
        return Err(NormalizeError::NotConnected(m.len() - m.connected_components()[0].len()));
    }
    let report = is_stellar_manifold(m, DEFAULT_BUDGET, 0)?;
    let manifold_unverified = match report.verdict.outcome {
        crate::complex::Outcome::Yes => false,
        crate::complex::Outcome::No => {
            return Err(NormalizeError::NotManifold(report.verdict.witness.unwrap_or_default()))
        }
        crate::complex::Outcome::Unknown => true,
    };

    let mut state = start(m)?;
    loop {
        match normalize_step(&state) {
            Ok(next) => state = next,
            Err(NormalizeError::NoAdjacentGenerator) => break,
            Err(e) => return Err(e),
        }
    }
    let left = state.residual().len();
    if left > 0 {
        return Err(NormalizeError::NotConnected(left));
    }
    let sphere = state.link();
    let eq = state.eq.restrict(&sphere.vertices());
    let pairing = derive_pairing(&sphere, &eq)?;
    Ok(StarNormalForm {
        apex: state.apex,
        sphere,
        eq,
        pairing,
        trace: state.trace,
        steps: state.step_index,
        manifold_unverified,
    })
}

/// Maps every vertex introduced by a split back to the input vertex it copies.
pub fn trace_projection(trace: &MoveSequence) -> BTreeMap<VertexId, VertexId> {
    let mut origin: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for m in trace.iter() {
        if let MoveRecord::SplitVertex { old, fresh, .. } = m {
            let root = origin.get(old).copied().unwrap_or(*old);
            origin.insert(*fresh, root);
        }
    }
    origin
}

/// Checks a normal form against the complex it was computed from.
pub fn verify_normal_form(nf: &StarNormalForm, original: &Complex) -> Verdict {
    let apex = Simplex::vertex(nf.apex);
    if nf.sphere.vertices().contains(&nf.apex) {
        return Verdict::no("apex lies on the sphere");
    }
    if !nf.sphere.is_uniform() || nf.sphere.dimension() + 1 != original.dimension() {
        return Verdict::no("sphere is not a uniform complex of one dimension lower than the input");
    }
    match apply_sequence(original, &nf.trace) {
        Ok(end) => {
            if !end.residual(&apex).is_empty() {
                return Verdict::no("replayed trace leaves generators away from the apex");
            }
            if end.link(&apex) != nf.sphere {
                return Verdict::no("replayed trace does not end at the recorded sphere");
            }
        }
        Err(e) => return Verdict::no(format!("trace does not replay: {e}")),
    }
    match validate_regular(&nf.sphere, &nf.eq) {
        Ok(v) if v.is_yes() => {}
        Ok(v) => return Verdict::no(format!("equivalence is not regular: {}", v.witness.unwrap_or_default())),
        Err(e) => return Verdict::no(e.to_string()),
    }
    match derive_pairing(&nf.sphere, &nf.eq) {
        Ok(p) if p == nf.pairing => {}
        Ok(_) => return Verdict::no("recorded pairing differs from the pairing induced by the equivalence"),
        Err(e) => return Verdict::no(e.to_string()),
    }

    let origin = trace_projection(&nf.trace);
    let project = |s: &Simplex| s.map_vertices(|v| origin.get(&v).copied().unwrap_or(v));
    for (g, p) in &nf.pairing.pairs {
        if project(g).ok() != project(p).ok() {
            return Verdict::no(format!("paired generators {g} and {p} are different input faces"));
        }
    }
    if original.is_closed() {
        if !nf.pairing.unpaired.is_empty() {
            return Verdict::no(format!(
                "closed input but {} generators of the sphere are unpaired",
                nf.pairing.unpaired.len()
            ));
        }
    } else {
        let mut image = Complex::new();
        for g in &nf.pairing.unpaired {
            match project(g) {
                Ok(s) => {
                    image.toggle(s);
                }
                Err(e) => return Verdict::no(e.to_string()),
            }
        }
        let boundary = original.boundary();
        if image.len() != nf.pairing.unpaired.len() || image != boundary {
            return Verdict::no(format!(
                "{} unpaired generators do not match the {} boundary faces of the input",
                nf.pairing.unpaired.len(),
                boundary.len()
            ));
        }
    }
    match recognize_ball_or_sphere(&nf.sphere, DEFAULT_BUDGET, 0) {
        Ok(r) if r.verdict == Shape::Sphere => Verdict::yes(),
        Ok(r) if r.verdict == Shape::Unknown => Verdict::unknown(r.diagnostics),
        Ok(r) => Verdict::no(format!("link of the apex is not a sphere: {}", r.diagnostics)),
        Err(e) => Verdict::no(e.to_string()),
    }
}

/// The vertices of `nf.sphere` grouped by the input vertex they copy.
pub fn sphere_classes(nf: &StarNormalForm) -> BTreeMap<VertexId, BTreeSet<VertexId>> {
    let mut out: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for v in nf.sphere.vertices() {
        out.entry(nf.eq.class_of(v)).or_default().insert(v);
    }
    out
}
