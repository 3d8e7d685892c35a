//! Ball and sphere recognition, and the vertex-link manifold test.
//!
//! Dimensions up to two use exact combinatorial characterizations. Above
//! that a seeded, budgeted search over welds and subdivisions looks for a
//! reduction to a simplex or a simplex boundary, and reports `Unknown` when
//! the budget runs out.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{Complex, Simplex, Verdict, VertexId};
use crate::moves::{find_weld, fresh_vertex, subdivide, weld, MoveRecord, MoveSequence};

pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecognitionError {
    #[error("complex is not uniform")]
    NotUniform,
    #[error("complex is empty")]
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Ball,
    Sphere,
    Neither,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecognitionResult {
    pub verdict: Shape,
    /// Moves reducing the input to a simplex (ball) or a simplex boundary (sphere).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<MoveSequence>,
    pub diagnostics: String,
}

impl RecognitionResult {
    fn exact(verdict: Shape, diagnostics: impl Into<String>) -> Self {
        RecognitionResult { verdict, certificate: None, diagnostics: diagnostics.into() }
    }

    fn certified(verdict: Shape, certificate: MoveSequence, diagnostics: impl Into<String>) -> Self {
        RecognitionResult { verdict, certificate: Some(certificate), diagnostics: diagnostics.into() }
    }

    pub fn is_ball_or_sphere(&self) -> bool {
        matches!(self.verdict, Shape::Ball | Shape::Sphere)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifoldReport {
    pub verdict: Verdict,
    pub per_vertex: BTreeMap<VertexId, RecognitionResult>,
}

/// A single generator.
pub fn is_simplex(k: &Complex) -> bool {
    k.len() == 1
}

/// The boundary of an (n+1)-simplex: n+2 generators of dimension n on n+2 vertices.
pub fn is_simplex_boundary(k: &Complex) -> bool {
    let n = k.dimension();
    n >= 0 && k.is_uniform() && k.len() == (n + 2) as usize && k.vertices().len() == (n + 2) as usize
}

pub fn recognize_ball_or_sphere(k: &Complex, budget: usize, seed: u64) -> Result<RecognitionResult, RecognitionError> {
    if k.is_empty() {
        return Err(RecognitionError::Empty);
    }
    if !k.is_uniform() {
        return Err(RecognitionError::NotUniform);
    }
    if is_simplex(k) {
        return Ok(RecognitionResult::certified(Shape::Ball, MoveSequence::new(), "single simplex"));
    }
    if is_simplex_boundary(k) {
        return Ok(RecognitionResult::certified(Shape::Sphere, MoveSequence::new(), "boundary of a simplex"));
    }
    Ok(match k.dimension() {
        0 => RecognitionResult::exact(Shape::Neither, format!("{} isolated points", k.len())),
        1 => recognize_graph(k),
        2 => recognize_surface(k),
        _ => recognize_by_search(k, budget, seed),
    })
}

fn recognize_graph(k: &Complex) -> RecognitionResult {
    if !k.is_connected() {
        return RecognitionResult::exact(Shape::Neither, "graph is disconnected");
    }
    let mut ends = 0;
    for v in k.vertices() {
        match k.link(&Simplex::vertex(v)).len() {
            1 => ends += 1,
            2 => {}
            d => return RecognitionResult::exact(Shape::Neither, format!("vertex {v} has degree {d}")),
        }
    }
    match ends {
        0 => RecognitionResult::exact(Shape::Sphere, "cycle"),
        2 => RecognitionResult::exact(Shape::Ball, "path"),
        _ => RecognitionResult::exact(Shape::Neither, format!("{ends} endpoints")),
    }
}

fn recognize_surface(k: &Complex) -> RecognitionResult {
    if !k.is_connected() {
        return RecognitionResult::exact(Shape::Neither, "surface is disconnected");
    }
    for v in k.vertices() {
        let link = k.link(&Simplex::vertex(v));
        if !recognize_graph(&link).is_ball_or_sphere() {
            return RecognitionResult::exact(Shape::Neither, format!("link of vertex {v} is {link}, neither a path nor a cycle"));
        }
    }
    let chi = k.euler_characteristic();
    let boundary = k.boundary();
    if boundary.is_empty() {
        if chi == 2 {
            RecognitionResult::exact(Shape::Sphere, "closed surface with Euler characteristic 2")
        } else {
            RecognitionResult::exact(Shape::Neither, format!("closed surface with Euler characteristic {chi}"))
        }
    } else if chi == 1 && recognize_graph(&boundary).verdict == Shape::Sphere {
        RecognitionResult::exact(Shape::Ball, "surface with one boundary cycle and Euler characteristic 1")
    } else {
        RecognitionResult::exact(
            Shape::Neither,
            format!("bounded surface with Euler characteristic {chi} and {} boundary components", boundary.connected_components().len()),
        )
    }
}

fn recognize_by_search(k: &Complex, budget: usize, seed: u64) -> RecognitionResult {
    let n = k.dimension();
    if !k.is_connected() {
        return RecognitionResult::exact(Shape::Neither, "complex is disconnected");
    }
    // every codimension-3 face must have a 2-ball or 2-sphere link
    let faces = k.faces_by_dimension();
    if let Some(faces) = faces.get(&((n - 3) as usize)) {
        for f in faces {
            let link = k.link(f);
            if !recognize_surface(&link).is_ball_or_sphere() {
                return RecognitionResult::exact(Shape::Neither, format!("link of {f} is not a 2-ball or 2-sphere"));
            }
        }
    }
    let chi = k.euler_characteristic();
    let closed = k.is_closed();
    let target = if closed { Shape::Sphere } else { Shape::Ball };
    let expected = if closed { 1 + if n % 2 == 0 { 1 } else { -1 } } else { 1 };
    if chi != expected {
        return RecognitionResult::exact(Shape::Neither, format!("Euler characteristic {chi}, expected {expected}"));
    }
    match search(k, target, budget, seed) {
        Some(cert) => {
            let len = cert.len();
            RecognitionResult::certified(target, cert, format!("reduced in {len} moves"))
        }
        None => RecognitionResult::exact(Shape::Unknown, format!("no reduction found within {budget} moves")),
    }
}

fn reached(k: &Complex, target: Shape) -> bool {
    match target {
        Shape::Ball => is_simplex(k),
        Shape::Sphere => is_simplex_boundary(k),
        _ => false,
    }
}

/// Greedy welding with random subdivisions to escape stalls, restarting
/// from the input when progress stops. Deterministic for a given seed.
fn search(k: &Complex, target: Shape, budget: usize, seed: u64) -> Option<MoveSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stall_limit = 4 * (k.dimension() as usize + 2);
    let mut spent = 0;
    let mut restart = 0;
    while spent < budget {
        let mut current = k.clone();
        let mut trace = MoveSequence::new();
        let mut best = current.vertices().len();
        let mut since_best = 0;
        let mut last_fresh: Option<VertexId> = None;
        loop {
            if reached(&current, target) {
                return Some(trace);
            }
            if spent >= budget {
                return None;
            }
            let mut order: Vec<VertexId> = current.vertices().into_iter().collect();
            if restart > 0 {
                order.shuffle(&mut rng);
            }
            let found = order
                .into_iter()
                .filter(|&v| Some(v) != last_fresh)
                .find_map(|v| find_weld(&current, v).map(|a| (v, a)));
            spent += 1;
            if let Some((v, a)) = found {
                current = weld(&current, &a, v).expect("find_weld returned an applicable weld");
                trace.push(MoveRecord::Weld { simplex: a, vertex: v });
                last_fresh = None;
                let count = current.vertices().len();
                if count < best {
                    best = count;
                    since_best = 0;
                }
                continue;
            }
            since_best += 1;
            if since_best > stall_limit {
                break;
            }
            let gens: Vec<&Simplex> = current.generators().collect();
            let g = gens[rng.random_range(0..gens.len())];
            let i = rng.random_range(0..g.len());
            let mut j = rng.random_range(0..g.len() - 1);
            if j >= i {
                j += 1;
            }
            let edge = Simplex::new([g.vertices()[i], g.vertices()[j]]).expect("distinct vertices");
            let fresh = fresh_vertex(&current);
            current = subdivide(&current, &edge, fresh).expect("edge of a generator");
            trace.push(MoveRecord::Subdivide { simplex: edge, vertex: fresh });
            last_fresh = Some(fresh);
        }
        restart += 1;
    }
    None
}

/// Recognizes every vertex link. Link searches are seeded with `seed + vertex`.
pub fn is_stellar_manifold(k: &Complex, budget: usize, seed: u64) -> Result<ManifoldReport, RecognitionError> {
    if !k.is_uniform() {
        return Err(RecognitionError::NotUniform);
    }
    let mut per_vertex = BTreeMap::new();
    for v in k.vertices() {
        let link = k.link(&Simplex::vertex(v));
        per_vertex.insert(v, recognize_ball_or_sphere(&link, budget, seed.wrapping_add(v.0 as u64))?);
    }
    let bad: Vec<VertexId> = per_vertex.iter().filter(|(_, r)| r.verdict == Shape::Neither).map(|(v, _)| *v).collect();
    let unknown: Vec<VertexId> = per_vertex.iter().filter(|(_, r)| r.verdict == Shape::Unknown).map(|(v, _)| *v).collect();
    let verdict = if let Some(v) = bad.first() {
        Verdict::no(format!("link of vertex {v} is neither a ball nor a sphere: {}", per_vertex[v].diagnostics))
    } else if !unknown.is_empty() {
        Verdict::unknown(format!("links of vertices {unknown:?} could not be recognized within the budget"))
    } else {
        Verdict::yes()
    };
    Ok(ManifoldReport { verdict, per_vertex })
}
