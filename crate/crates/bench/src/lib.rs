//! Inputs shared by the benchmarks in `benches/`.

use stellar_core::{fixtures, moves, Complex, Simplex};

/// `sphere-k` after `rounds` subdivisions of its least generator.
pub fn subdivided_sphere(k: u32, rounds: usize) -> Complex {
    let mut s = fixtures::sphere(k);
    for _ in 0..rounds {
        let g: Simplex = s.generators().next().expect("nonempty").clone();
        s = moves::subdivide(&s, &g, moves::fresh_vertex(&s)).expect("generator is a face");
    }
    s
}
