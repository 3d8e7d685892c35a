//! Named example complexes.

use crate::complex::{Complex, Simplex};

/// The standard k-simplex on vertices `1..=k+1`.
pub fn simplex(k: u32) -> Complex {
    Complex::from_simplex(Simplex::new(1..=k + 1).expect("distinct"))
}

/// The boundary of the (k+1)-simplex, a k-sphere on vertices `1..=k+2`.
pub fn sphere(k: u32) -> Complex {
    Simplex::new(1..=k + 2).expect("distinct").boundary()
}

/// Octahedron with antipodal pairs (1 2), (3 4), (5 6).
pub fn octahedron() -> Complex {
    let mut out = Complex::new();
    for a in [1, 2] {
        for b in [3, 4] {
            for c in [5, 6] {
                out.toggle(Simplex::from([a, b, c]));
            }
        }
    }
    out
}

/// The 7-vertex torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
pub fn torus7() -> Complex {
    let mut out = Complex::new();
    for i in 0..7u32 {
        let v = |k: u32| (i + k) % 7 + 1;
        out.toggle(Simplex::from([v(0), v(1), v(3)]));
        out.toggle(Simplex::from([v(0), v(2), v(3)]));
    }
    out
}

/// The 6-vertex projective plane (hemi-icosahedron).
pub fn rp2_6() -> Complex {
    [
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 2, 6],
        [2, 3, 5],
        [3, 4, 6],
        [2, 4, 5],
        [3, 5, 6],
        [2, 4, 6],
    ]
    .into_iter()
    .map(Simplex::from)
    .collect()
}

pub const NAMES: &[&str] = &["simplex-k", "sphere-k", "octahedron", "torus7", "rp2-6"];

/// Looks up a fixture by name; `simplex-k` and `sphere-k` take a numeric suffix.
pub fn by_name(name: &str) -> Option<Complex> {
    match name {
        "octahedron" => Some(octahedron()),
        "torus7" => Some(torus7()),
        "rp2-6" => Some(rp2_6()),
        _ => {
            if let Some(k) = name.strip_prefix("simplex-") {
                k.parse().ok().filter(|&k| k <= 16).map(simplex)
            } else if let Some(k) = name.strip_prefix("sphere-") {
                k.parse().ok().filter(|&k| k <= 16).map(sphere)
            } else {
                None
            }
        }
    }
}
