//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stellar_core::complex::{Complex, Outcome, Simplex, VertexId};
use stellar_core::quotient::{self, RegularEquivalence};
use stellar_core::recognition::{self, Shape};
use stellar_core::{fixtures, moves, normalize, pi1, DEFAULT_BUDGET};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex {
    let n = rng.random_range(1..=8u32);
    let d = rng.random_range(0..=3u32.min(n - 1));
    let density = rng.random_range(0.1..0.7);
    let mut k = Complex::new();
    for mask in 1u32..(1 << n) {
        if mask.count_ones() == d + 1 && rng.random_bool(density) {
            k.toggle(Simplex::new((0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1)).unwrap());
        }
    }
    k
}

fn all_faces(k: &Complex) -> Vec<Simplex> {
    let mut out: Vec<Simplex> = k.faces_by_dimension().into_values().flatten().collect();
    out.push(Simplex::empty());
    out
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..1000 {
        let k = random_complex(&mut rng);
        ensure(k.boundary().boundary().is_empty(), || format!("case {case}: boundary of boundary of {k} is nonzero"))?;
        for a in all_faces(&k) {
            let star = Complex::from_simplex(a.clone()).join(&k.link(&a)).map_err(|e| e.to_string())?;
            ensure(star + k.residual(&a) == k, || format!("case {case}: decomposition fails at {a} in {k}"))?;
        }
    }
    Ok(())
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    while done < 500 {
        let k = random_complex(&mut rng);
        let Some(a) = k.faces_by_dimension().into_values().flatten().choose(&mut rng) else { continue };
        let fresh = VertexId(k.max_vertex().map_or(1, |v| v.0 + 1) + rng.random_range(0..3));
        let s = moves::subdivide(&k, &a, fresh).map_err(|e| e.to_string())?;
        let back = moves::weld(&s, &a, fresh).map_err(|e| format!("weld of {a} at {fresh} in {s}: {e}"))?;
        ensure(back == k, || format!("round trip of {a} at {fresh} on {k} gave {back}"))?;
        ensure(s.is_closed() == k.is_closed(), || format!("closedness changed on {k}"))?;
        ensure(s.euler_characteristic() == k.euler_characteristic(), || format!("euler characteristic changed on {k}"))?;
        ensure(
            s.connected_components().len() == k.connected_components().len(),
            || format!("component count changed on {k}"),
        )?;
        done += 1;
    }
    Ok(())
}

fn check_normal_form(name: &str, m: &Complex, steps: Option<usize>, perfect: bool, sphere_dim: isize) -> Check {
    let nf = normalize::normalize(m).map_err(|e| format!("{name}: {e}"))?;
    if let Some(steps) = steps {
        ensure(nf.steps == steps, || format!("{name}: {} steps, expected {steps}", nf.steps))?;
    }
    ensure(nf.sphere.dimension() == sphere_dim, || format!("{name}: sphere has dimension {}", nf.sphere.dimension()))?;
    let shape = recognition::recognize_ball_or_sphere(&nf.sphere, DEFAULT_BUDGET, 0).map_err(|e| e.to_string())?;
    ensure(shape.verdict == Shape::Sphere, || format!("{name}: sphere recognized as {:?}", shape.verdict))?;
    let regular = quotient::validate_regular(&nf.sphere, &nf.eq).map_err(|e| e.to_string())?;
    ensure(regular.is_yes(), || format!("{name}: equivalence not regular: {:?}", regular.witness))?;
    if perfect {
        ensure(nf.pairing.is_perfect(), || format!("{name}: unpaired generators {:?}", nf.pairing.unpaired))?;
    } else {
        ensure(nf.pairing.pairs.is_empty(), || format!("{name}: expected no pairs, got {}", nf.pairing.pairs.len()))?;
    }
    let verified = normalize::verify_normal_form(&nf, m);
    ensure(verified.is_yes(), || format!("{name}: verification failed: {:?}", verified.witness))
}

fn criterion_3() -> Check {
    let cases = [
        ("sphere-2", fixtures::sphere(2), 3, 2),
        ("octahedron", fixtures::octahedron(), 7, 2),
        ("torus7", fixtures::torus7(), 13, 0),
        ("rp2-6", fixtures::rp2_6(), 9, 1),
    ];
    for (name, m, steps, chi) in cases {
        check_normal_form(name, &m, Some(steps), true, 1)?;
        let nf = normalize::normalize(&m).map_err(|e| e.to_string())?;
        let q = quotient::quotient_cells(&nf.sphere, &nf.eq).map_err(|e| e.to_string())?;
        let got = q.cone_euler_characteristic();
        ensure(got == chi, || format!("{name}: cone euler characteristic {got}, expected {chi}"))?;
        ensure(got == m.euler_characteristic(), || format!("{name}: cone and manifold disagree"))?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let strip: Complex = [[1, 2, 3], [2, 3, 4]].into_iter().map(Simplex::from).collect();
    check_normal_form("triangle", &fixtures::simplex(2), None, false, 1)?;
    check_normal_form("two triangles", &strip, None, false, 1)
}

fn criterion_5() -> Check {
    check_normal_form("sphere-3", &fixtures::sphere(3), None, true, 2)
}

// Independent homology oracle: ranks of the oriented boundary maps of M,
// exactly over Q by fraction-free elimination and over small prime fields.

const PRIMES: [i64; 5] = [2, 3, 5, 7, 11];

fn rank_rational(m: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            for j in c + 1..cols {
                a[r][j] = (a[rank][c] * a[r][j] - a[r][c] * a[rank][j]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    rank
}

fn rank_mod(m: &[Vec<i64>], p: i64) -> usize {
    let mut a: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let inv = |x: i64| (1..p).find(|y| x * y % p == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, piv);
        let s = inv(a[rank][c]);
        for j in 0..cols {
            a[rank][j] = a[rank][j] * s % p;
        }
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for j in 0..cols {
                    a[r][j] = (a[r][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn boundary_matrix(faces: &BTreeMap<usize, Vec<Simplex>>, d: usize) -> Vec<Vec<i64>> {
    let empty = Vec::new();
    let rows = faces.get(&(d - 1)).unwrap_or(&empty);
    let cols = faces.get(&d).unwrap_or(&empty);
    let index: BTreeMap<&Simplex, usize> = rows.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut m = vec![vec![0i64; cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for (i, &v) in s.vertices().iter().enumerate() {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            m[index[&s.without_vertex(v)]][j] = sign;
        }
    }
    m
}

/// First homology of `m` as (free rank, number of torsion factors divisible by each prime).
fn h1_oracle(m: &Complex) -> (usize, Vec<usize>) {
    let faces: BTreeMap<usize, Vec<Simplex>> =
        m.faces_by_dimension().into_iter().map(|(d, s)| (d, s.into_iter().collect())).collect();
    let edges = faces.get(&1).map_or(0, Vec::len);
    let d1 = boundary_matrix(&faces, 1);
    let d2 = boundary_matrix(&faces, 2);
    let free = edges - rank_rational(&d1) - rank_rational(&d2);
    let torsion = PRIMES.iter().map(|&p| edges - rank_mod(&d1, p) - rank_mod(&d2, p) - free).collect();
    (free, torsion)
}

/// The same data read off a presentation's exponent-sum matrix.
fn presentation_oracle(p: &pi1::GroupPresentation) -> (usize, Vec<usize>) {
    let e = p.exponent_sum_matrix();
    let n = p.generators.len();
    let free = n - rank_rational(&e);
    let torsion = PRIMES.iter().map(|&q| n - rank_mod(&e, q) - free).collect();
    (free, torsion)
}

fn criterion_6() -> Check {
    let cases = [
        ("torus7", fixtures::torus7(), 2, vec![]),
        ("rp2-6", fixtures::rp2_6(), 0, vec![2]),
        ("sphere-3", fixtures::sphere(3), 0, vec![]),
    ];
    for (name, m, free, torsion) in cases {
        let oracle = h1_oracle(&m);
        let nf = normalize::normalize(&m).map_err(|e| format!("{name}: {e}"))?;
        let p = pi1::presentation(&nf).map_err(|e| format!("{name}: {e}"))?;
        let ab = pi1::abelianization(&p);
        ensure(ab.free_rank == free && ab.torsion == torsion, || format!("{name}: abelianization {ab}"))?;
        let from_ab = (ab.free_rank, PRIMES.iter().map(|&q| ab.torsion.iter().filter(|&&t| t % q == 0).count()).collect());
        ensure(from_ab == oracle, || format!("{name}: {ab} disagrees with homology oracle {oracle:?}"))?;
        let from_p = presentation_oracle(&p);
        ensure(from_p == oracle, || format!("{name}: presentation {p} gives {from_p:?}, oracle {oracle:?}"))?;
    }
    Ok(())
}

fn criterion_7() -> Check {
    let closed = [
        ("sphere-2", fixtures::sphere(2)),
        ("sphere-3", fixtures::sphere(3)),
        ("octahedron", fixtures::octahedron()),
        ("torus7", fixtures::torus7()),
        ("rp2-6", fixtures::rp2_6()),
    ];
    for (name, m) in closed {
        for v in m.vertices() {
            let q = m.residual(&Simplex::vertex(v));
            let report = recognition::is_stellar_manifold(&q, DEFAULT_BUDGET, 0).map_err(|e| e.to_string())?;
            ensure(report.verdict.outcome == Outcome::Yes, || {
                format!("{name}: residual of {v} is not a stellar manifold: {:?}", report.verdict.witness)
            })?;
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let edge = Complex::from_simplex(Simplex::from([1, 2]));
    let eq = RegularEquivalence::from_classes([[1, 2]]).map_err(|e| e.to_string())?;
    let v = quotient::validate_regular(&edge, &eq).map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::No && v.witness.as_deref().is_some_and(|w| w.contains("(i)")), || format!("condition (i): {v:?}"))?;

    let square: Complex = [[1, 2], [2, 3], [3, 4], [1, 4]].into_iter().map(Simplex::from).collect();
    let eq = RegularEquivalence::from_classes([[1, 3], [2, 4]]).map_err(|e| e.to_string())?;
    let v = quotient::validate_regular(&square, &eq).map_err(|e| e.to_string())?;
    ensure(v.outcome == Outcome::No && v.witness.as_deref().is_some_and(|w| w.contains("(ii)")), || format!("condition (ii): {v:?}"))?;

    let strip: Complex = [[1, 2, 3], [2, 3, 4]].into_iter().map(Simplex::from).collect();
    let all = [
        ("simplex-2", fixtures::simplex(2)),
        ("simplex-3", fixtures::simplex(3)),
        ("strip", strip),
        ("sphere-2", fixtures::sphere(2)),
        ("sphere-3", fixtures::sphere(3)),
        ("octahedron", fixtures::octahedron()),
        ("torus7", fixtures::torus7()),
        ("rp2-6", fixtures::rp2_6()),
    ];
    for (name, m) in all {
        let nf = normalize::normalize(&m).map_err(|e| format!("{name}: {e}"))?;
        let v = quotient::validate_regular(&nf.sphere, &nf.eq).map_err(|e| e.to_string())?;
        ensure(v.is_yes(), || format!("{name}: emitted equivalence rejected: {:?}", v.witness))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let torus = stellar_cli::run(["stellar", "fixtures", "--name", "torus7"], b"").stdout;
    let a = stellar_cli::run(["stellar", "normalize"], &torus);
    let b = stellar_cli::run(["stellar", "normalize"], &torus);
    ensure(a.code == 0, || a.stderr.clone())?;
    ensure(a.stdout == b.stdout, || "in-process runs differ".into())?;

    let dir = std::env::temp_dir().join(format!("stellar-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let input = dir.join("torus7.json");
    std::fs::write(&input, &torus).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(env!("CARGO_BIN_EXE_stellar"))
            .arg("normalize")
            .arg("--input")
            .arg(&input)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        outputs.push(out.stdout);
    }
    std::fs::remove_dir_all(&dir).ok();
    ensure(outputs[0] == outputs[1], || "binary runs differ".into())?;
    ensure(outputs[0] == a.stdout, || "binary and library output differ".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 9] = [
        ("1 chain algebra on 1000 random complexes", criterion_1, 10),
        ("2 subdivide/weld round trip on 500 triples", criterion_2, 10),
        ("3 normal forms of closed surfaces", criterion_3, 5),
        ("4 normal forms of 2-balls", criterion_4, 1),
        ("5 normal form of the 3-sphere", criterion_5, 5),
        ("6 abelianized fundamental groups against the homology oracle", criterion_6, 2),
        ("7 residuals of closed fixtures are stellar manifolds", criterion_7, 5),
        ("8 regularity checker", criterion_8, 5),
        ("9 deterministic normalize output", criterion_9, 5),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed < Duration::from_secs(limit), || format!("took {elapsed:.2?}, limit {limit} s"))
        });
        match result {
            Ok(()) => println!("PASS criterion {name} ({elapsed:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
