//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spantree_hfk::complex::{check_nu_law, check_well_defined, d_squared_failures};
use spantree_hfk::diagram::{black_graph, faces_and_coloring, parse_pd, EdgeOrientation};
use spantree_hfk::exactfield::{BinPoly, RationalFn};
use spantree_hfk::homology::{graded_homology, rank_dense, rank_sparse_of_dense};
use spantree_hfk::pipeline::{prepare_complex, run, MarkingChoice, Report, RunConfig};
use spantree_hfk::resolutions::matrix_tree_count;

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const TREFOIL_KINK: &str = "X[1,4,2,5] X[3,8,4,1] X[5,2,6,3] X[6,7,7,8]";
const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
const UNKNOT_1: &str = "X[1,1,2,2]";
const UNKNOT_2: &str = "X[2,2,3,1] X[4,3,1,4]";
const UNKNOT_3: &str = "X[2,2,3,1] X[5,1,6,6] X[3,4,4,5]";
const UNLINK_2: &str = "X[2,4,1,3] X[1,4,2,3]";
/// 5_1 with two crossings changed: an unknot diagram with m = 10.
const UNKNOT_5: &str = "X[5,1,6,10] X[1,7,2,6] X[2,7,3,8] X[8,3,9,4] X[4,9,5,10]";
/// 5_2 with two crossings changed: three nonzero chain groups.
const THREE_GRADINGS: &str = "X[10,5,1,6] X[1,7,2,6] X[9,3,10,2] X[8,3,9,4] X[7,5,8,4]";

/// Reduced alternating diagrams and their knot determinants.
const ALTERNATING: [(&str, &str, usize); 5] = [
    ("3_1", TREFOIL, 3),
    ("4_1", FIGURE_EIGHT, 5),
    ("5_1", "X[10,5,1,6] X[6,1,7,2] X[2,7,3,8] X[8,3,9,4] X[4,9,5,10]", 5),
    ("5_2", "X[5,1,6,10] X[1,7,2,6] X[9,3,10,2] X[3,9,4,8] X[7,5,8,4]", 7),
    ("6_1", "X[7,12,8,1] X[1,6,2,7] X[11,3,12,2] X[3,11,4,10] X[9,5,10,4] X[5,9,6,8]", 9),
];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn report(pd: &str, cfg: &RunConfig) -> Result<Report, String> {
    let d = parse_pd(pd).map_err(|e| format!("{pd}: {e}"))?;
    run(&d, cfg).map_err(|e| format!("{pd}: {e}"))
}

fn ranks(pd: &str, cfg: &RunConfig) -> Result<BTreeMap<i64, usize>, String> {
    Ok(report(pd, cfg)?.ranks.0)
}

fn single_grading(r: &Report) -> Option<i64> {
    (r.ranks.0.len() == 1).then(|| *r.ranks.0.keys().next().expect("one grading"))
}

fn trefoil() -> Outcome {
    let cfg = RunConfig::default();
    let r = report(TREFOIL, &cfg)?;
    let m = report(TREFOIL, &RunConfig { mirror: true, ..Default::default() })?;
    ensure(r.total_rank == 3, || format!("total rank {}", r.total_rank))?;
    let g = single_grading(&r).ok_or_else(|| format!("gradings {:?}", r.ranks.0))?;
    ensure(g.abs() == 2, || format!("grading {g}/2"))?;
    ensure(m.ranks.0 == BTreeMap::from([(-g, 3)]), || format!("mirror gives {:?}", m.ranks.0))?;
    Ok(format!("rank 3 at δ = {}, mirror at δ = {}", g / 2, -g / 2))
}

fn figure_eight() -> Outcome {
    let r = report(FIGURE_EIGHT, &RunConfig::default())?;
    ensure(r.ranks.0 == BTreeMap::from([(0, 5)]), || format!("ranks {:?}", r.ranks.0))?;
    Ok("rank 5 at δ = 0".into())
}

fn unknots_and_unlink() -> Outcome {
    let cfg = RunConfig::default();
    let first = ranks(UNKNOT_1, &cfg)?;
    ensure(first.len() == 1 && first.values().sum::<usize>() == 1, || format!("1-crossing unknot {first:?}"))?;
    for pd in [UNKNOT_2, UNKNOT_3] {
        let r = ranks(pd, &cfg)?;
        ensure(r == first, || format!("{pd}: {r:?} vs {first:?}"))?;
    }
    let u = report(UNLINK_2, &cfg)?;
    ensure(u.diagram.components == 2, || "unlink diagram is not two components".into())?;
    ensure(u.total_rank == 2 && u.width == Some(2), || format!("unlink {:?}, width {:?}", u.ranks.0, u.width))?;
    Ok("unknots 1/2/3 crossings agree at rank 1; 2-unlink rank 2, width 2".into())
}

fn alternating() -> Outcome {
    let mut parts = Vec::new();
    for (name, pd, det) in ALTERNATING {
        let d = parse_pd(pd).map_err(|e| e.to_string())?;
        let p = prepare_complex(&d, &RunConfig::default()).map_err(|e| e.to_string())?;
        let cx = &p.complex;
        ensure(cx.pairs.is_empty(), || format!("{name}: {} successor pairs", cx.pairs.len()))?;
        let gr = graded_homology(cx).map_err(|e| e.to_string())?;
        let s = cx.trees.len();
        ensure(gr.total() == s << (cx.m - 1), || format!("{name}: rank {} vs s·2^(m-1) = {}", gr.total(), s << (cx.m - 1)))?;
        let col = faces_and_coloring(&d, None).map_err(|e| e.to_string())?;
        let bg = black_graph(&d, &col).map_err(|e| e.to_string())?;
        let mt = matrix_tree_count(&bg);
        ensure(mt == s as i128 && s == det, || format!("{name}: trees {s}, matrix-tree {mt}, determinant {det}"))?;
        ensure(cx.chain_dims().len() == 1, || format!("{name}: generators in {} gradings", cx.chain_dims().len()))?;
        parts.push(format!("{name} s={s}"));
    }
    Ok(parts.join(", "))
}

fn structural_checks() -> Outcome {
    let corpus = [
        TREFOIL,
        FIGURE_EIGHT,
        UNKNOT_1,
        UNKNOT_2,
        UNKNOT_3,
        UNLINK_2,
        TREFOIL_KINK,
        THREE_GRADINGS,
        UNKNOT_5,
    ];
    let mut pairs = 0;
    for pd in corpus {
        let d = parse_pd(pd).map_err(|e| e.to_string())?;
        let cx = prepare_complex(&d, &RunConfig::default()).map_err(|e| format!("{pd}: {e}"))?.complex;
        let bad = d_squared_failures(&cx);
        ensure(bad.is_empty(), || format!("{pd}: ∂² ≠ 0 from/to trees {bad:?}"))?;
        ensure(check_well_defined(&cx), || format!("{pd}: relation not annihilated"))?;
        ensure(check_nu_law(&cx), || format!("{pd}: ν law fails"))?;
        pairs += cx.pairs.len();
    }
    Ok(format!("{} diagrams, {pairs} successor pairs", corpus.len()))
}

fn invariance() -> Outcome {
    let default = RunConfig::default();
    for (pd, other) in [(UNKNOT_1, UNKNOT_3), (TREFOIL, TREFOIL_KINK)] {
        let base = ranks(pd, &default)?;
        let n = parse_pd(pd).map_err(|e| e.to_string())?.n();
        let variants = [
            ("other diagram", other, default.clone()),
            ("m = 2·#arcs", pd, RunConfig { marking: MarkingChoice::Uniform(2), ..Default::default() }),
            ("Ω = 3·4^j", pd, RunConfig { omega: Some((0..n as u32).map(|j| 3 * 4i64.pow(j)).collect()), ..Default::default() }),
            ("larger-tail edges", pd, RunConfig { orientation: EdgeOrientation::LargerTail, ..Default::default() }),
        ];
        for (what, q, cfg) in variants {
            let r = ranks(q, &cfg)?;
            ensure(r == base, || format!("{pd}, {what}: {r:?} vs {base:?}"))?;
        }
    }
    Ok("unknot and trefoil: diagram, marking, Ω, orientation".into())
}

/// Numerator and denominator of degree below `max_deg`.
fn random_frac(rng: &mut ChaCha8Rng, max_deg: u32) -> RationalFn {
    let poly = |rng: &mut ChaCha8Rng| BinPoly::from_words(&[rng.gen::<u64>() >> rng.gen_range(64 - max_deg..64)]);
    let den = loop {
        let d = poly(rng);
        if !d.is_zero() {
            break d;
        }
    };
    RationalFn::new(poly(rng), den).expect("nonzero denominator").mul_tpow(rng.gen_range(-20..20))
}

fn field_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..10_000 {
        let (a, b, c) = (random_frac(&mut rng, 64), random_frac(&mut rng, 64), random_frac(&mut rng, 64));
        let ok = &a + &b == &b + &a
            && &a * &b == &b * &a
            && &(&a + &b) + &c == &a + &(&b + &c)
            && &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && (&a + &a).is_zero()
            && (&a * &RationalFn::one()) == a
            && (a.is_zero() || (&a * &a.inv().expect("nonzero")).is_one());
        ensure(ok, || format!("axiom failure at sample {i}: a={a}, b={b}, c={c}"))?;
    }
    let mut deficient = 0;
    for i in 0..100 {
        // product of 10×k and k×10 factors, so ranks vary
        let k = rng.gen_range(1..=10);
        let left: Vec<Vec<RationalFn>> = (0..10).map(|_| (0..k).map(|_| random_frac(&mut rng, 16)).collect()).collect();
        let right: Vec<Vec<RationalFn>> = (0..k).map(|_| (0..10).map(|_| random_frac(&mut rng, 16)).collect()).collect();
        let a: Vec<Vec<RationalFn>> = (0..10)
            .map(|r| {
                (0..10)
                    .map(|c| (0..k).fold(RationalFn::zero(), |acc, t| acc + &left[r][t] * &right[t][c]))
                    .collect()
            })
            .collect();
        let plain = rank_dense(a.clone());
        let ff = rank_sparse_of_dense(&a);
        ensure(plain == ff, || format!("matrix {i}: plain {plain}, fraction-free {ff}"))?;
        deficient += usize::from(plain < 10);
    }
    Ok(format!("10^4 axiom samples, 100 rank comparisons ({deficient} rank-deficient)"))
}

fn peak_rss_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

fn scale() -> Outcome {
    let r = report(UNKNOT_5, &RunConfig::default())?;
    ensure(r.diagram.n == 5 && r.diagram.m == 10, || format!("n = {}, m = {}", r.diagram.n, r.diagram.m))?;
    ensure(r.passed(), || format!("checks {:?}", r.checks))?;
    ensure(r.total_rank == 1, || format!("unknot rank {}", r.total_rank))?;
    let dims: usize = r.chain_dims.0.values().sum();
    match peak_rss_mb() {
        Some(mb) => {
            ensure(mb < 2048.0, || format!("peak memory {mb:.0} MB"))?;
            Ok(format!("n = 5, m = 10, {dims} generators, peak RSS {mb:.0} MB"))
        }
        None => Err("peak memory not measurable on this platform".into()),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("trefoil detection", trefoil, Duration::from_secs(1)),
        ("figure-eight", figure_eight, Duration::from_secs(5)),
        ("unknot and unlink", unknots_and_unlink, Duration::from_secs(5)),
        ("alternating determinant law", alternating, Duration::from_secs(60)),
        ("d squared, well-definedness, nu law", structural_checks, Duration::from_secs(120)),
        ("invariance", invariance, Duration::from_secs(120)),
        ("exact field properties", field_suite, Duration::from_secs(30)),
        ("scale", scale, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let elapsed = t.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed < limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {:.2} s, limit {} s", elapsed.as_secs_f64(), limit.as_secs()))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS {} {name} ({:.2} s): {msg}", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name} ({:.2} s): {msg}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
