use std::collections::BTreeMap;

use spantree_hfk::diagram::{parse_pd, EdgeOrientation};
use spantree_hfk::pipeline::{run, MarkingChoice, RunConfig};

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const TREFOIL_KINK: &str = "X[1,4,2,5] X[3,8,4,1] X[5,2,6,3] X[6,7,7,8]";
const FIGURE_EIGHT: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
const UNKNOTS: [&str; 4] =
    ["X[1,1,2,2]", "X[2,1,1,2]", "X[2,2,3,1] X[4,3,1,4]", "X[2,2,3,1] X[5,1,6,6] X[3,4,4,5]"];

fn ranks(pd: &str, cfg: &RunConfig) -> BTreeMap<i64, usize> {
    let d = parse_pd(pd).unwrap();
    let r = run(&d, cfg).unwrap_or_else(|e| panic!("{pd}: {e}"));
    assert!(r.passed(), "{pd}: {:?}", r.checks);
    r.ranks.0
}

fn geometric(base: i64, scale: i64, n: usize) -> Vec<i64> {
    (0..n as u32).map(|j| scale * base.pow(j)).collect()
}

#[test]
fn diagrams_of_the_same_knot() {
    let unknot = ranks(UNKNOTS[0], &RunConfig::default());
    assert_eq!(unknot, BTreeMap::from([(0, 1)]));
    for pd in &UNKNOTS[1..] {
        assert_eq!(ranks(pd, &RunConfig::default()), unknot, "{pd}");
    }
    assert_eq!(ranks(TREFOIL, &RunConfig::default()), ranks(TREFOIL_KINK, &RunConfig::default()));
    let other_figure_eight = "X[8,5,1,6] X[4,1,5,2] X[2,8,3,7] X[6,4,7,3]";
    assert_eq!(ranks(FIGURE_EIGHT, &RunConfig::default()), ranks(other_figure_eight, &RunConfig::default()));
}

#[test]
fn marking_density() {
    for pd in [UNKNOTS[2], TREFOIL, FIGURE_EIGHT] {
        let auto = ranks(pd, &RunConfig::default());
        let doubled = ranks(pd, &RunConfig { marking: MarkingChoice::Uniform(2), ..Default::default() });
        assert_eq!(auto, doubled, "{pd}");
    }
}

#[test]
fn generic_weights() {
    for pd in [UNKNOTS[3], TREFOIL, TREFOIL_KINK, FIGURE_EIGHT] {
        let n = parse_pd(pd).unwrap().n();
        let base = ranks(pd, &RunConfig::default());
        for omega in [geometric(4, 3, n), geometric(2, -1, n), geometric(3, 1, n).into_iter().rev().collect()] {
            let cfg = RunConfig { omega: Some(omega.clone()), ..Default::default() };
            assert_eq!(ranks(pd, &cfg), base, "{pd} with {omega:?}");
        }
    }
}

#[test]
fn edge_orientation_convention() {
    for pd in [UNKNOTS[2], TREFOIL, TREFOIL_KINK, FIGURE_EIGHT] {
        let a = ranks(pd, &RunConfig { orientation: EdgeOrientation::SmallerTail, ..Default::default() });
        let b = ranks(pd, &RunConfig { orientation: EdgeOrientation::LargerTail, ..Default::default() });
        assert_eq!(a, b, "{pd}");
    }
}

#[test]
fn choice_of_unbounded_face() {
    for pd in [TREFOIL, TREFOIL_KINK, FIGURE_EIGHT] {
        let n = parse_pd(pd).unwrap().n();
        let base = ranks(pd, &RunConfig::default());
        for f in 0..n + 2 {
            assert_eq!(ranks(pd, &RunConfig { outer_face: Some(f), ..Default::default() }), base, "{pd} face {f}");
        }
    }
}

#[test]
fn relabeled_pd_code() {
    // crossings listed in another order, then arcs renamed i -> i + 1 mod 6
    let base = ranks(TREFOIL, &RunConfig::default());
    assert_eq!(ranks("X[3,6,4,1] X[5,2,6,3] X[1,4,2,5]", &RunConfig::default()), base);
    assert_eq!(ranks("X[2,5,3,6] X[4,1,5,2] X[6,3,1,4]", &RunConfig::default()), base);
}
