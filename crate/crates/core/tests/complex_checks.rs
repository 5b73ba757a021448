use spantree_hfk::complex::{build_complex, check_nu_law, check_well_defined, d_squared_failures, ChainComplex};
use spantree_hfk::diagram::parse_pd;
use spantree_hfk::homology::{graded_homology, graded_homology_with, RankStrategy};
use spantree_hfk::pipeline::{prepare_complex, RunConfig};

/// 5_2 with two crossings changed: three gradings, so `∂∘∂` has terms.
const THREE_GRADINGS: &str = "X[10,5,1,6] X[1,7,2,6] X[9,3,10,2] X[8,3,9,4] X[7,5,8,4]";
/// 5_2 with one crossing changed: a single nonzero block, small enough for
/// fraction-free elimination.
const ONE_BLOCK: &str = "X[10,5,1,6] X[1,7,2,6] X[9,3,10,2] X[3,9,4,8] X[7,5,8,4]";

fn complex(pd: &str) -> ChainComplex {
    prepare_complex(&parse_pd(pd).unwrap(), &RunConfig::default()).unwrap().complex
}

#[test]
fn checks_pass_on_genuine_complex() {
    let cx = complex(THREE_GRADINGS);
    assert_eq!(cx.chain_dims().len(), 3);
    assert!(d_squared_failures(&cx).is_empty());
    assert!(check_well_defined(&cx));
    assert!(check_nu_law(&cx));
}

#[test]
fn rescaled_tile_breaks_d_squared() {
    let cx = complex(THREE_GRADINGS);
    let mut detected = 0;
    for k in 0..cx.tiles.len() {
        let mut bad = cx.clone();
        for col in &mut bad.tiles[k].cols {
            for (_, c) in col.iter_mut() {
                *c = c.mul_tpow(1);
            }
        }
        if !d_squared_failures(&bad).is_empty() {
            detected += 1;
        }
    }
    assert!(detected > 0, "no corrupted tile was detected among {}", cx.tiles.len());
}

#[test]
fn flipped_nu_breaks_d_squared() {
    let cx = complex(THREE_GRADINGS);
    let detected = (0..cx.pairs.len()).any(|k| {
        let mut pairs = cx.pairs.clone();
        pairs[k].nu = !pairs[k].nu;
        let bad = build_complex(cx.trees.clone(), pairs, cx.n_minus).unwrap();
        !d_squared_failures(&bad).is_empty()
    });
    assert!(detected);
}

#[test]
fn shifted_weights_break_well_definedness() {
    let cx = complex(THREE_GRADINGS);
    let mut bad = cx.clone();
    bad.pairs[0].w_shift += 1;
    assert!(!check_well_defined(&bad));
}

#[test]
fn unverified_complex_ranks_exactly() {
    // without a verified ∂² the chain bounds are not used; ranks still agree
    for pd in [THREE_GRADINGS, ONE_BLOCK] {
        let cx = complex(pd);
        let verified = graded_homology(&cx).unwrap();
        let unverified = graded_homology_with(&cx, RankStrategy::Auto, false).unwrap();
        assert_eq!(verified.homology, unverified.homology, "{pd}");
    }
    let cx = complex(ONE_BLOCK);
    let strict = graded_homology_with(&cx, RankStrategy::FractionFree, false).unwrap();
    let auto = graded_homology(&cx).unwrap();
    assert_eq!(auto.boundary_out, strict.boundary_out);
    assert_eq!(auto.homology, strict.homology);
}
