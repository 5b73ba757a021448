#![no_main]

use libfuzzer_sys::fuzz_target;
use spantree_hfk::diagram::{faces_and_coloring, parse_pd};
use spantree_hfk::marking::MarkingSpec;

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = MarkingSpec::from_json(text) else { return };
    let d = parse_pd(TREFOIL).expect("fixed diagram");
    let col = faces_and_coloring(&d, None).expect("fixed diagram");
    if spec.points_per_arc.values().all(|&k| k <= 16) {
        let _ = spec.apply(&d, &col);
    }
});
