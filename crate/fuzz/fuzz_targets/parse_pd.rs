#![no_main]

use libfuzzer_sys::fuzz_target;
use spantree_hfk::diagram::{black_graph, faces_and_coloring, parse_pd, sign_data};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(d) = parse_pd(text) else { return };
    // accepted diagrams print back to an equal diagram
    let again = parse_pd(&d.to_string()).expect("printed PD reparses");
    assert_eq!(again, d);
    let _ = sign_data(&d);
    if let Ok(col) = faces_and_coloring(&d, None) {
        let _ = black_graph(&d, &col);
    }
});
