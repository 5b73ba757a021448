//! End-to-end runs: diagram in, normalized δ-graded ranks and check
//! results out.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::complex::{
    build_complex, check_nu_law, check_well_defined, d_squared_failures, grading_label, ChainComplex, ComplexDump,
    ComplexError,
};
use crate::diagram::{
    black_graph_oriented, faces_and_coloring, sign_data, DiagramError, EdgeOrientation, FaceId, PlanarDiagram,
};
use crate::homology::{graded_homology_with, normalize_and_report, HomologyError, RankMethod, RankStrategy};
use crate::marking::{
    assign_weights, auto_mark, default_omega, uniform_mark, MarkingError, MarkingSpec, OmegaAssignment,
};
use crate::resolutions::{
    double_successors, enumerate_trees, enumerate_trees_brute, matrix_tree_count, trace_all, ResolutionError,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Brute-force tree enumeration is only attempted up to this many crossings.
const MAX_BRUTE_CROSSINGS: usize = 20;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("diagram: {0}")]
    Diagram(#[from] DiagramError),
    #[error("marking: {0}")]
    Marking(#[from] MarkingError),
    #[error("resolutions: {0}")]
    Resolution(#[from] ResolutionError),
    #[error("complex: {0}")]
    Complex(#[from] ComplexError),
    #[error("homology: {0}")]
    Homology(#[from] HomologyError),
}

impl PipelineError {
    /// 1 for invalid input, 2 for non-generic Ω, 3 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Marking(MarkingError::NotGeneric { .. })
            | PipelineError::Resolution(ResolutionError::NonGenericWeights { .. })
            | PipelineError::Complex(ComplexError::NonGenericWeights) => 2,
            PipelineError::Diagram(DiagramError::InternalGeometry(_))
            | PipelineError::Resolution(ResolutionError::NotSingleCircle { .. })
            | PipelineError::Resolution(ResolutionError::InterleavingViolation { .. })
            | PipelineError::Homology(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord)]
pub enum CheckLevel {
    None,
    /// `∂² = 0` only.
    #[default]
    Fast,
    /// Also well-definedness, the ν law, and the spanning-tree oracles.
    Full,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum MarkingChoice {
    /// One point per arc, two on loop arcs.
    #[default]
    Auto,
    /// The same number of points on every arc.
    Uniform(usize),
    Spec(MarkingSpec),
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub omega: Option<Vec<i64>>,
    pub marking: MarkingChoice,
    pub outer_face: Option<FaceId>,
    pub orientation: EdgeOrientation,
    pub check: CheckLevel,
    pub rank: RankStrategy,
    pub mirror: bool,
    pub dump_trees: bool,
    pub dump_complex: bool,
}

/// A map keyed by doubled grading, serialized in numeric order with
/// `"k"` / `"k/2"` keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradedMap<T>(pub BTreeMap<i64, T>);

impl<T: Serialize> Serialize for GradedMap<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (g, v) in &self.0 {
            map.serialize_entry(&grading_label(*g), v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramSummary {
    pub pd: String,
    pub mirrored: bool,
    pub n: usize,
    pub m: usize,
    pub components: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub trees: usize,
    pub successor_pairs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_squared: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub well_defined: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_law: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix_tree: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree_enumeration: Option<bool>,
}

impl CheckResults {
    pub fn all_passed(&self) -> bool {
        [self.d_squared, self.well_defined, self.nu_law, self.matrix_tree, self.tree_enumeration]
            .iter()
            .all(|c| c.unwrap_or(true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDump {
    pub bits: String,
    pub grading: String,
    /// Marked points in circle order, outer point last.
    pub circle: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub diagram: DiagramSummary,
    pub omega: OmegaAssignment,
    pub ranks: GradedMap<usize>,
    pub total_rank: usize,
    pub width: Option<i64>,
    pub thin: bool,
    pub supported_grading: Option<String>,
    pub chain_dims: GradedMap<usize>,
    pub rank_methods: GradedMap<RankMethod>,
    pub checks: CheckResults,
    /// Milliseconds per stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trees: Option<Vec<TreeDump>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexDump>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.all_passed()
    }

    pub fn without_timings(mut self) -> Self {
        self.timings = None;
        self
    }
}

/// Everything up to the built complex, kept for callers that need to
/// inspect or perturb it.
pub struct Prepared {
    pub diagram: PlanarDiagram,
    pub omega: OmegaAssignment,
    pub complex: ChainComplex,
    pub tree_oracles: (bool, Option<bool>),
}

struct Timer {
    at: Instant,
    laps: BTreeMap<String, f64>,
}

impl Timer {
    fn new() -> Self {
        Self { at: Instant::now(), laps: BTreeMap::new() }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        *self.laps.entry(stage.to_string()).or_default() += (now - self.at).as_secs_f64() * 1e3;
        self.at = now;
    }
}

fn prepare(d: &PlanarDiagram, cfg: &RunConfig, timer: &mut Timer) -> Result<Prepared, PipelineError> {
    let d = if cfg.mirror { d.mirror() } else { d.clone() };
    let col = faces_and_coloring(&d, cfg.outer_face)?;
    let bg = black_graph_oriented(&d, &col, &cfg.orientation)?;
    let mk = match &cfg.marking {
        MarkingChoice::Auto => auto_mark(&d, &col),
        MarkingChoice::Uniform(k) => uniform_mark(&d, &col, *k)?,
        MarkingChoice::Spec(spec) => spec.apply(&d, &col)?,
    };
    let omega = match &cfg.omega {
        Some(v) => OmegaAssignment::new(v.clone(), d.n(), true)?,
        None => default_omega(d.n()),
    };
    let wt = assign_weights(&d, &mk, &bg, &omega)?;
    timer.lap("diagram");
    let masks = enumerate_trees(&col, &bg)?;
    let matrix_tree = matrix_tree_count(&bg) == masks.len() as i128;
    let brute = (cfg.check == CheckLevel::Full && d.n() <= MAX_BRUTE_CROSSINGS)
        .then(|| enumerate_trees_brute(&col, &bg) == masks);
    let trees = trace_all(&d, &col, &mk, &wt, &masks)?;
    let pairs = double_successors(&col, &wt, &trees)?;
    timer.lap("resolutions");
    let complex = build_complex(trees, pairs, sign_data(&d).n_minus)?;
    timer.lap("complex");
    Ok(Prepared { diagram: d, omega, complex, tree_oracles: (matrix_tree, brute) })
}

/// Builds the complex without computing homology.
pub fn prepare_complex(d: &PlanarDiagram, cfg: &RunConfig) -> Result<Prepared, PipelineError> {
    prepare(d, cfg, &mut Timer::new())
}

pub fn run(d: &PlanarDiagram, cfg: &RunConfig) -> Result<Report, PipelineError> {
    let mut timer = Timer::new();
    let p = prepare(d, cfg, &mut timer)?;
    let cx = &p.complex;
    let mut checks = CheckResults::default();
    // the certified rank path relies on ∂² = 0, so it is verified whenever used
    let d_squared = (cfg.check >= CheckLevel::Fast || cfg.rank == RankStrategy::Auto)
        .then(|| d_squared_failures(cx).is_empty());
    if cfg.check >= CheckLevel::Fast {
        checks.d_squared = d_squared;
    }
    timer.lap("checks");
    if cfg.check == CheckLevel::Full {
        checks.well_defined = Some(check_well_defined(cx));
        checks.nu_law = Some(check_nu_law(cx));
        checks.matrix_tree = Some(p.tree_oracles.0);
        checks.tree_enumeration = p.tree_oracles.1;
        timer.lap("checks");
    }
    let gr = graded_homology_with(cx, cfg.rank, d_squared == Some(true))?;
    let signs = sign_data(&p.diagram);
    let inv = normalize_and_report(&gr, &signs, cx.m, cx.trees.len())?;
    timer.lap("homology");
    let trees = cfg.dump_trees.then(|| {
        cx.trees
            .iter()
            .map(|t| TreeDump {
                bits: (0..p.diagram.n()).map(|j| if t.bit(j) { '1' } else { '0' }).collect(),
                grading: grading_label(t.grading2(cx.n_minus)),
                circle: t.sigma.clone(),
            })
            .collect()
    });
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        diagram: DiagramSummary {
            pd: p.diagram.to_string(),
            mirrored: cfg.mirror,
            n: p.diagram.n(),
            m: cx.m,
            components: signs.components,
            n_plus: signs.n_plus,
            n_minus: signs.n_minus,
            trees: cx.trees.len(),
            successor_pairs: cx.pairs.len(),
        },
        omega: p.omega.clone(),
        ranks: GradedMap(inv.ranks),
        total_rank: inv.total_rank,
        width: inv.width,
        thin: inv.thin,
        supported_grading: inv.supported_grading.map(grading_label),
        chain_dims: GradedMap(gr.chain),
        rank_methods: GradedMap(gr.methods),
        checks,
        timings: Some(timer.laps),
        trees,
        complex: cfg.dump_complex.then(|| cx.dump()),
    })
}
