pub mod complex;
pub mod diagram;
pub mod exactfield;
pub mod homology;
pub mod marking;
pub mod pipeline;
pub mod resolutions;
