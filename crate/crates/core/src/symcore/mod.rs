//! Symmetry parameters, the generator and canonical coordinate maps.

mod canonical;
mod params;

pub use canonical::{
    cache_span, principal_angle, CanonicalMap, CanonicalPoint, Jacobian, LabPoint, QuadTables, Quadratures,
    DEFAULT_CACHE_NODES,
};
pub use params::{generator_from, Case, Coefficients, GeneratorValue, Interval, SymmetryParams, TimeFn};
