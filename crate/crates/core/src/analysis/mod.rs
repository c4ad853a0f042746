//! Analytical performance: Monte Carlo capacity, MGF-based capacity lower
//! bound, and BER union bounds with perfect and imperfect CSI.

mod bounds;
mod capacity;
mod mgf;
mod quadrature;

pub use bounds::{
    ber_floor_icsi, ber_union_bound, ber_union_bound_icsi, capacity_lower_bound,
    capacity_lower_bound_strict,    rayleigh_simple_bounds, BoundEvaluator, BoundInput, RayleighSimpleBounds, QUAD_REL_TOL,
};
pub use capacity::{capacity_mc, CapacityEstimate};
pub use mgf::{mgf_gaussian_quadratic, PairForm};
pub use quadrature::QuadratureRule;
