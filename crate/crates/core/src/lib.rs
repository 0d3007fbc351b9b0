//! Sheaf cohomology of torus-invariant line bundles on complete toric
//! varieties, computed through the combinatorics of the associated polytope:
//! each weight space is read off from the reduced cohomology of a union of
//! polytope facets, with independent Čech and barycentric oracles. On top of
//! the per-weight engine sit total-cohomology scans, divisor class groups,
//! and generators/checkers for (strongly) exceptional collections of line
//! bundles.

pub mod cohomology;
pub mod collections;
pub mod error;
pub mod exactlin;
pub mod fan;
pub mod fixtures;
pub mod regions;
pub mod strata;
pub mod weights;

pub use cohomology::{
    cech_weight_cohomology, reduced_betti, weight_cohomology, BettiVector, CohomologyEngine,
    SimplicialComplex, WeightCohomology,
};
pub use collections::{
    bondal_classes, buchsbaum_rim_classes, ext_table, is_strongly_exceptional, universal_classes,
    BondalCollection, BundleClass, ExceptionalVerdict, ExtTable, Provenance, Quiver, QuiverArrow,
    QuiverVertex,
};
pub use error::{Error, Result};
pub use fan::{
    canonical_divisor, cartier_data, divisor_class, is_ample, polytope_lattice_points,
    support_value, CartierData, ClassLattice, DivisorClass, Fan, FanReport, TorusDivisor,
};
pub use regions::{Inequality, Region, RegionTable};
pub use strata::{facet_complex, facet_set, nerve, order_complex, FacetComplex, FacetSet};
pub use weights::{
    classify_weights, total_cohomology, weight_box, CohomologyTable, FacetClassRow, WeightBox,
};
