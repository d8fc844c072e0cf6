//! Finite little groups of the ultrahyperbolic BMS group: enumeration and
//! classification of subgroups of C_n × C_m, elementary domains on the
//! torus, the dual action with its ±1 multiplier, invariant subspaces,
//! witness functions, and character data for the induced representations.
//!
//! Everything that can be exact is exact: angles are rationals in turns and
//! grid functions carry rational values.

pub mod error;
pub mod exactmath;
pub mod domains;
pub mod dualaction;
pub mod groups;
pub mod invariantspace;
pub mod repr;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
pub use exactmath::{angle_add, factorize, sin_sign, Factorization, Rational, RationalAngle, Sign};
pub use groups::{
    all_subgroups, brute_force_subgroups, classify, cyclic_from_parameters, enumerate_cyclic,
    enumerate_two_generator, kernel, make_ambient, two_generator_from_parameters, Ambient, ClassTag,
    FiniteSubgroup, GroupElement, LocalFamily, SubgroupParameters,
};
pub use domains::{
    coset_representatives, subgroup_domain, torus_domain, verify_elementary, ElementaryReport, Interval, Rect,
    RectUnion,
};
pub use dualaction::{dual_apply, gamma, gamma_sign, GridFunction, GridSpec, PreparedAction, Sl2Element};
pub use invariantspace::{invariant_dimension, rho_restrict, sigma_project, verify_invariant_space, InvariantReport};
pub use repr::{
    character_table, induce_finite, induced_descriptor, verify_orthogonality, CharLabel, Character,
    CharacterTable, InducedRepDescriptor, InductionReport,
};
pub use suite::{verify_all, SuiteConfig, SuiteReport};
pub use witness::{build_rectangle, build_zeta3, detect_little_group, run_witness, WitnessReport};
