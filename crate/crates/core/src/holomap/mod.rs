//! Holomorphic maps on the unit ball: representations, exact derivatives,
//! jet algebra and sampled membership in `M_n`.

mod cvec;
pub mod grid;
mod jet;
mod map;
mod membership;

pub use cvec::{inner, max_dist, norm, CVec};
pub use jet::{coefficient, jet_compose, Jet};
pub use map::{
    eval_map, jacobian_map, jet_from_closed_form, ConvexCombo, MapDescriptor, SliceMoebius,
};
pub use membership::{
    check_class_membership, check_default, check_normalization, margin, membership_radius,
    MembershipGrid, MembershipReport, PerturbationRadius, DEFAULT_MEMBERSHIP_TOL,
};

