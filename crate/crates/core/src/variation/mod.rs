//! Needle variations of Herglotz fields and their first-order terms.

mod needle;
mod term;
mod verify;

pub use needle::{needle_field, NeedleSpec};
pub use term::{
    chain_variation, first_order_term, fundamental_solution, scaled_first_order_jet,
    scaled_first_order_term, Horizon,
};
pub use verify::{default_ladder, verify_variation, ResidualReport, VerifyOptions, DEFAULT_DECAY_THRESHOLD};
