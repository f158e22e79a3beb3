//! Piecewise-constant Herglotz fields and the flows they generate.

mod field;
mod flow;
mod jetflow;
mod koebe;
mod limit;
mod rk;

pub use field::HerglotzField;
pub use flow::{evolution_map, integrate_flow, integrate_scaled_flow, EvolutionCheck, FlowResult, Scaling};
pub use jetflow::{flow_jet, scaled_flow_jet};
pub use koebe::{koebe, koebe_oracle};
pub use limit::{
    scaled_limit, scaled_limit_at, LimitOptions, ScaledLimit, DEFAULT_FIRST_HORIZON, HORIZON_CAP,
};
pub use rk::Tolerances;

pub(crate) use flow::check_times;
