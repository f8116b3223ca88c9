//! Lyapunov functions, analytic decay identities, equilibrium distances and
//! the closed-form constants behind the convergence guarantees.

mod bounds;
mod equilibrium;
mod lyapunov;
mod rate;
mod sampling;

pub use bounds::{level_set_bounds, spacing_ceiling, ExponentialRegime, LevelSetBounds};
pub use equilibrium::{dist_to_equilibrium, EquilibriumSet};
pub use lyapunov::{
    has_unique_equilibrium, hdot_analytic, hdot_chain_rule, hdot_parts, lyapunov_h, lyapunov_u, LyapunovSample,
};
pub use rate::{cyclic_difference_matrix, mu_n, oracle_mu_n, rate_omega_bar, RateConstants, DEFAULT_G_FRAK};
pub use sampling::{random_state, random_state_below, sample_sublevel_set, OPEN_SPAN_FACTOR};
