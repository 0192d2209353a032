//! The non-local heat problem with an interface at zero: time-domain values
//! from the representation formula, and the interface conditions checked
//! in the Laplace domain.

mod interface;
mod inversion;
mod representation;

pub use interface::{
    classical_limit_report, relative_residual, skew_interface_residual, sticky_interface_residual,
    ClassicalLimitReport, LimitProbe, LimitRow, SkewInterface, StickyInterface,
};
pub use inversion::{gaver_stehfest, stehfest_coefficients, Inversion};
pub use representation::{
    heat_kernel, hitting_density, representation_u, zero_trace_from_resolvent, HeatSolution, Representation,
    DEFAULT_STEHFEST_ORDER,
};
