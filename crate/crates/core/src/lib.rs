//! Nonlocal Brownian motions: subordinate boundary behaviour of Brownian
//! motion at zero, built from a Bernstein symbol.

pub mod error;
pub mod heat_interface_solver;
pub mod keys;
pub mod levy_symbols;
pub mod nonlocal_operators;
pub mod path_engine;
pub mod quadrature;
pub mod resolvent_lab;

pub use error::{Error, Result};
pub use levy_symbols::{LevySymbol, SymbolCatalogEntry};
