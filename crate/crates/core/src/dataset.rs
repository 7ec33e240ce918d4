//! Bundled case study: six reuse hypotheses for the Stock Exchange building in
//! Turin, evaluated on four macro-criteria and eight elementary criteria.
//!
//! Tables with comma decimals were converted to dot decimals; percentages are
//! stored as percent points (`4.1` means 4.1%) and money as whole euros.

use crate::document::{parse_problem, LoadedProblem};

/// Source of the bundled problem, also available at `crates/core/data/stock_exchange.json`.
pub const STOCK_EXCHANGE_JSON: &str = include_str!("../data/stock_exchange.json");

pub fn stock_exchange() -> LoadedProblem {
    parse_problem(STOCK_EXCHANGE_JSON).expect("bundled dataset is valid")
}
