//! Special functions, Gauss rules and a bracketing root finder.
//!
//! Everything here is a pure function of its inputs. Quadrature rules are
//! computed once per `(kind, order)` in `f64` and shared through an
//! immutable cache.

mod graded;
mod quadrature;
mod root;
mod special;

pub(crate) use graded::{converge_log, log_graded_legendre, PeakSide};
pub use quadrature::{cached_rule, quadrature_nodes, QuadratureRule, RuleKind, MAX_RULE_ORDER, MIN_RULE_ORDER};
pub use root::{find_root_monotone, try_find_root_monotone, RootBracket};
pub use special::{log_gamma, q_function, q_function_log};
