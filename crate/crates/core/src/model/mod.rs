//! The approximated function: measure, rational part, expression language.

pub mod expr;
pub mod function;
pub mod measure;
pub mod presets;
pub mod rational;
pub mod spec;

pub use expr::Expr;
pub use function::CauchyFunction;
pub use measure::{InteriorZero, MeasureSpec, NodeSet, Piece};
pub use presets::{preset, PRESET_NAMES};
pub use rational::{Pole, RationalPart};
pub use spec::FunctionSpec;
