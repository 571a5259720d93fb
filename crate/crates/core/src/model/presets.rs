//! Named example functions.

use crate::error::{Error, Result};
use crate::model::spec::FunctionSpec;

pub const PRESET_NAMES: [&str; 3] = ["markov-arcsine", "markov-half", "piecewise-sextic"];

const MARKOV_ARCSINE: &str = r#"{
    "measure": {"interval": [-1, 1], "pieces": [{"from": -1, "to": 1, "h": "1"}]}
}"#;

const MARKOV_HALF: &str = r#"{
    "measure": {"interval": [-0.5, 0.5], "pieces": [{"from": -0.5, "to": 0.5, "h": "1"}]}
}"#;

// 7 e^{it} dt / sqrt((t + 0.7)(0.4 - t)) on [-0.7, 0] and (it + 1) dt / sqrt(...)
// on [0, 0.4], written against the arcsine distribution, plus 1/(5! (z - eta)^6)
const PIECEWISE_SEXTIC: &str = r#"{
    "measure": {"interval": [-0.7, 0.4], "pieces": [
        {"from": -0.7, "to": 0, "h": "7*pi*exp(i*t)"},
        {"from": 0, "to": 0.4, "h": "pi*(i*t+1)"}]},
    "rational": {"p": [["1/120", 0]], "q_roots": [{"root": [0.7, 0.2], "multiplicity": 6}]}
}"#;

/// The spec of a named preset.
pub fn preset(name: &str) -> Result<FunctionSpec> {
    let text = match name {
        "markov-arcsine" => MARKOV_ARCSINE,
        "markov-half" => MARKOV_HALF,
        "piecewise-sextic" => PIECEWISE_SEXTIC,
        _ => return Err(Error::InvalidInput(format!("unknown preset `{name}`; known: {}", PRESET_NAMES.join(", ")))),
    };
    FunctionSpec::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::context::PrecisionContext;

    #[test]
    fn presets_build() {
        let ctx = PrecisionContext::default();
        for name in PRESET_NAMES {
            preset(name).unwrap().build(&ctx).unwrap();
        }
        assert_eq!(preset("piecewise-sextic").unwrap().build(&ctx).unwrap().m(), 6);
        assert!(preset("nope").is_err());
    }
}
