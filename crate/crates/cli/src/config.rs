//! Run configuration: a JSON document, optionally overridden by flags.

use std::path::{Path, PathBuf};

use cauchy_approx::model::{preset, FunctionSpec};
use cauchy_approx::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PRECISION: u32 = 256;
pub const DEFAULT_COUNT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn parse_list(s: &str) -> Result<Vec<Format>> {
        s.split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| match p.trim() {
                "csv" => Ok(Format::Csv),
                "json" => Ok(Format::Json),
                "svg" => Ok(Format::Svg),
                other => Err(Error::InvalidInput(format!("unknown format `{other}`"))),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pade,
    Aak,
}

/// The JSON config file. `preset` and `function` are alternatives.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// `"a:b"`, inclusive
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<String>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
    /// number of moments for the `moments` command
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Vec<Format>>,
    /// approximant type for `sweep`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    /// evaluation point `[re, im]` for Padé error rates
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<[f64; 2]>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// The function spec and a label for artifacts.
    pub fn function(&self) -> Result<(FunctionSpec, String)> {
        match (&self.preset, &self.function) {
            (Some(name), None) => Ok((preset(name)?, name.clone())),
            (None, Some(spec)) => Ok((spec.clone(), "custom".into())),
            (Some(_), Some(_)) => Err(Error::InvalidInput("give either `preset` or `function`, not both".into())),
            (None, None) => Err(Error::InvalidInput("no function: set `preset` or `function`".into())),
        }
    }

    pub fn precision(&self) -> Result<u32> {
        let p = self.precision.unwrap_or(DEFAULT_PRECISION);
        if p < 53 {
            return Err(Error::InvalidInput(format!("precision {p} is below 53 bits")));
        }
        Ok(p)
    }

    pub fn n(&self) -> Result<usize> {
        match self.n {
            Some(0) => Err(Error::InvalidInput("n must be at least 1".into())),
            Some(n) => Ok(n),
            None => Err(Error::InvalidInput("this command needs `n`".into())),
        }
    }

    pub fn n_range(&self) -> Result<Vec<usize>> {
        let text = self.n_range.as_deref().ok_or_else(|| Error::InvalidInput("this command needs `n_range`".into()))?;
        let (a, b) = text.split_once(':').ok_or_else(|| Error::InvalidInput(format!("n range `{text}` is not `a:b`")))?;
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad n range `{text}`")));
        let (a, b) = (parse(a)?, parse(b)?);
        if a == 0 || b < a {
            return Err(Error::InvalidInput(format!("n range `{text}` must satisfy 1 <= a <= b")));
        }
        if b - a + 1 < 5 {
            return Err(Error::InvalidInput("a sweep needs at least five degrees".into()));
        }
        Ok((a..=b).collect())
    }

    pub fn formats(&self) -> Vec<Format> {
        self.format.clone().unwrap_or_else(|| vec![Format::Csv, Format::Json])
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let mut c = RunConfig { n_range: Some("10:24".into()), ..Default::default() };
        assert_eq!(c.n_range().unwrap().len(), 15);
        c.n_range = Some("10:10".into());
        assert!(c.n_range().is_err());
        c.n_range = Some("x".into());
        assert!(c.n_range().is_err());
    }

    #[test]
    fn function_source_is_exclusive() {
        let c = RunConfig { preset: Some("piecewise-sextic".into()), ..Default::default() };
        assert_eq!(c.function().unwrap().1, "piecewise-sextic");
        assert!(RunConfig::default().function().is_err());
        let text = r#"{"preset": "markov-half", "n": 4, "N": 96, "format": ["csv", "svg"]}"#;
        let c: RunConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.n_trunc, Some(96));
        assert_eq!(c.formats(), vec![Format::Csv, Format::Svg]);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn formats_parse() {
        assert_eq!(Format::parse_list("csv,json,svg").unwrap().len(), 3);
        assert!(Format::parse_list("png").is_err());
    }
}
