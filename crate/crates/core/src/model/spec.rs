//! JSON description of a [`CauchyFunction`].
//!
//! Scalars may be JSON numbers or expression strings (`"-0.7"`, `"1/120"`),
//! complex numbers are `[re, im]` pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::context::PrecisionContext;
use crate::kernel::poly::Poly;
use crate::kernel::scalar::{Cplx, Real};
use crate::model::expr::{parse_real, Expr};
use crate::model::function::{CauchyFunction, DEFAULT_EXCLUSION};
use crate::model::measure::{InteriorZero, MeasureSpec, Piece};
use crate::model::rational::{Pole, RationalPart};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    pub fn real(&self, prec: u32) -> Result<Real> {
        match self {
            // shortest round-trip decimal, so 0.7 means 7/10 at any precision
            Scalar::Number(x) => parse_real(&format!("{x}"), prec),
            Scalar::Text(s) => parse_real(s, prec),
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Number(x)
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Text(s.to_string())
    }
}

pub type ComplexSpec = [Scalar; 2];

fn complex(c: &ComplexSpec, prec: u32) -> Result<Cplx> {
    Ok(Cplx::new(c[0].real(prec)?, c[1].real(prec)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSpec {
    pub from: Scalar,
    pub to: Scalar,
    pub h: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSpec {
    pub x: Scalar,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDoc {
    pub interval: [Scalar; 2],
    pub pieces: Vec<PieceSpec>,
    #[serde(default)]
    pub endpoint_exponents: [f64; 2],
    #[serde(default)]
    pub interior_zeros: Vec<ZeroSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSpec {
    pub root: ComplexSpec,
    pub multiplicity: usize,
}

/// `q` is given either by coefficients (lowest first) or by roots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalDoc {
    pub p: Vec<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<ComplexSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_roots: Option<Vec<RootSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<RationalDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclusion_radius: Option<f64>,
}

impl FunctionSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn build(&self, ctx: &PrecisionContext) -> Result<CauchyFunction> {
        let prec = ctx.bits();
        let measure = self.measure.as_ref().map(|m| build_measure(m, prec)).transpose()?;
        let rational = self.rational.as_ref().map(|r| build_rational(r, ctx)).transpose()?;
        CauchyFunction::new(measure, rational)?.with_exclusion_radius(self.exclusion_radius.unwrap_or(DEFAULT_EXCLUSION))
    }
}

fn build_measure(m: &MeasureDoc, prec: u32) -> Result<MeasureSpec> {
    let pieces = m
        .pieces
        .iter()
        .map(|p| Ok(Piece { from: p.from.real(prec)?, to: p.to.real(prec)?, h: Expr::parse(&p.h)? }))
        .collect::<Result<Vec<_>>>()?;
    let zeros = m
        .interior_zeros
        .iter()
        .map(|z| Ok(InteriorZero { x: z.x.real(prec)?, alpha: z.alpha }))
        .collect::<Result<Vec<_>>>()?;
    MeasureSpec::new(
        m.interval[0].real(prec)?,
        m.interval[1].real(prec)?,
        pieces,
        (m.endpoint_exponents[0], m.endpoint_exponents[1]),
        zeros,
    )
}

fn build_rational(r: &RationalDoc, ctx: &PrecisionContext) -> Result<RationalPart> {
    let prec = ctx.bits();
    let p = Poly::new(r.p.iter().map(|c| complex(c, prec)).collect::<Result<_>>()?, prec);
    match (&r.q, &r.q_roots) {
        (Some(q), None) => {
            let q = Poly::new(q.iter().map(|c| complex(c, prec)).collect::<Result<_>>()?, prec);
            RationalPart::new(p, q, ctx)
        }
        (None, Some(roots)) => {
            let poles = roots
                .iter()
                .map(|e| Ok(Pole { eta: complex(&e.root, prec)?, multiplicity: e.multiplicity }))
                .collect::<Result<Vec<_>>>()?;
            RationalPart::from_poles(p, poles, ctx)
        }
        _ => Err(Error::InvalidInput("rational part needs exactly one of `q` or `q_roots`".into())),
    }
}
