use serde::{Deserialize, Serialize};

use crate::classical::PhysicalParams;
use crate::error::{Error, Result};

/// Which stationary equation to solve.
///
/// Serialized names match the command-line `--kind` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProblemKind {
    /// Half harmonic oscillator: `3/4 x^-2 + (m omega / hbar)^2 x^2` on `x > 0`.
    #[serde(rename = "eqintro")]
    HalfLine,
    /// `y1` normal mode: `3/4 y^-2 + (m / hbar^2)(m omega^2 + g) y^2` on `y > 0`.
    #[serde(rename = "eqo1")]
    CoupledY1,
    /// `y2` normal mode: `(m / hbar^2)(m omega^2 - g) y^2` on the whole line.
    #[serde(rename = "eqo2")]
    CoupledY2,
    /// Endpoint moved to `-b`: `3/4 (x + b)^-2 + (m omega / hbar)^2 x^2` on `x > -b`.
    #[serde(rename = "hext1")]
    MovingEndpoint,
    /// Large-`b` expansion of the barrier truncated at a given order.
    #[serde(rename = "truncated")]
    Truncated,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 5] = [
        ProblemKind::HalfLine,
        ProblemKind::CoupledY1,
        ProblemKind::CoupledY2,
        ProblemKind::MovingEndpoint,
        ProblemKind::Truncated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::HalfLine => "eqintro",
            ProblemKind::CoupledY1 => "eqo1",
            ProblemKind::CoupledY2 => "eqo2",
            ProblemKind::MovingEndpoint => "hext1",
            ProblemKind::Truncated => "truncated",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Denominator `c` in `E = lambda hbar^2 / (c m)`. The coupled branches
    /// carry the doubled bracket normalization and use `4m`.
    fn energy_denominator(self) -> f64 {
        match self {
            ProblemKind::CoupledY1 | ProblemKind::CoupledY2 => 4.0,
            _ => 2.0,
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub const MAX_EXPANSION_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub params: PhysicalParams,
    /// Endpoint offset, meaningful for [`ProblemKind::MovingEndpoint`] and
    /// [`ProblemKind::Truncated`] only.
    pub b: Option<f64>,
    /// Expansion order, meaningful for [`ProblemKind::Truncated`] only.
    pub order: Option<usize>,
}

impl ProblemSpec {
    pub fn new(
        kind: ProblemKind,
        params: PhysicalParams,
        b: Option<f64>,
        order: Option<usize>,
    ) -> Result<Self> {
        let spec = Self {
            kind,
            params,
            b,
            order,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn half_line(params: PhysicalParams) -> Result<Self> {
        Self::new(ProblemKind::HalfLine, params, None, None)
    }

    pub fn coupled_y1(params: PhysicalParams) -> Result<Self> {
        Self::new(ProblemKind::CoupledY1, params, None, None)
    }

    pub fn coupled_y2(params: PhysicalParams) -> Result<Self> {
        Self::new(ProblemKind::CoupledY2, params, None, None)
    }

    pub fn moving_endpoint(params: PhysicalParams, b: f64) -> Result<Self> {
        Self::new(ProblemKind::MovingEndpoint, params, Some(b), None)
    }

    pub fn truncated(params: PhysicalParams, b: f64, order: usize) -> Result<Self> {
        Self::new(ProblemKind::Truncated, params, Some(b), Some(order))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        match self.kind {
            ProblemKind::CoupledY1 | ProblemKind::CoupledY2 => {
                self.params.require_positive_coupling()?
            }
            _ => {}
        }
        match (self.kind, self.b) {
            (ProblemKind::MovingEndpoint, Some(b)) if b.is_finite() && b >= 0.0 => {}
            (ProblemKind::Truncated, Some(b)) if b.is_finite() && b > 0.0 => {}
            (ProblemKind::MovingEndpoint | ProblemKind::Truncated, b) => {
                return Err(Error::validation(
                    "b",
                    format!("{} needs a valid endpoint offset, got {b:?}", self.kind),
                ))
            }
            (_, Some(_)) => {
                return Err(Error::validation(
                    "b",
                    format!("{} takes no offset", self.kind),
                ))
            }
            (_, None) => {}
        }
        match (self.kind, self.order) {
            (ProblemKind::Truncated, Some(o)) if o <= MAX_EXPANSION_ORDER => Ok(()),
            (ProblemKind::Truncated, o) => Err(Error::validation(
                "order",
                format!("expansion order must be in 0..={MAX_EXPANSION_ORDER}, got {o:?}"),
            )),
            (_, Some(_)) => Err(Error::validation(
                "order",
                format!("{} takes no expansion order", self.kind),
            )),
            (_, None) => Ok(()),
        }
    }

    /// Physical energy of a discrete operator eigenvalue.
    pub fn energy_from_lambda(&self, lambda: f64) -> f64 {
        lambda * self.params.hbar * self.params.hbar
            / (self.kind.energy_denominator() * self.params.m)
    }

    pub fn lambda_from_energy(&self, energy: f64) -> f64 {
        energy * self.kind.energy_denominator() * self.params.m
            / (self.params.hbar * self.params.hbar)
    }

    pub fn potential(&self) -> Potential {
        potential_of(self)
    }
}

/// Potential `V(x)` of a problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    kind: ProblemKind,
    /// Coefficient of `x^2`.
    quadratic: f64,
    b: f64,
    order: usize,
}

pub fn potential_of(spec: &ProblemSpec) -> Potential {
    let p = &spec.params;
    let quadratic = match spec.kind {
        ProblemKind::CoupledY1 => p.m * (p.spring() + p.g) / (p.hbar * p.hbar),
        ProblemKind::CoupledY2 => p.m * (p.spring() - p.g) / (p.hbar * p.hbar),
        _ => p.inverse_length_sq().powi(2),
    };
    Potential {
        kind: spec.kind,
        quadratic,
        b: spec.b.unwrap_or(0.0),
        order: spec.order.unwrap_or(0),
    }
}

impl Potential {
    pub fn quadratic_coefficient(&self) -> f64 {
        self.quadratic
    }

    /// Hard endpoint of the configuration space, if any.
    pub fn left_endpoint(&self) -> Option<f64> {
        match self.kind {
            ProblemKind::HalfLine | ProblemKind::CoupledY1 => Some(0.0),
            ProblemKind::MovingEndpoint => Some(-self.b),
            ProblemKind::CoupledY2 | ProblemKind::Truncated => None,
        }
    }

    /// Checked evaluation; the hard endpoint itself is singular.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if let Some(end) = self.left_endpoint() {
            if x == end {
                return Err(Error::Singular { x });
            }
            if x < end {
                return Err(Error::OutOfDomain(format!(
                    "x = {x} lies left of the endpoint {end}"
                )));
            }
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation for nodes known to be interior.
    pub fn value(&self, x: f64) -> f64 {
        let harmonic = self.quadratic * x * x;
        match self.kind {
            ProblemKind::HalfLine | ProblemKind::CoupledY1 => 0.75 / (x * x) + harmonic,
            ProblemKind::CoupledY2 => harmonic,
            ProblemKind::MovingEndpoint => {
                let r = x + self.b;
                0.75 / (r * r) + harmonic
            }
            ProblemKind::Truncated => {
                let t = -x / self.b;
                // 1 - 2t + 3t^2 - 4t^3 + 5t^4 = sum (k+1)(-x/b)^k
                let mut series = 0.0;
                let mut power = 1.0;
                for k in 0..=self.order {
                    series += (k + 1) as f64 * power;
                    power *= t;
                }
                0.75 / (self.b * self.b) * series + harmonic
            }
        }
    }
}
