//! Classical phase-space layer for two coupled oscillators on the half line.
//!
//! Points carry an explicit [`Frame`] tag so that the sum/difference change of
//! variables cannot be applied twice or skipped by accident.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass, angular frequency, reduced Planck constant and coupling constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicalParams {
    pub m: f64,
    pub omega: f64,
    pub hbar: f64,
    pub g: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            omega: 1.0,
            hbar: 1.0,
            g: 0.0,
        }
    }
}

impl PhysicalParams {
    /// Validated constructor: `m, omega, hbar > 0` and `|g| < m omega^2`.
    pub fn new(m: f64, omega: f64, hbar: f64, g: f64) -> Result<Self> {
        let params = Self { m, omega, hbar, g };
        params.validate()?;
        Ok(params)
    }

    /// Unit mass, frequency and action with the given coupling.
    pub fn with_coupling(g: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, g)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, value) in [("m", self.m), ("omega", self.omega), ("hbar", self.hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::validation(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if !self.g.is_finite() || self.g.abs() >= self.spring() {
            return Err(Error::validation(
                "g",
                format!(
                    "|g| must be below m*omega^2 = {}, got {}",
                    self.spring(),
                    self.g
                ),
            ));
        }
        Ok(())
    }

    /// The quantum branches of the coupled problem need `0 < g < m omega^2`.
    pub fn require_positive_coupling(&self) -> Result<()> {
        self.validate()?;
        if self.g <= 0.0 {
            return Err(Error::validation(
                "g",
                format!(
                    "coupled spectrum requires 0 < g < m*omega^2, got {}",
                    self.g
                ),
            ));
        }
        Ok(())
    }

    /// Spring constant `m omega^2`.
    pub fn spring(&self) -> f64 {
        self.m * self.omega * self.omega
    }

    /// Inverse squared oscillator length `m omega / hbar`.
    pub fn inverse_length_sq(&self) -> f64 {
        self.m * self.omega / self.hbar
    }

    /// `(m omega / hbar) sqrt(1 + g / (m omega^2))`, the scale of the `y1` branch.
    pub fn alpha1(&self) -> f64 {
        self.inverse_length_sq() * (1.0 + self.g / self.spring()).sqrt()
    }

    /// `(m omega / hbar) sqrt(1 - g / (m omega^2))`, the scale of the `y2` branch.
    pub fn alpha2(&self) -> f64 {
        self.inverse_length_sq() * (1.0 - self.g / self.spring()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `(x1, x2, p_x1, p_x2)` with `x1, x2 >= 0`.
    Original,
    /// `(y1, y2, p_y1, p_y2)` with `y1 >= 0`.
    Normal,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Original => "original",
            Frame::Normal => "normal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
    pub frame: Frame,
}

impl PhaseSpacePoint {
    pub fn original(x1: f64, x2: f64, p1: f64, p2: f64) -> Result<Self> {
        let point = Self {
            q1: x1,
            q2: x2,
            p1,
            p2,
            frame: Frame::Original,
        };
        point.check_domain()?;
        Ok(point)
    }

    pub fn normal(y1: f64, y2: f64, p1: f64, p2: f64) -> Result<Self> {
        let point = Self {
            q1: y1,
            q2: y2,
            p1,
            p2,
            frame: Frame::Normal,
        };
        point.check_domain()?;
        Ok(point)
    }

    pub fn check_domain(&self) -> Result<()> {
        match self.frame {
            Frame::Original if self.q1 < 0.0 || self.q2 < 0.0 => Err(Error::OutOfDomain(format!(
                "x1 = {}, x2 = {} must both be nonnegative",
                self.q1, self.q2
            ))),
            Frame::Normal if self.q1 < 0.0 => Err(Error::OutOfDomain(format!(
                "y1 = {} must be nonnegative",
                self.q1
            ))),
            _ => Ok(()),
        }
    }

    fn expect_frame(&self, expected: Frame) -> Result<()> {
        if self.frame != expected {
            return Err(Error::FrameMismatch {
                expected: expected.name(),
                found: self.frame.name(),
            });
        }
        Ok(())
    }
}

/// Dilation `d = p q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationValue(pub f64);

pub fn dilation(q: f64, p: f64) -> DilationValue {
    DilationValue(p * q)
}

/// Sum/difference change of variables into normal coordinates.
pub fn to_normal(point: &PhaseSpacePoint) -> Result<PhaseSpacePoint> {
    point.expect_frame(Frame::Original)?;
    point.check_domain()?;
    Ok(PhaseSpacePoint {
        q1: point.q1 + point.q2,
        q2: point.q1 - point.q2,
        p1: point.p1 + point.p2,
        p2: point.p1 - point.p2,
        frame: Frame::Normal,
    })
}

/// Inverse of [`to_normal`]; rejects points whose preimage leaves the quarter plane.
pub fn from_normal(point: &PhaseSpacePoint) -> Result<PhaseSpacePoint> {
    point.expect_frame(Frame::Normal)?;
    let x1 = 0.5 * (point.q1 + point.q2);
    let x2 = 0.5 * (point.q1 - point.q2);
    if x1 < 0.0 || x2 < 0.0 {
        return Err(Error::OutOfDomain(format!(
            "(y1, y2) = ({}, {}) maps to x1 = {x1}, x2 = {x2}",
            point.q1, point.q2
        )));
    }
    Ok(PhaseSpacePoint {
        q1: x1,
        q2: x2,
        p1: 0.5 * (point.p1 + point.p2),
        p2: 0.5 * (point.p1 - point.p2),
        frame: Frame::Original,
    })
}

/// Coupled Hamiltonian in the original coordinates.
pub fn hamiltonian_original(point: &PhaseSpacePoint, params: &PhysicalParams) -> Result<f64> {
    point.expect_frame(Frame::Original)?;
    let PhaseSpacePoint { q1, q2, p1, p2, .. } = *point;
    let k = params.spring();
    Ok((p1 * p1 + p2 * p2) / (2.0 * params.m) + 0.5 * k * (q1 * q1 + q2 * q2) + params.g * q1 * q2)
}

/// Decoupled Hamiltonian in normal coordinates.
pub fn hamiltonian_normal(point: &PhaseSpacePoint, params: &PhysicalParams) -> Result<f64> {
    point.expect_frame(Frame::Normal)?;
    let PhaseSpacePoint { q1, q2, p1, p2, .. } = *point;
    let k = params.spring();
    Ok((p1 * p1 + p2 * p2) / (4.0 * params.m)
        + 0.25 * (k + params.g) * q1 * q1
        + 0.25 * (k - params.g) * q2 * q2)
}

/// Normal-coordinate Hamiltonian with `p_y1` traded for the dilation `d_y1`.
pub fn hamiltonian_affine(
    y1: f64,
    d_y1: DilationValue,
    y2: f64,
    p_y2: f64,
    params: &PhysicalParams,
) -> Result<f64> {
    if !(y1 > 0.0) {
        return Err(Error::OutOfDomain(format!(
            "affine Hamiltonian needs y1 > 0, got {y1}"
        )));
    }
    let d = d_y1.0;
    let k = params.spring();
    Ok(d * d / (4.0 * params.m * y1 * y1)
        + p_y2 * p_y2 / (4.0 * params.m)
        + 0.25 * (k + params.g) * y1 * y1
        + 0.25 * (k - params.g) * y2 * y2)
}

/// Relative central-difference step for a coordinate of magnitude `c`.
pub fn bracket_step(c: f64) -> f64 {
    1e-5 * c.abs().max(1.0)
}

/// Numeric Poisson bracket `{f, g}` in the original canonical coordinates.
///
/// Both observables receive original-frame points. A normal-frame `point` is
/// mapped back first. Positions closer to zero than the stencil half-width are
/// rejected because the stencil would leave the half line.
pub fn poisson_bracket<F, G>(f: F, g: G, point: &PhaseSpacePoint) -> Result<f64>
where
    F: Fn(&PhaseSpacePoint) -> f64,
    G: Fn(&PhaseSpacePoint) -> f64,
{
    let base = match point.frame {
        Frame::Original => {
            point.check_domain()?;
            *point
        }
        Frame::Normal => from_normal(point)?,
    };

    let coords = [base.q1, base.q2, base.p1, base.p2];
    let shifted = |idx: usize, delta: f64| {
        let mut c = coords;
        c[idx] += delta;
        PhaseSpacePoint {
            q1: c[0],
            q2: c[1],
            p1: c[2],
            p2: c[3],
            frame: Frame::Original,
        }
    };
    let partial = |obs: &dyn Fn(&PhaseSpacePoint) -> f64, idx: usize| -> Result<f64> {
        let h = bracket_step(coords[idx]);
        if idx < 2 && coords[idx] - h < 0.0 {
            return Err(Error::StencilOutOfDomain(format!(
                "x{} = {} is within the step {h} of the boundary",
                idx + 1,
                coords[idx]
            )));
        }
        Ok((obs(&shifted(idx, h)) - obs(&shifted(idx, -h))) / (2.0 * h))
    };

    let mut total = 0.0;
    for i in 0..2 {
        let f_q = partial(&f, i)?;
        let f_p = partial(&f, i + 2)?;
        let g_q = partial(&g, i)?;
        let g_p = partial(&g, i + 2)?;
        total += f_q * g_p - f_p * g_q;
    }
    Ok(total)
}

/// Coordinate functions on original-frame points, for use with [`poisson_bracket`].
pub mod observables {
    use super::PhaseSpacePoint;

    pub fn x1(p: &PhaseSpacePoint) -> f64 {
        p.q1
    }
    pub fn x2(p: &PhaseSpacePoint) -> f64 {
        p.q2
    }
    pub fn p_x1(p: &PhaseSpacePoint) -> f64 {
        p.p1
    }
    pub fn p_x2(p: &PhaseSpacePoint) -> f64 {
        p.p2
    }
    pub fn y1(p: &PhaseSpacePoint) -> f64 {
        p.q1 + p.q2
    }
    pub fn y2(p: &PhaseSpacePoint) -> f64 {
        p.q1 - p.q2
    }
    pub fn p_y1(p: &PhaseSpacePoint) -> f64 {
        p.p1 + p.p2
    }
    pub fn p_y2(p: &PhaseSpacePoint) -> f64 {
        p.p1 - p.p2
    }
    /// `d_y1 = p_y1 y1`.
    pub fn d_y1(p: &PhaseSpacePoint) -> f64 {
        p_y1(p) * y1(p)
    }
}

#[cfg(test)]
mod tests {
    use super::observables::*;
    use super::*;

    fn params(g: f64) -> PhysicalParams {
        PhysicalParams::with_coupling(g).unwrap()
    }

    #[test]
    fn params_reject_strong_coupling() {
        assert!(PhysicalParams::with_coupling(1.0).is_err());
        assert!(PhysicalParams::with_coupling(-1.2).is_err());
        assert!(PhysicalParams::new(0.0, 1.0, 1.0, 0.0).is_err());
        assert!(PhysicalParams::with_coupling(-0.5).is_ok());
        let err = PhysicalParams::with_coupling(-0.5)
            .unwrap()
            .require_positive_coupling()
            .unwrap_err();
        assert!(matches!(err, Error::Validation { field: "g", .. }));
    }

    #[test]
    fn alpha_scales() {
        let p = params(0.6);
        assert!((p.alpha1() - 1.6f64.sqrt()).abs() < 1e-15);
        assert!((p.alpha2() - 0.4f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn normal_coordinates_examples() {
        let x = PhaseSpacePoint::original(1.0, 2.0, 3.0, 4.0).unwrap();
        let y = to_normal(&x).unwrap();
        assert_eq!((y.q1, y.q2, y.p1, y.p2), (3.0, -1.0, 7.0, -1.0));
        assert_eq!(y.frame, Frame::Normal);
        assert_eq!(from_normal(&y).unwrap(), x);

        let zero = PhaseSpacePoint::original(0.0, 0.0, 0.0, 0.0).unwrap();
        let z = to_normal(&zero).unwrap();
        assert_eq!((z.q1, z.q2, z.p1, z.p2), (0.0, 0.0, 0.0, 0.0));

        let edge = PhaseSpacePoint::normal(2.0, 2.0, 0.0, 0.0).unwrap();
        let x = from_normal(&edge).unwrap();
        assert_eq!((x.q1, x.q2, x.p1, x.p2), (2.0, 0.0, 0.0, 0.0));

        let outside = PhaseSpacePoint::normal(1.0, 2.0, 0.0, 0.0).unwrap();
        assert!(matches!(from_normal(&outside), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn frames_are_checked() {
        let x = PhaseSpacePoint::original(1.0, 2.0, 3.0, 4.0).unwrap();
        assert!(matches!(from_normal(&x), Err(Error::FrameMismatch { .. })));
        assert!(matches!(
            hamiltonian_normal(&x, &params(0.1)),
            Err(Error::FrameMismatch { .. })
        ));
        let bad = PhaseSpacePoint { q1: -1.0, ..x };
        assert!(to_normal(&bad).is_err());
        assert!(PhaseSpacePoint::original(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(PhaseSpacePoint::normal(1.0, -5.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn hamiltonian_examples() {
        let p = params(0.6);
        let x = PhaseSpacePoint::original(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!((hamiltonian_original(&x, &p).unwrap() - 1.6).abs() < 1e-15);
        let y = PhaseSpacePoint::normal(2.0, 0.0, 0.0, 0.0).unwrap();
        assert!((hamiltonian_normal(&y, &p).unwrap() - 1.6).abs() < 1e-15);
        let zero = PhaseSpacePoint::original(0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(hamiltonian_original(&zero, &p).unwrap(), 0.0);
        assert_eq!(
            hamiltonian_normal(&to_normal(&zero).unwrap(), &p).unwrap(),
            0.0
        );
    }

    #[test]
    fn affine_hamiltonian_examples() {
        let p = params(0.6);
        let h = hamiltonian_affine(1.0, DilationValue(2.0), 0.0, 0.0, &p).unwrap();
        assert!((h - (1.0 + 0.25 * 1.6)).abs() < 1e-15);
        assert!(hamiltonian_affine(0.0, DilationValue(1.0), 0.0, 0.0, &p).is_err());
        assert_eq!(dilation(2.0, 3.0), DilationValue(6.0));
        assert_eq!(dilation(0.0, 5.0), DilationValue(0.0));
    }

    #[test]
    fn bracket_table() {
        let pt = PhaseSpacePoint::original(0.7, 0.8, -0.3, 1.1).unwrap();
        let tol = 10.0 * 1e-10;
        let b = |f: fn(&PhaseSpacePoint) -> f64, g: fn(&PhaseSpacePoint) -> f64| {
            poisson_bracket(f, g, &pt).unwrap()
        };
        assert!((b(x1, p_x1) - 1.0).abs() < tol);
        assert!((b(x2, p_x2) - 1.0).abs() < tol);
        assert!(b(x1, p_x2).abs() < tol);
        assert!((b(y1, p_y1) - 2.0).abs() < tol);
        assert!((b(y2, p_y2) - 2.0).abs() < tol);
        assert!(b(y1, p_y2).abs() < tol);
        assert!(b(y2, p_y1).abs() < tol);
        assert!((b(y1, d_y1) - 2.0 * 1.5).abs() < 1e-7);
    }

    #[test]
    fn bracket_rejects_boundary_points() {
        let pt = PhaseSpacePoint::original(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            poisson_bracket(x1, p_x1, &pt),
            Err(Error::StencilOutOfDomain(_))
        ));
    }
}
