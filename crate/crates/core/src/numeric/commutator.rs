//! Grid realizations of the position, momentum and dilation operators and a
//! weak check of their commutation relations on smooth test functions.

use num_complex::Complex64;
use serde::Serialize;

use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridOperator {
    /// Multiplication by `x`.
    Position,
    /// `-i hbar D_h` with the central difference `D_h`.
    Momentum,
    /// `-i hbar (x D_h + 1/2)`.
    Dilation,
}

/// Normalization of the brackets the operators are expected to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketConvention {
    /// `[x, p] = i hbar`, `[x, d] = i hbar x`.
    Standard,
    /// Normal-coordinate brackets carrying a factor 2: `[y, p_y] = 2 i hbar`,
    /// `[y, d_y] = 2 i hbar y`. Realized by operators built with `2 hbar`.
    Doubled,
}

impl BracketConvention {
    pub fn factor(self) -> f64 {
        match self {
            BracketConvention::Standard => 1.0,
            BracketConvention::Doubled => 2.0,
        }
    }
}

impl GridOperator {
    /// Apply to samples on `grid`; values beyond either end are zero.
    pub fn apply(self, grid: &Grid, hbar: f64, f: &[Complex64]) -> Vec<Complex64> {
        let n = f.len();
        let h = grid.spacing();
        let at = |j: isize| -> Complex64 {
            if j < 0 || j as usize >= n {
                Complex64::new(0.0, 0.0)
            } else {
                f[j as usize]
            }
        };
        let minus_i_hbar = Complex64::new(0.0, -hbar);
        (0..n)
            .map(|j| {
                let x = grid.node(j);
                let ji = j as isize;
                let deriv = (at(ji + 1) - at(ji - 1)) / (2.0 * h);
                match self {
                    GridOperator::Position => f[j] * x,
                    GridOperator::Momentum => minus_i_hbar * deriv,
                    GridOperator::Dilation => minus_i_hbar * (deriv * x + f[j] * 0.5),
                }
            })
            .collect()
    }
}

/// `[a, b] f = a(b f) - b(a f)` on the grid.
pub fn commutator(
    a: GridOperator,
    b: GridOperator,
    grid: &Grid,
    hbar: f64,
    f: &[Complex64],
) -> Vec<Complex64> {
    let ab = a.apply(grid, hbar, &b.apply(grid, hbar, f));
    let ba = b.apply(grid, hbar, &a.apply(grid, hbar, f));
    ab.iter().zip(&ba).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorResidual {
    /// `max |[x, d] f - i c hbar x f|`.
    pub position_dilation: f64,
    /// `max |[x, p] f - i c hbar f|`.
    pub position_momentum: f64,
}

impl CommutatorResidual {
    pub fn max(&self) -> f64 {
        self.position_dilation.max(self.position_momentum)
    }
}

/// Largest deviation of the discretized commutators from their continuum
/// values, over the interior nodes, for test function `f`.
///
/// `f` must be negligible at both grid ends, otherwise the stencils would need
/// samples outside the grid.
pub fn commutator_residual<F: Fn(f64) -> f64>(
    grid: &Grid,
    f: F,
    hbar: f64,
    convention: BracketConvention,
) -> Result<CommutatorResidual> {
    let samples: Vec<Complex64> = grid.nodes().into_iter().map(|x| f(x).into()).collect();
    let max = samples.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let edge = samples[0].norm().max(samples[samples.len() - 1].norm());
    if edge > 1e-12 * max.max(f64::MIN_POSITIVE) {
        return Err(Error::StencilOutOfDomain(format!(
            "test function is {edge:.3e} at the grid ends (peak {max:.3e})"
        )));
    }

    let c = convention.factor();
    let hbar_eff = c * hbar;
    let target = Complex64::new(0.0, c * hbar);

    let xd = commutator(
        GridOperator::Position,
        GridOperator::Dilation,
        grid,
        hbar_eff,
        &samples,
    );
    let xp = commutator(
        GridOperator::Position,
        GridOperator::Momentum,
        grid,
        hbar_eff,
        &samples,
    );

    let mut out = CommutatorResidual {
        position_dilation: 0.0,
        position_momentum: 0.0,
    };
    for j in 1..grid.n - 1 {
        let x = grid.node(j);
        out.position_dilation = out
            .position_dilation
            .max((xd[j] - target * x * samples[j]).norm());
        out.position_momentum = out
            .position_momentum
            .max((xp[j] - target * samples[j]).norm());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64) -> f64 {
        (-(x - 5.0).powi(2)).exp()
    }

    #[test]
    fn second_order_residual() {
        let coarse = Grid::new(-1.0, 11.0, 199).unwrap();
        let fine = coarse.refined();
        for conv in [BracketConvention::Standard, BracketConvention::Doubled] {
            let a = commutator_residual(&coarse, bump, 1.0, conv).unwrap().max();
            let b = commutator_residual(&fine, bump, 1.0, conv).unwrap().max();
            assert!((a / b - 4.0).abs() < 0.1, "{}", a / b);
        }
    }

    #[test]
    fn zero_function_and_self_commutator() {
        let g = Grid::new(-1.0, 11.0, 64).unwrap();
        let r = commutator_residual(&g, |_| 0.0, 1.0, BracketConvention::Standard).unwrap();
        assert_eq!(r.max(), 0.0);
        let f: Vec<Complex64> = g.nodes().into_iter().map(|x| bump(x).into()).collect();
        let c = commutator(GridOperator::Position, GridOperator::Position, &g, 1.0, &f);
        assert!(c.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn edge_support_is_rejected() {
        let g = Grid::new(4.0, 10.0, 64).unwrap();
        assert!(matches!(
            commutator_residual(&g, bump, 1.0, BracketConvention::Standard),
            Err(Error::StencilOutOfDomain(_))
        ));
    }

    #[test]
    fn doubled_brackets_need_doubled_operators() {
        // standard operators checked against the doubled target miss by hbar f
        let g = Grid::new(-1.0, 11.0, 400).unwrap();
        let f: Vec<Complex64> = g.nodes().into_iter().map(|x| bump(x).into()).collect();
        let xp = commutator(GridOperator::Position, GridOperator::Momentum, &g, 1.0, &f);
        let j = 200;
        let miss = (xp[j] - Complex64::new(0.0, 2.0) * f[j]).norm();
        assert!((miss - f[j].norm()).abs() < 1e-3);
    }
}
