use rayon::prelude::*;

use super::grid::Grid;
use super::problem::ProblemSpec;
use crate::error::{Error, Result};

const BISECTION_REL_WIDTH: f64 = 1e-12;
const MAX_BISECTION_STEPS: usize = 400;
const MAX_INVERSE_ITERATIONS: usize = 12;
const RESIDUAL_TOL: f64 = 1e-8;

/// Symmetric tridiagonal matrix with the grid spacing it was assembled on.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    /// Trapezoid weight used to normalize eigenvectors.
    pub spacing: f64,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, spacing: f64) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::validation(
                "matrix",
                format!(
                    "{} diagonal entries need {} off-diagonal ones",
                    diag.len(),
                    diag.len().saturating_sub(1)
                ),
            ));
        }
        Ok(Self { diag, off, spacing })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of `LDL^T`).
    pub fn sturm_count(&self, x: f64) -> usize {
        let guard = f64::EPSILON * self.norm_bound();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q.abs() < guard {
                q = -guard;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn bisect(&self, index: usize, lo: f64, hi: f64) -> Result<f64> {
        let abs_floor = 2.0 * f64::EPSILON * self.norm_bound();
        let (mut a, mut b) = (lo, hi);
        for _ in 0..MAX_BISECTION_STEPS {
            let width = b - a;
            if width <= BISECTION_REL_WIDTH * a.abs().max(b.abs()) || width <= abs_floor {
                return Ok(0.5 * (a + b));
            }
            let mid = 0.5 * (a + b);
            if self.sturm_count(mid) > index {
                b = mid;
            } else {
                a = mid;
            }
        }
        Err(Error::NoConvergence(format!(
            "bisection for eigenvalue {index} stalled in [{a}, {b}]"
        )))
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        if k == 0 || k > self.dim() {
            return Err(Error::validation(
                "levels",
                format!("requested {k} eigenvalues of a {0}x{0} matrix", self.dim()),
            ));
        }
        let (lo, hi) = self.gershgorin();
        let pad = f64::EPSILON * self.norm_bound() + 1e-300;
        let (lo, hi) = (lo - pad, hi + pad);
        (0..k)
            .into_par_iter()
            .map(|i| self.bisect(i, lo, hi))
            .collect()
    }

    /// Eigenvector for an eigenvalue estimate, by shifted inverse iteration.
    ///
    /// Normalized so that `h * sum v_j^2 = 1` (trapezoid rule with zero
    /// endpoints) with the first significant sample positive.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        let guard = f64::EPSILON * self.norm_bound();
        // fixed, non-symmetric start vector so it overlaps every eigenvector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749_895).fract())
            .collect();
        normalize_unit(&mut v);

        for _ in 0..MAX_INVERSE_ITERATIONS {
            let mut w = self.shifted_solve(lambda, &v, guard);
            normalize_unit(&mut w);
            v = w;
            if self.residual(&v, lambda) <= RESIDUAL_TOL {
                fix_sign_and_scale(&mut v, self.spacing);
                return Ok(v);
            }
        }
        Err(Error::NoConvergence(format!(
            "inverse iteration at lambda = {lambda} left residual {:.3e}",
            self.residual(&v, lambda)
        )))
    }

    /// `||M v - lambda v|| / ||v||`.
    pub fn residual(&self, v: &[f64], lambda: f64) -> f64 {
        let mv = self.apply(v);
        let r: f64 = mv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum();
        let norm: f64 = v.iter().map(|x| x * x).sum();
        (r / norm).sqrt()
    }

    /// Solve `(M - shift) x = rhs` by Gaussian elimination with partial pivoting.
    /// Exactly zero pivots are replaced by `guard`.
    fn shifted_solve(&self, shift: f64, rhs: &[f64], guard: f64) -> Vec<f64> {
        let n = self.dim();
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        // second superdiagonal fill-in lives in dl after a row swap
        let mut b = rhs.to_vec();
        let safe = |x: f64| {
            if x.abs() < guard {
                guard.copysign(if x == 0.0 { 1.0 } else { x })
            } else {
                x
            }
        };

        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                d[i] = safe(d[i]);
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
                dl[i] = 0.0;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    dl[i] = du[i + 1];
                    du[i + 1] = -fact * dl[i];
                } else {
                    dl[i] = 0.0;
                }
                du[i] = temp;
                let tb = b[i];
                b[i] = b[i + 1];
                b[i + 1] = tb - fact * b[i + 1];
            }
        }
        d[n - 1] = safe(d[n - 1]);

        b[n - 1] /= d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
        }
        b
    }
}

fn normalize_unit(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Threshold below which samples count as zero for sign and node decisions.
pub(crate) const SIGNIFICANT: f64 = 1e-8;

fn fix_sign_and_scale(v: &mut [f64], spacing: f64) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let first = v
        .iter()
        .find(|x| x.abs() > SIGNIFICANT * max)
        .copied()
        .unwrap_or(1.0);
    let norm = (spacing * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let scale = first.signum() / norm;
    v.iter_mut().for_each(|x| *x *= scale);
}

/// Three-point discretization of `-d^2/dx^2 + V` on `grid`.
pub fn assemble_with<V: Fn(f64) -> f64>(grid: &Grid, potential: V) -> TridiagonalMatrix {
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    TridiagonalMatrix {
        diag: (0..grid.n)
            .map(|j| 2.0 * inv_h2 + potential(grid.node(j)))
            .collect(),
        off: vec![-inv_h2; grid.n - 1],
        spacing: h,
    }
}

/// Assemble a problem's operator, checking that the grid avoids its endpoint.
pub fn assemble(spec: &ProblemSpec, grid: &Grid) -> Result<TridiagonalMatrix> {
    let v = spec.potential();
    if let Some(end) = v.left_endpoint() {
        if grid.x_min < end {
            return Err(Error::validation(
                "domain",
                format!(
                    "{} lives on x > {end} but the grid starts at {}",
                    spec.kind, grid.x_min
                ),
            ));
        }
    }
    // surfaces a singular node if one slipped through
    v.eval(grid.node(0))?;
    Ok(assemble_with(grid, |x| v.value(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::PhysicalParams;

    fn laplacian3() -> TridiagonalMatrix {
        TridiagonalMatrix::new(vec![2.0; 3], vec![-1.0; 2], 1.0).unwrap()
    }

    #[test]
    fn free_laplacian_assembly() {
        let grid = Grid::new(0.0, 17.0, 16).unwrap();
        let m = assemble_with(&grid, |_| 0.0);
        assert!(m.diag.iter().all(|&d| d == 2.0));
        assert!(m.off.iter().all(|&e| e == -1.0));
    }

    #[test]
    fn laplacian_eigenvalues() {
        let ev = laplacian3().lowest_eigenvalues(3).unwrap();
        let s2 = 2f64.sqrt();
        for (got, want) in ev.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() <= 1e-12 * want);
        }
        assert!(laplacian3().lowest_eigenvalues(4).is_err());
        assert!(laplacian3().lowest_eigenvalues(0).is_err());
    }

    #[test]
    fn diagonal_matrix() {
        let m = TridiagonalMatrix::new(vec![3.0, 1.0, 2.0], vec![0.0, 0.0], 1.0).unwrap();
        let ev = m.lowest_eigenvalues(3).unwrap();
        for (got, want) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_middle_eigenvector() {
        let m = laplacian3();
        let v = m.eigenvector(2.0).unwrap();
        let c = 1.0 / 2f64.sqrt();
        for (got, want) in v.iter().zip([c, 0.0, -c]) {
            assert!((got - want).abs() < 1e-10, "{v:?}");
        }
        let lo = m.eigenvector(2.0 - 2f64.sqrt()).unwrap();
        let dot: f64 = lo.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-8);
        assert!(lo.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn assemble_checks_domain() {
        let spec = ProblemSpec::half_line(PhysicalParams::default()).unwrap();
        let bad = Grid::new(-1.0, 5.0, 64).unwrap();
        assert!(assemble(&spec, &bad).is_err());
        let ok = Grid::new(0.0, 5.0, 64).unwrap();
        let m = assemble(&spec, &ok).unwrap();
        let h = ok.spacing();
        let x0 = ok.node(0);
        assert!((m.diag[0] - (2.0 / (h * h) + 0.75 / (x0 * x0) + x0 * x0)).abs() < 1e-9);
    }
}
