use serde::Serialize;

use super::grid::Grid;
use super::problem::{Potential, ProblemSpec};
use super::tridiag::{assemble, SIGNIFICANT};
use crate::error::{Error, Result};

/// How finely and how carefully to solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolutionPolicy {
    /// Interior node count of the coarse grid; the fine grid has `2n + 1`.
    pub grid_n: usize,
    /// Explicit `(x_min, x_max)`. Chosen automatically when absent; still
    /// subject to the truncation check.
    pub domain: Option<(f64, f64)>,
    /// Combine the two grids as `(4 E_{h/2} - E_h) / 3`.
    pub extrapolate: bool,
    /// Re-solve on a domain extended by a quarter of its width per free side
    /// and compare.
    pub truncation_check: bool,
    /// Relative tolerance of the truncation check.
    pub truncation_tol: f64,
    /// Restrict the domain to `|x| <= clip`.
    pub clip: Option<f64>,
}

impl Default for ResolutionPolicy {
    fn default() -> Self {
        Self {
            grid_n: 4000,
            domain: None,
            extrapolate: true,
            truncation_check: true,
            truncation_tol: 1e-8,
            clip: None,
        }
    }
}

impl ResolutionPolicy {
    pub fn with_grid_n(grid_n: usize) -> Self {
        Self {
            grid_n,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Level {
    pub n: usize,
    /// Operator eigenvalue, extrapolated when the result says so.
    pub lambda: f64,
    pub energy: f64,
    pub lambda_coarse: f64,
    pub lambda_fine: f64,
    /// Eigenvector on the fine grid, `h * sum v^2 = 1`.
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenResult {
    pub problem: ProblemSpec,
    pub levels: Vec<Level>,
    /// Fine grid carrying the samples.
    pub grid: Grid,
    pub extrapolated: bool,
    /// Domain cut short by [`ResolutionPolicy::clip`].
    pub clipped: bool,
}

impl EigenResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.lambda).collect()
    }
}

/// Lowest `k` operator eigenvalues on a fixed grid, no extrapolation.
pub fn solve_on_grid(spec: &ProblemSpec, grid: &Grid, k: usize) -> Result<Vec<f64>> {
    assemble(spec, grid)?.lowest_eigenvalues(k)
}

/// Solve `spec` for its `k` lowest levels.
pub fn solve(spec: &ProblemSpec, k: usize, policy: &ResolutionPolicy) -> Result<EigenResult> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::validation("levels", "need at least one level"));
    }
    let (x_min, x_max, clipped) = match policy.domain {
        Some((a, b)) => (a, b, false),
        None => choose_domain(spec, k, policy.clip)?,
    };
    let coarse = Grid::new(x_min, x_max, policy.grid_n)?;
    let fine = coarse.refined();
    let coarse_matrix = assemble(spec, &coarse)?;
    let fine_matrix = assemble(spec, &fine)?;

    let (lc, lf) = rayon::join(
        || coarse_matrix.lowest_eigenvalues(k),
        || fine_matrix.lowest_eigenvalues(k),
    );
    let (lc, lf) = (lc?, lf?);

    if policy.truncation_check && !clipped {
        check_truncation(spec, &coarse, k, &lc, policy.truncation_tol)?;
    }

    let levels = lc
        .iter()
        .zip(&lf)
        .enumerate()
        .map(|(n, (&coarse_l, &fine_l))| {
            let lambda = if policy.extrapolate {
                (4.0 * fine_l - coarse_l) / 3.0
            } else {
                fine_l
            };
            Ok(Level {
                n,
                lambda,
                energy: spec.energy_from_lambda(lambda),
                lambda_coarse: coarse_l,
                lambda_fine: fine_l,
                samples: fine_matrix.eigenvector(fine_l)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EigenResult {
        problem: *spec,
        levels,
        grid: fine,
        extrapolated: policy.extrapolate,
        clipped,
    })
}

/// Extend the coarse grid by a quarter of its width on each free side, keeping
/// the spacing, and require the spectrum to stay put.
fn check_truncation(
    spec: &ProblemSpec,
    grid: &Grid,
    k: usize,
    reference: &[f64],
    tol: f64,
) -> Result<()> {
    let h = grid.spacing();
    let extra = (grid.n + 1).div_ceil(4);
    let left_free = match spec.potential().left_endpoint() {
        Some(end) => grid.x_min - extra as f64 * h > end,
        None => true,
    };
    let (left, right) = if left_free {
        (extra, extra)
    } else {
        (0, 2 * extra)
    };
    let extended = Grid::new(
        grid.x_min - left as f64 * h,
        grid.x_max + right as f64 * h,
        grid.n + left + right,
    )?;
    let wider = solve_on_grid(spec, &extended, k)?;
    for (n, (a, b)) in reference.iter().zip(&wider).enumerate() {
        if (a - b).abs() > tol * a.abs().max(1.0) {
            return Err(Error::Truncation(format!(
                "{} level {n} moved from {a} to {b} when the domain grew to [{}, {}]",
                spec.kind, extended.x_min, extended.x_max
            )));
        }
    }
    Ok(())
}

/// WKB decay exponent required beyond the outermost turning point.
const DECAY_ACTION: f64 = 30.0;
const ESTIMATE_NODES: usize = 400;
const MAX_REACH_LENGTHS: f64 = 60.0;

/// Pick `(x_min, x_max)` so that `V >= 3 lambda_k` at every truncated end and
/// the wavefunction of level `k - 1` has decayed by `exp(-30)` there.
fn choose_domain(spec: &ProblemSpec, k: usize, clip: Option<f64>) -> Result<(f64, f64, bool)> {
    let v = spec.potential();
    let length = v.quadratic_coefficient().powf(-0.25);
    let endpoint = v.left_endpoint();

    // rough estimate of lambda_{k-1} on a generous domain
    let reach = length * ((4.0 * k as f64 + 4.0).sqrt() + 6.0);
    let mut lo = endpoint.map_or(-reach, |e| e.max(-reach));
    let mut hi = reach;
    if let Some(c) = clip {
        lo = lo.max(-c);
        hi = hi.min(c);
    }
    let rough = Grid::new(lo, hi, ESTIMATE_NODES)?;
    let estimate = solve_on_grid(spec, &rough, k)?[k - 1] * 1.05;

    let step = length / 200.0;
    let right = march(
        &v,
        estimate,
        0.0f64.max(endpoint.unwrap_or(0.0)),
        step,
        None,
    );
    let left = match endpoint {
        Some(e) if e >= 0.0 => e,
        _ => march(&v, estimate, 0.0, -step, endpoint),
    };

    let mut clipped = false;
    let (mut x_min, mut x_max) = (left, right);
    if let Some(c) = clip {
        if x_min < -c {
            x_min = -c;
            clipped = true;
        }
        if x_max > c {
            x_max = c;
            clipped = true;
        }
    }
    Ok((x_min, x_max, clipped))
}

/// Walk from `start` in direction `step` until both the decay and the
/// `V >= 3 lambda` conditions hold, or the hard endpoint `stop` is reached.
fn march(v: &Potential, lambda: f64, start: f64, step: f64, stop: Option<f64>) -> f64 {
    let mut x = start;
    let mut action = 0.0;
    // odd truncations are unbounded below; give up after a generous distance
    let cap = start + step * 200.0 * MAX_REACH_LENGTHS;
    loop {
        if (x - cap) * step.signum() >= 0.0 {
            return cap;
        }
        let next = x + step;
        if let Some(s) = stop {
            if next <= s {
                return s;
            }
        }
        let excess = v.value(0.5 * (x + next)) - lambda;
        if excess > 0.0 {
            action += excess.sqrt() * step.abs();
        }
        x = next;
        if action >= DECAY_ACTION && v.value(x) >= 3.0 * lambda {
            return x;
        }
    }
}

/// Sign changes of a sampled function, ignoring numerically zero samples.
pub fn count_sign_changes(samples: &[f64]) -> usize {
    let max = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0f64;
    let mut changes = 0;
    for &s in samples.iter().filter(|s| s.abs() > SIGNIFICANT * max) {
        if last != 0.0 && s.signum() != last.signum() {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Raw eigenvalues on three nested grids and the observed error ratios
/// `(L_h - L_{h/2}) / (L_{h/2} - L_{h/4})`, which tend to 4 for an `O(h^2)`
/// discretization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub grids: [Grid; 3],
    pub lambdas: [Vec<f64>; 3],
    pub ratios: Vec<f64>,
}

pub fn convergence_ratios(
    spec: &ProblemSpec,
    k: usize,
    policy: &ResolutionPolicy,
) -> Result<ConvergenceReport> {
    let (x_min, x_max) = match policy.domain {
        Some(d) => d,
        None => {
            let (a, b, _) = choose_domain(spec, k, policy.clip)?;
            (a, b)
        }
    };
    let g0 = Grid::new(x_min, x_max, policy.grid_n)?;
    let g1 = g0.refined();
    let g2 = g1.refined();
    let l0 = solve_on_grid(spec, &g0, k)?;
    let l1 = solve_on_grid(spec, &g1, k)?;
    let l2 = solve_on_grid(spec, &g2, k)?;
    let ratios = (0..k).map(|n| (l0[n] - l1[n]) / (l1[n] - l2[n])).collect();
    Ok(ConvergenceReport {
        grids: [g0, g1, g2],
        lambdas: [l0, l1, l2],
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::PhysicalParams;
    use crate::numeric::assemble_with;

    fn unit() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn half_line_spectrum() {
        let spec = ProblemSpec::half_line(unit()).unwrap();
        let res = solve(&spec, 3, &ResolutionPolicy::default()).unwrap();
        for (n, e) in res.energies().iter().enumerate() {
            assert!(rel(*e, 2.0 * (n as f64 + 1.0)) < 1e-6, "n={n} e={e}");
        }
        assert!(res.extrapolated);
    }

    #[test]
    fn coupled_branches() {
        let p = PhysicalParams::with_coupling(0.6).unwrap();
        let r = solve(
            &ProblemSpec::coupled_y2(p).unwrap(),
            1,
            &ResolutionPolicy::default(),
        )
        .unwrap();
        assert!(rel(r.energies()[0], 0.158_113_883_008_418_98) < 1e-6);
        let r = solve(
            &ProblemSpec::coupled_y1(p).unwrap(),
            2,
            &ResolutionPolicy::default(),
        )
        .unwrap();
        assert!(rel(r.energies()[0], 1.264_911_064_067_351_7) < 1e-6);
        assert!(rel(r.energies()[1], 2.529_822_128_134_703_5) < 1e-6);
    }

    #[test]
    fn moving_endpoint_at_zero_is_half_line() {
        let a = solve(
            &ProblemSpec::half_line(unit()).unwrap(),
            3,
            &ResolutionPolicy::default(),
        )
        .unwrap();
        let b = solve(
            &ProblemSpec::moving_endpoint(unit(), 0.0).unwrap(),
            3,
            &ResolutionPolicy::default(),
        )
        .unwrap();
        for (x, y) in a.energies().iter().zip(b.energies()) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn eigenvectors_have_n_nodes_and_unit_norm() {
        let spec = ProblemSpec::half_line(unit()).unwrap();
        let res = solve(&spec, 4, &ResolutionPolicy::with_grid_n(800)).unwrap();
        let h = res.grid.spacing();
        for level in &res.levels {
            assert_eq!(count_sign_changes(&level.samples), level.n);
            let norm: f64 = h * level.samples.iter().map(|x| x * x).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12);
            assert!(level.samples.iter().find(|x| x.abs() > 1e-6).unwrap() > &0.0);
        }
    }

    #[test]
    fn potential_shift_moves_spectrum_by_one() {
        let grid = Grid::new(-6.0, 6.0, 200).unwrap();
        let a = assemble_with(&grid, |x| x * x)
            .lowest_eigenvalues(5)
            .unwrap();
        let b = assemble_with(&grid, |x| x * x + 1.0)
            .lowest_eigenvalues(5)
            .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 1.0).abs() < 1e-10);
        }
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn explicit_domain_is_respected() {
        let spec = ProblemSpec::coupled_y2(PhysicalParams::with_coupling(0.2).unwrap()).unwrap();
        let policy = ResolutionPolicy {
            domain: Some((-8.0, 8.0)),
            grid_n: 500,
            ..Default::default()
        };
        let r = solve(&spec, 1, &policy).unwrap();
        assert_eq!((r.grid.x_min, r.grid.x_max), (-8.0, 8.0));
        assert_eq!(r.grid.n, 1001);
    }

    #[test]
    fn too_small_domain_fails_truncation_check() {
        let spec = ProblemSpec::coupled_y2(PhysicalParams::with_coupling(0.2).unwrap()).unwrap();
        let grid = Grid::new(-1.5, 1.5, 300).unwrap();
        let lc = solve_on_grid(&spec, &grid, 2).unwrap();
        assert!(matches!(
            check_truncation(&spec, &grid, 2, &lc, 1e-8),
            Err(Error::Truncation(_))
        ));
    }

    #[test]
    fn smooth_problem_converges_at_second_order() {
        let spec = ProblemSpec::coupled_y2(PhysicalParams::with_coupling(0.6).unwrap()).unwrap();
        let rep = convergence_ratios(&spec, 3, &ResolutionPolicy::with_grid_n(400)).unwrap();
        for r in rep.ratios {
            assert!((r - 4.0).abs() < 0.05, "{r}");
        }
    }

    #[test]
    fn sign_changes() {
        assert_eq!(count_sign_changes(&[0.0, 1.0, 2.0, -1.0, 0.0, 3.0]), 2);
        assert_eq!(count_sign_changes(&[0.0; 4]), 0);
    }
}
