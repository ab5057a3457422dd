//! Moving the hard endpoint from `0` to `-b` while keeping the oscillator
//! centred at the origin.
//!
//! At `b = 0` the problem is the half oscillator with levels `2(n+1) hbar omega`;
//! as `b` grows the spectrum approaches the full-line `(n + 1/2) hbar omega`.
//! [`b_sweep`] tabulates that crossover and [`truncated_sweep`] compares the
//! exact barrier with its large-`b` polynomial expansion.

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::PhysicalParams;
use crate::error::{Error, Result};
use crate::numeric::{solve, ProblemSpec, ResolutionPolicy};

/// Endpoint offsets in units of the oscillator length `sqrt(hbar / (m omega))`.
pub const DEFAULT_B_VALUES: [f64; 6] = [0.0, 1.0, 2.0, 5.0, 10.0, 20.0];

/// Fraction of `b` the truncated expansions are solved on.
pub const EXPANSION_CLIP: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub b: f64,
    pub n: usize,
    pub energy: f64,
    /// `|E - 2(n+1) hbar omega|`
    pub dev_half: f64,
    /// `|E - (n + 1/2) hbar omega|`
    pub dev_full: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub params: PhysicalParams,
    pub policy: ResolutionPolicy,
}

impl SweepResult {
    /// Rows of level `n`, ordered by `b`.
    pub fn level(&self, n: usize) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.n == n)
    }
}

fn validate_offsets(b_values: &[f64]) -> Result<()> {
    if b_values.is_empty() {
        return Err(Error::validation("b_values", "need at least one offset"));
    }
    if b_values.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::validation(
            "b_values",
            "offsets must be finite and nonnegative",
        ));
    }
    if b_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::validation(
            "b_values",
            "offsets must be strictly ascending",
        ));
    }
    Ok(())
}

/// Solve the moving-endpoint problem for every `b` and tabulate both deviations.
pub fn b_sweep(
    params: &PhysicalParams,
    b_values: &[f64],
    k: usize,
    policy: &ResolutionPolicy,
) -> Result<SweepResult> {
    params.validate()?;
    validate_offsets(b_values)?;
    if k == 0 {
        return Err(Error::validation("levels", "need at least one level"));
    }
    let hw = params.hbar * params.omega;

    let per_b: Vec<Vec<SweepRow>> = b_values
        .par_iter()
        .map(|&b| {
            let wrap = |e: Error| Error::AtOffset {
                b,
                source: Box::new(e),
            };
            let spec = ProblemSpec::moving_endpoint(*params, b).map_err(wrap)?;
            let result = solve(&spec, k, policy).map_err(wrap)?;
            Ok(result
                .levels
                .iter()
                .map(|l| SweepRow {
                    b,
                    n: l.n,
                    energy: l.energy,
                    dev_half: (l.energy - 2.0 * (l.n as f64 + 1.0) * hw).abs(),
                    dev_full: (l.energy - (l.n as f64 + 0.5) * hw).abs(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(SweepResult {
        rows: per_b.into_iter().flatten().collect(),
        params: *params,
        policy: *policy,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedRow {
    pub order: usize,
    pub n: usize,
    pub energy: f64,
    /// Same level of the exact moving-endpoint problem.
    pub energy_exact: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedSweep {
    pub b: f64,
    pub rows: Vec<TruncatedRow>,
    pub params: PhysicalParams,
    /// Validity caveats of the expansion for this run.
    pub warnings: Vec<String>,
}

/// Spectra of the truncated barrier expansion, order by order, next to the
/// exact moving-endpoint spectrum.
///
/// Orders `>= 1` are solved on `|x| <= 0.9 b`: odd truncations are unbounded
/// below, and the expansion only converges for `|x| < b`.
pub fn truncated_sweep(
    params: &PhysicalParams,
    b: f64,
    orders: &[usize],
    k: usize,
    policy: &ResolutionPolicy,
) -> Result<TruncatedSweep> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::validation(
            "b",
            format!("truncated expansion needs b > 0, got {b}"),
        ));
    }
    if orders.is_empty() {
        return Err(Error::validation(
            "orders",
            "need at least one expansion order",
        ));
    }
    let exact = solve(&ProblemSpec::moving_endpoint(*params, b)?, k, policy)?.energies();

    let solved: Vec<(usize, crate::numeric::EigenResult)> = orders
        .par_iter()
        .map(|&order| {
            let spec = ProblemSpec::truncated(*params, b, order)?;
            let policy = ResolutionPolicy {
                clip: (order >= 1).then_some(EXPANSION_CLIP * b),
                ..*policy
            };
            Ok((order, solve(&spec, k, &policy)?))
        })
        .collect::<Result<_>>()?;

    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for (order, result) in &solved {
        let (lo, hi) = (result.grid.x_min, result.grid.x_max);
        if result.clipped {
            warnings.push(format!(
                "order {order}: expansion assumes |x/b| < 1; domain clipped to [{lo:.6}, {hi:.6}]"
            ));
        } else if lo <= -b || hi >= b {
            warnings.push(format!(
                "order {order}: expansion assumes |x/b| < 1 but the solve domain is [{lo:.6}, {hi:.6}]"
            ));
        }
        for level in &result.levels {
            rows.push(TruncatedRow {
                order: *order,
                n: level.n,
                energy: level.energy,
                energy_exact: exact[level.n],
                abs_diff: (level.energy - exact[level.n]).abs(),
            });
        }
    }

    Ok(TruncatedSweep {
        b,
        rows,
        params: *params,
        warnings,
    })
}

/// Order-0 truncation is the full-line oscillator lifted by `3 hbar^2 / (8 m b^2)`.
pub fn order0_shift(params: &PhysicalParams, b: f64) -> f64 {
    3.0 * params.hbar * params.hbar / (8.0 * params.m * b * b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn policy() -> ResolutionPolicy {
        ResolutionPolicy::with_grid_n(1500)
    }

    #[test]
    fn sweep_rows_are_ordered_and_start_at_half_oscillator() {
        let p = PhysicalParams::default();
        let s = b_sweep(&p, &[0.0, 1.0, 5.0], 2, &policy()).unwrap();
        assert_eq!(s.rows.len(), 6);
        for n in 0..2 {
            let bs: Vec<f64> = s.level(n).map(|r| r.b).collect();
            assert_eq!(bs, vec![0.0, 1.0, 5.0]);
        }
        let r0 = s.level(0).next().unwrap();
        assert!(r0.dev_half <= 1e-6 * 2.0);
        assert!(s
            .rows
            .iter()
            .all(|r| r.dev_half >= 0.0 && r.dev_full >= 0.0));
    }

    #[test]
    fn sweep_rejects_bad_offsets() {
        let p = PhysicalParams::default();
        assert!(b_sweep(&p, &[1.0, 1.0], 1, &policy()).is_err());
        assert!(b_sweep(&p, &[-1.0], 1, &policy()).is_err());
        assert!(b_sweep(&p, &[], 1, &policy()).is_err());
        assert!(b_sweep(&p, &[0.0], 0, &policy()).is_err());
    }

    #[test]
    fn order_zero_is_shifted_oscillator() {
        let p = PhysicalParams::default();
        let t = truncated_sweep(&p, 5.0, &[0], 3, &policy()).unwrap();
        for row in &t.rows {
            let want = row.n as f64 + 0.5 + order0_shift(&p, 5.0);
            assert!((row.energy - want).abs() < 1e-6);
        }
    }

    #[test]
    fn higher_orders_are_clipped_and_warned() {
        let p = PhysicalParams::default();
        let t = truncated_sweep(&p, 3.0, &[2, 3], 1, &policy()).unwrap();
        assert_eq!(t.warnings.len(), 2);
        assert!(t.warnings.iter().all(|w| w.contains("clipped")));
        assert!(truncated_sweep(&p, 0.0, &[1], 1, &policy()).is_err());
    }
}
