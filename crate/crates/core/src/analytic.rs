//! Closed-form eigenpairs.
//!
//! Three branches are solved exactly:
//!
//! * the half harmonic oscillator, `E_n = 2(n+1) hbar omega`, with
//!   eigenfunctions `x^{3/2} exp(-a x^2 / 2) 1F1(-n; 2; a x^2)`;
//! * the `y1` normal mode of the coupled system, the same functional form at
//!   the stiffened scale `alpha1`;
//! * the `y2` normal mode, an ordinary Hermite oscillator at scale `alpha2`.
//!
//! Quantum numbers start at `n = 0` on every branch.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::classical::PhysicalParams;
use crate::error::Result;
use crate::specfun::{confluent_1f1_neg, hermite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    HalfHo,
    CoupledY1,
    CoupledY2,
}

impl Branch {
    /// Whether the branch lives on the half line `x > 0`.
    pub fn is_half_line(self) -> bool {
        !matches!(self, Branch::CoupledY2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub n: usize,
    pub energy: f64,
    pub branch: Branch,
    pub params: PhysicalParams,
    /// Inverse squared length entering the wavefunction (`m omega / hbar`,
    /// `alpha1` or `alpha2`).
    scale: f64,
}

impl EigenPair {
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn wavefunction(&self, x: f64) -> f64 {
        eval_wavefunction(self, x)
    }
}

/// Pointwise eigenfunction value; half-line branches are zero for `x <= 0`.
pub fn eval_wavefunction(pair: &EigenPair, x: f64) -> f64 {
    let a = pair.scale;
    match pair.branch {
        Branch::HalfHo | Branch::CoupledY1 => {
            if x <= 0.0 {
                return 0.0;
            }
            let u = a * x * x;
            (2.0 * (pair.n as f64 + 1.0)).sqrt()
                * a
                * x.powf(1.5)
                * (-0.5 * u).exp()
                * confluent_1f1_neg(pair.n, 2.0, u)
        }
        Branch::CoupledY2 => {
            let n = pair.n;
            // (sqrt(a) / (2^n n! sqrt(pi)))^{1/2}, built up incrementally.
            let mut norm_sq = a.sqrt() / PI.sqrt();
            for k in 1..=n {
                norm_sq /= 2.0 * k as f64;
            }
            norm_sq.sqrt() * (-0.5 * a * x * x).exp() * hermite(n, a.sqrt() * x)
        }
    }
}

/// Half harmonic oscillator level `n`: `E = 2(n+1) hbar omega`.
pub fn half_ho_eigen(n: usize, params: &PhysicalParams) -> Result<EigenPair> {
    params.validate()?;
    Ok(EigenPair {
        n,
        energy: half_ho_energy(n, params),
        branch: Branch::HalfHo,
        params: *params,
        scale: params.inverse_length_sq(),
    })
}

pub fn half_ho_energy(n: usize, params: &PhysicalParams) -> f64 {
    2.0 * (n as f64 + 1.0) * params.hbar * params.omega
}

/// `y1` normal mode: `E = (n+1) hbar omega sqrt(1 + g / (m omega^2))`.
pub fn coupled_y1_eigen(n: usize, params: &PhysicalParams) -> Result<EigenPair> {
    params.require_positive_coupling()?;
    Ok(EigenPair {
        n,
        energy: coupled_y1_energy(n, params),
        branch: Branch::CoupledY1,
        params: *params,
        scale: params.alpha1(),
    })
}

pub fn coupled_y1_energy(n: usize, params: &PhysicalParams) -> f64 {
    (n as f64 + 1.0) * params.hbar * params.omega * (1.0 + params.g / params.spring()).sqrt()
}

/// `y2` normal mode: `E = (n + 1/2) (hbar omega / 2) sqrt(1 - g / (m omega^2))`.
pub fn coupled_y2_eigen(n: usize, params: &PhysicalParams) -> Result<EigenPair> {
    params.require_positive_coupling()?;
    Ok(EigenPair {
        n,
        energy: coupled_y2_energy(n, params),
        branch: Branch::CoupledY2,
        params: *params,
        scale: params.alpha2(),
    })
}

pub fn coupled_y2_energy(n: usize, params: &PhysicalParams) -> f64 {
    (n as f64 + 0.5) * 0.5 * params.hbar * params.omega * (1.0 - params.g / params.spring()).sqrt()
}

pub fn branch_eigen(branch: Branch, n: usize, params: &PhysicalParams) -> Result<EigenPair> {
    match branch {
        Branch::HalfHo => half_ho_eigen(n, params),
        Branch::CoupledY1 => coupled_y1_eigen(n, params),
        Branch::CoupledY2 => coupled_y2_eigen(n, params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompositeLevel {
    pub n1: usize,
    pub n2: usize,
    pub energy: f64,
}

#[derive(PartialEq)]
struct HeapKey(f64, usize, usize);

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// The `count` lowest levels `E_{y1,n1} + E_{y2,n2}`, ascending, ties broken
/// by `(n1, n2)`.
///
/// Each row `n1` is increasing in `n2`, so the rows are merged with a heap.
pub fn composite_spectrum(params: &PhysicalParams, count: usize) -> Result<Vec<CompositeLevel>> {
    params.require_positive_coupling()?;
    if count == 0 {
        return Err(crate::error::Error::validation(
            "count",
            "must be at least 1",
        ));
    }
    let level = |n1: usize, n2: usize| {
        HeapKey(
            coupled_y1_energy(n1, params) + coupled_y2_energy(n2, params),
            n1,
            n2,
        )
    };

    let mut heap = BinaryHeap::new();
    heap.push(Reverse(level(0, 0)));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let Reverse(HeapKey(energy, n1, n2)) = heap.pop().expect("heap always has a frontier");
        out.push(CompositeLevel { n1, n2, energy });
        heap.push(Reverse(level(n1, n2 + 1)));
        // open the next row when its head is first needed
        if n2 == 0 {
            heap.push(Reverse(level(n1 + 1, 0)));
        }
    }
    Ok(out)
}
