//! The invariant suite behind `affine-osc check`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{
    branch_eigen, composite_spectrum, coupled_y1_energy, coupled_y2_energy, half_ho_energy, Branch,
    EigenPair,
};
use crate::classical::{
    bracket_step, from_normal, hamiltonian_affine, hamiltonian_normal, hamiltonian_original,
    observables as obs, poisson_bracket, to_normal, DilationValue, PhaseSpacePoint, PhysicalParams,
};
use crate::error::Result;
use crate::interp::{b_sweep, order0_shift, DEFAULT_B_VALUES, EXPANSION_CLIP};
use crate::numeric::{
    assemble_with, commutator_residual, convergence_ratios, count_sign_changes, solve,
    BracketConvention, Grid, ProblemKind, ProblemSpec, ResolutionPolicy,
};
use crate::specfun::{confluent_1f1_neg, hermite, integrate_halfline, laguerre_assoc};

const SEED: u64 = 0x5eed_affe;
const RANDOM_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// A property either holds (with a summary) or fails (with the reason).
type Verdict = std::result::Result<String, String>;

type EnergyFormula = fn(usize, &PhysicalParams) -> f64;
type Observable<'a> = &'a dyn Fn(&PhaseSpacePoint) -> f64;

fn outcome(name: &'static str, verdict: Result<Verdict>) -> Outcome {
    let (passed, detail) = match verdict {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    Outcome {
        name,
        passed,
        detail,
    }
}

fn bound(what: &str, worst: f64, tol: f64) -> Verdict {
    if worst <= tol {
        Ok(format!("max {what} {worst:.3e} <= {tol:.1e}"))
    } else {
        Err(format!("max {what} {worst:.3e} exceeds {tol:.1e}"))
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn coupled_params() -> PhysicalParams {
    PhysicalParams::with_coupling(0.6).expect("valid coupling")
}

fn random_point(rng: &mut ChaCha8Rng, lo: f64) -> PhaseSpacePoint {
    PhaseSpacePoint::original(
        rng.gen_range(lo..5.0),
        rng.gen_range(lo..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
    )
    .expect("sampled inside the quarter plane")
}

fn random_params(rng: &mut ChaCha8Rng) -> PhysicalParams {
    let m = rng.gen_range(0.5..2.0);
    let omega = rng.gen_range(0.5..2.0);
    let g = rng.gen_range(-0.95..0.95) * m * omega * omega;
    PhysicalParams::new(m, omega, rng.gen_range(0.5..2.0), g)
        .expect("sampled inside the valid range")
}

pub fn frame_round_trip() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_POINTS {
        let p = random_point(&mut rng, 0.0);
        let back = from_normal(&to_normal(&p)?)?;
        if back.frame != p.frame {
            return Ok(Err(format!("{p:?} came back in frame {:?}", back.frame)));
        }
        let (q, m) = (p.q1.abs().max(p.q2.abs()), p.p1.abs().max(p.p2.abs()));
        for (a, b, scale) in [
            (p.q1, back.q1, q),
            (p.q2, back.q2, q),
            (p.p1, back.p1, m),
            (p.p2, back.p2, m),
        ] {
            worst = worst.max((a - b).abs() / (scale * f64::EPSILON).max(f64::MIN_POSITIVE));
        }
    }
    Ok(bound("defect in ulps", worst, 2.0))
}

pub fn hamiltonian_equivalence() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_POINTS {
        let params = random_params(&mut rng);
        let p = random_point(&mut rng, 0.0);
        let h = hamiltonian_original(&p, &params)?;
        worst = worst.max(rel(hamiltonian_normal(&to_normal(&p)?, &params)?, h));
    }
    Ok(bound("relative difference", worst, 1e-12))
}

pub fn affine_identity() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut worst = 0.0f64;
    for _ in 0..RANDOM_POINTS {
        let params = random_params(&mut rng);
        let y = to_normal(&random_point(&mut rng, 0.01))?;
        let affine = hamiltonian_affine(y.q1, DilationValue(y.p1 * y.q1), y.q2, y.p2, &params)?;
        worst = worst.max(rel(affine, hamiltonian_normal(&y, &params)?));
    }
    Ok(bound("relative difference", worst, 1e-12))
}

pub fn bracket_table() -> Result<Verdict> {
    type Obs = fn(&PhaseSpacePoint) -> f64;
    let zero = |_: &PhaseSpacePoint| 0.0;
    let two = |_: &PhaseSpacePoint| 2.0;
    let table: [(&str, Obs, Obs, Observable); 7] = [
        ("{x1,p_x1}", obs::x1, obs::p_x1, &|_| 1.0),
        ("{x2,p_x2}", obs::x2, obs::p_x2, &|_| 1.0),
        ("{y1,p_y1}", obs::y1, obs::p_y1, &two),
        ("{y2,p_y2}", obs::y2, obs::p_y2, &two),
        ("{y1,d_y1}", obs::y1, obs::d_y1, &|p| 2.0 * obs::y1(p)),
        ("{y1,p_y2}", obs::y1, obs::p_y2, &zero),
        ("{y2,p_y1}", obs::y2, obs::p_y1, &zero),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    for _ in 0..200 {
        let p = random_point(&mut rng, 0.5);
        let h = [p.q1, p.q2, p.p1, p.p2]
            .into_iter()
            .map(bracket_step)
            .fold(0.0, f64::max);
        let tol = 10.0 * h * h;
        for (name, f, g, expected) in &table {
            let got = poisson_bracket(f, g, &p)?;
            let want = expected(&p);
            if (got - want).abs() > tol {
                return Ok(Err(format!("{name} = {got} at {p:?}, expected {want}")));
            }
        }
    }
    Ok(Ok("7 brackets at 200 points within 10 h_fd^2".into()))
}

pub fn hermite_parity() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    for n in 0..=30 {
        for _ in 0..20 {
            let x = rng.gen_range(-3.0..3.0);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let (a, b) = (hermite(n, -x), sign * hermite(n, x));
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(bound("parity defect", worst, 0.0))
}

pub fn hermite_recurrence() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst = 0.0f64;
    for n in 1..30 {
        let x = rng.gen_range(-3.0..3.0);
        let lhs = hermite(n + 1, x);
        let rhs = 2.0 * x * hermite(n, x) - 2.0 * n as f64 * hermite(n - 1, x);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    Ok(bound("relative defect", worst, 1e-12))
}

pub fn laguerre_confluent_identity() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let z = rng.gen_range(0.0..50.0);
        for n in 0..=20 {
            let a = confluent_1f1_neg(n, 2.0, z);
            let b = laguerre_assoc(n, 1.0, z) / (n as f64 + 1.0);
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
        }
    }
    Ok(bound("relative difference", worst, 1e-12))
}

pub fn laguerre_orthogonality() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for m in 0..=8 {
        for n in m..=8 {
            // t = u^2 turns e^{-t} into a Gaussian envelope
            let v = integrate_halfline(
                |u: f64| {
                    let t = u * u;
                    2.0 * u * (-t).exp() * t * laguerre_assoc(m, 1.0, t) * laguerre_assoc(n, 1.0, t)
                },
                0.0,
                1.0,
                1e-11,
            )?;
            let want = if m == n { n as f64 + 1.0 } else { 0.0 };
            worst = worst.max((v - want).abs());
        }
    }
    Ok(bound("deviation", worst, 1e-8))
}

fn branch_states(branch: Branch, params: &PhysicalParams, count: usize) -> Result<Vec<EigenPair>> {
    (0..count)
        .map(|n| branch_eigen(branch, n, params))
        .collect()
}

fn overlap(a: &EigenPair, b: &EigenPair) -> Result<f64> {
    let lower = if a.branch.is_half_line() {
        0.0
    } else {
        f64::NEG_INFINITY
    };
    integrate_halfline(
        |x| a.wavefunction(x) * b.wavefunction(x),
        lower,
        a.scale().sqrt().recip(),
        1e-11,
    )
}

const BRANCHES: [Branch; 3] = [Branch::HalfHo, Branch::CoupledY1, Branch::CoupledY2];

pub fn gram_matrices() -> Result<Verdict> {
    let params = coupled_params();
    let mut worst = 0.0f64;
    for branch in BRANCHES {
        let states = branch_states(branch, &params, 6)?;
        for (i, a) in states.iter().enumerate() {
            for b in &states[i..] {
                let want = if a.n == b.n { 1.0 } else { 0.0 };
                worst = worst.max((overlap(a, b)? - want).abs());
            }
        }
    }
    Ok(bound("|G - I|", worst, 1e-8))
}

pub fn analytic_node_counts() -> Result<Verdict> {
    let params = coupled_params();
    for branch in BRANCHES {
        for pair in branch_states(branch, &params, 9)? {
            let reach = 12.0 / pair.scale().sqrt();
            let lo = if branch.is_half_line() { 0.0 } else { -reach };
            let samples: Vec<f64> = (1..20_000)
                .map(|j| pair.wavefunction(lo + (reach - lo) * j as f64 / 20_000.0))
                .collect();
            let nodes = count_sign_changes(&samples);
            if nodes != pair.n {
                return Ok(Err(format!("{branch:?} n={} has {nodes} nodes", pair.n)));
            }
        }
    }
    Ok(Ok("n nodes for n <= 8 on every branch".into()))
}

pub fn equal_spacing() -> Result<Verdict> {
    let params = coupled_params();
    let hw = params.hbar * params.omega;
    let k = params.spring();
    let steps: [(EnergyFormula, f64); 3] = [
        (half_ho_energy, 2.0 * hw),
        (coupled_y1_energy, hw * (1.0 + params.g / k).sqrt()),
        (coupled_y2_energy, 0.5 * hw * (1.0 - params.g / k).sqrt()),
    ];
    let mut worst = 0.0f64;
    for (energy, step) in steps {
        for n in 0..20 {
            let gap = energy(n + 1, &params) - energy(n, &params);
            worst = worst.max((gap - step).abs() / (energy(n + 1, &params) * f64::EPSILON));
        }
    }
    Ok(bound("defect in ulps", worst, 8.0))
}

/// `lambda * phi + phi''` against the potential term, by central differences.
fn ode_defect(pair: &EigenPair, x: f64, h: f64) -> f64 {
    let p = &pair.params;
    let phi = |x| pair.wavefunction(x);
    let second = (phi(x + h) - 2.0 * phi(x) + phi(x - h)) / (h * h);
    let (v, rhs) = match pair.branch {
        Branch::HalfHo => {
            let a = p.inverse_length_sq();
            (
                0.75 / (x * x) + a * a * x * x,
                2.0 * p.m * pair.energy / (p.hbar * p.hbar),
            )
        }
        Branch::CoupledY1 => {
            let a = p.alpha1();
            (
                0.75 / (x * x) + a * a * x * x,
                4.0 * p.m * pair.energy / (p.hbar * p.hbar),
            )
        }
        Branch::CoupledY2 => {
            let a = p.alpha2();
            (a * a * x * x, 4.0 * p.m * pair.energy / (p.hbar * p.hbar))
        }
    };
    (-second + v * phi(x) - rhs * phi(x)).abs()
}

pub fn ode_residual() -> Result<Verdict> {
    let params = coupled_params();
    let mut ratios = Vec::new();
    for branch in BRANCHES {
        for pair in branch_states(branch, &params, 4)? {
            let worst = |h: f64| {
                [0.4, 0.9, 1.3, 2.1]
                    .into_iter()
                    .map(|x| ode_defect(&pair, x, h))
                    .fold(0.0, f64::max)
            };
            ratios.push(worst(0.02) / worst(0.01));
        }
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), r| (l.min(*r), h.max(*r)));
    if lo >= 3.6 && hi <= 4.4 {
        Ok(Ok(format!(
            "halving h divides the residual by {lo:.3}..{hi:.3}"
        )))
    } else {
        Ok(Err(format!(
            "residual ratios {lo:.3}..{hi:.3} not second order"
        )))
    }
}

pub fn weak_coupling_limit() -> Result<Verdict> {
    let params = PhysicalParams::with_coupling(1e-8)?;
    let mut worst = 0.0f64;
    for n in 0..8 {
        let nf = n as f64;
        worst = worst.max((coupled_y1_energy(n, &params) - (nf + 1.0)).abs());
        worst = worst.max((coupled_y2_energy(n, &params) - 0.5 * (nf + 0.5)).abs());
    }
    Ok(bound("distance from the g = 0 levels", worst, 1e-7))
}

fn spectrum_cases() -> Result<Vec<(ProblemSpec, EnergyFormula)>> {
    let params = coupled_params();
    Ok(vec![
        (
            ProblemSpec::half_line(PhysicalParams::default())?,
            half_ho_energy as EnergyFormula,
        ),
        (ProblemSpec::coupled_y1(params)?, coupled_y1_energy),
        (ProblemSpec::coupled_y2(params)?, coupled_y2_energy),
    ])
}

pub fn numeric_spectra() -> Result<Verdict> {
    let mut worst = 0.0f64;
    let mut bad_nodes = Vec::new();
    for (spec, exact) in spectrum_cases()? {
        let result = solve(&spec, 4, &ResolutionPolicy::default())?;
        for level in &result.levels {
            worst = worst.max(rel(level.energy, exact(level.n, &spec.params)));
            if count_sign_changes(&level.samples) != level.n {
                bad_nodes.push(format!("{} n={}", spec.kind, level.n));
            }
        }
    }
    if !bad_nodes.is_empty() {
        return Ok(Err(format!(
            "wrong node count for {}",
            bad_nodes.join(", ")
        )));
    }
    Ok(bound("relative error", worst, 1e-6))
}

pub fn convergence_order() -> Result<Verdict> {
    let unit = PhysicalParams::default();
    let coupled = coupled_params();
    let specs = [
        ProblemSpec::half_line(unit)?,
        ProblemSpec::coupled_y1(coupled)?,
        ProblemSpec::coupled_y2(coupled)?,
        ProblemSpec::moving_endpoint(unit, 1.0)?,
        ProblemSpec::truncated(unit, 5.0, 2)?,
    ];
    let mut spans = Vec::new();
    for spec in &specs {
        let clip = (spec.kind == ProblemKind::Truncated).then_some(EXPANSION_CLIP * 5.0);
        let policy = ResolutionPolicy {
            clip,
            ..ResolutionPolicy::with_grid_n(500)
        };
        let report = convergence_ratios(spec, 4, &policy)?;
        for r in &report.ratios {
            if !(3.6..=4.4).contains(r) {
                return Ok(Err(format!(
                    "{} ratio {r:.4} outside [3.6, 4.4]",
                    spec.kind
                )));
            }
        }
        let lo = report.ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = report.ratios.iter().copied().fold(0.0, f64::max);
        spans.push(format!("{} {lo:.2}..{hi:.2}", spec.kind));
    }
    Ok(Ok(spans.join(", ")))
}

pub fn potential_shift() -> Result<Verdict> {
    let grid = Grid::new(-8.0, 8.0, 800)?;
    let base = assemble_with(&grid, |x| x * x).lowest_eigenvalues(6)?;
    let lifted = assemble_with(&grid, |x| x * x + 1.0).lowest_eigenvalues(6)?;
    let worst = base
        .iter()
        .zip(&lifted)
        .map(|(a, b)| (b - a - 1.0).abs())
        .fold(0.0, f64::max);
    if base.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(Err("eigenvalues not increasing".into()));
    }
    Ok(bound("shift defect", worst, 1e-10))
}

pub fn sweep_limits() -> Result<Verdict> {
    let unit = PhysicalParams::default();
    let policy = ResolutionPolicy::default();
    let sweep = b_sweep(&unit, &DEFAULT_B_VALUES, 4, &policy)?;
    let half = solve(&ProblemSpec::half_line(unit)?, 4, &policy)?;
    for (row, level) in sweep.rows.iter().filter(|r| r.b == 0.0).zip(&half.levels) {
        if (row.energy - level.energy).abs() > 1e-8 {
            return Ok(Err(format!(
                "b=0 level {} differs from the half oscillator",
                row.n
            )));
        }
        if row.dev_half > 1e-6 * 2.0 * (row.n as f64 + 1.0) {
            return Ok(Err(format!(
                "dev_half at b=0, n={} is {:.3e}",
                row.n, row.dev_half
            )));
        }
    }
    let ground: Vec<f64> = sweep
        .level(0)
        .filter(|r| r.b > 0.0)
        .map(|r| r.dev_full)
        .collect();
    if ground.windows(2).any(|w| w[1] >= w[0]) {
        return Ok(Err(format!(
            "ground-state dev_full not decreasing: {ground:?}"
        )));
    }
    let (first, last) = (ground[0], ground[ground.len() - 1]);
    if last > first / 10.0 {
        return Ok(Err(format!(
            "dev_full only fell from {first:.3e} to {last:.3e}"
        )));
    }
    Ok(Ok(format!("dev_full(n=0) {first:.3e} -> {last:.3e}")))
}

pub fn order0_shift_identity() -> Result<Verdict> {
    let unit = PhysicalParams::default();
    let mut worst = 0.0f64;
    for b in [5.0, 10.0] {
        let result = solve(
            &ProblemSpec::truncated(unit, b, 0)?,
            4,
            &ResolutionPolicy::default(),
        )?;
        for level in &result.levels {
            let exact = level.n as f64 + 0.5 + order0_shift(&unit, b);
            worst = worst.max((level.energy - exact).abs());
        }
    }
    Ok(bound("deviation", worst, 1e-6))
}

pub fn commutator_order() -> Result<Verdict> {
    let coarse = Grid::new(-8.0, 8.0, 399)?;
    let fine = coarse.refined();
    let f = |x: f64| (-(x - 0.5) * (x - 0.5)).exp();
    let mut ratios = Vec::new();
    for conv in [BracketConvention::Standard, BracketConvention::Doubled] {
        let a = commutator_residual(&coarse, f, 1.0, conv)?.max();
        let b = commutator_residual(&fine, f, 1.0, conv)?.max();
        ratios.push(a / b);
    }
    if ratios.iter().all(|r| (3.6..=4.4).contains(r)) {
        Ok(Ok(format!(
            "residual ratios {:.3}, {:.3}",
            ratios[0], ratios[1]
        )))
    } else {
        Ok(Err(format!("residual ratios {ratios:?} not second order")))
    }
}

pub fn composite_enumeration() -> Result<Verdict> {
    let params = coupled_params();
    let mut brute: Vec<(f64, usize, usize)> = (0..=40)
        .flat_map(|n1| (0..=40).map(move |n2| (n1, n2)))
        .map(|(n1, n2)| {
            (
                coupled_y1_energy(n1, &params) + coupled_y2_energy(n2, &params),
                n1,
                n2,
            )
        })
        .collect();
    brute.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let merged = composite_spectrum(&params, 20)?;
    for (level, want) in merged.iter().zip(&brute) {
        if (level.energy, level.n1, level.n2) != *want {
            return Ok(Err(format!("{level:?} where enumeration gives {want:?}")));
        }
    }
    Ok(Ok("20 lowest levels identical".into()))
}

type Property = (&'static str, fn() -> Result<Verdict>);

pub const PROPERTIES: [Property; 20] = [
    ("frame round-trip", frame_round_trip),
    ("hamiltonian equivalence", hamiltonian_equivalence),
    ("affine hamiltonian identity", affine_identity),
    ("poisson bracket table", bracket_table),
    ("hermite parity", hermite_parity),
    ("hermite recurrence", hermite_recurrence),
    ("laguerre-1f1 identity", laguerre_confluent_identity),
    ("laguerre orthogonality", laguerre_orthogonality),
    ("gram matrices", gram_matrices),
    ("analytic node counts", analytic_node_counts),
    ("equal spacing", equal_spacing),
    ("ode residual order", ode_residual),
    ("weak coupling limit", weak_coupling_limit),
    ("numeric vs analytic spectra", numeric_spectra),
    ("convergence order", convergence_order),
    ("potential shift", potential_shift),
    ("sweep limits", sweep_limits),
    ("order-0 shift identity", order0_shift_identity),
    ("commutator order", commutator_order),
    ("composite vs enumeration", composite_enumeration),
];

/// Every property, in a fixed order.
pub fn run_suite() -> Vec<Outcome> {
    PROPERTIES
        .iter()
        .map(|(name, f)| outcome(name, f()))
        .collect()
}
