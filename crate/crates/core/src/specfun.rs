//! Polynomial special functions and half-line quadrature.
//!
//! Every polynomial is evaluated by its three-term recurrence, never by an
//! explicit factorial sum, so degrees well past 64 stay finite.

use crate::error::{Error, Result};

/// Terminating Kummer series `1F1(-n; b; z)`.
///
/// Uses the contiguous recurrence in `n`,
/// `(n + b) M_{n+1} = (2n + b - z) M_n - n M_{n-1}`, with `M_0 = 1` and
/// `M_1 = 1 - z / b`.
pub fn confluent_1f1_neg(n: usize, b_param: f64, z: f64) -> f64 {
    debug_assert!(b_param > 0.0);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 - z / b_param;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + b_param - z) * cur - kf * prev) / (kf + b_param);
        prev = cur;
        cur = next;
    }
    cur
}

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Associated Laguerre polynomial `L_n^(alpha)(z)` for `alpha > -1`.
pub fn laguerre_assoc(n: usize, alpha: f64, z: f64) -> f64 {
    debug_assert!(alpha > -1.0);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - z) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Generalized binomial coefficient `C(n + alpha, n)`.
pub fn binomial_shifted(n: usize, alpha: f64) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * (k as f64 + alpha) / k as f64)
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

const MAX_PANELS: usize = 4000;
const INITIAL_PANELS: usize = 16;

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::validation(
            "tol",
            "quadrature tolerance must be positive",
        ));
    }
    if a == b {
        return Ok(0.0);
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels: Vec<Panel> = (0..INITIAL_PANELS)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == INITIAL_PANELS {
                b
            } else {
                lo + width
            };
            gauss_kronrod15(&f, lo, hi)
        })
        .collect();

    loop {
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "error estimate {err:.3e} above {tol:.3e} after {MAX_PANELS} panels on [{a}, {b}]"
            )));
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("panel list is never empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(gauss_kronrod15(&f, p.a, mid));
        panels.push(gauss_kronrod15(&f, mid, p.b));
    }
}

/// Integral of `f` over `[lower, inf)` for integrands with a Gaussian envelope
/// `exp(-(x / decay_scale)^2)` centred at the origin.
///
/// The domain is cut where the envelope drops below `tol / 100` and then
/// extended panel by panel while the tail still contributes more than that.
/// A very negative `lower` is clipped symmetrically.
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    decay_scale: f64,
    tol: f64,
) -> Result<f64> {
    if !(decay_scale > 0.0) {
        return Err(Error::validation("decay_scale", "must be positive"));
    }
    if !(tol > 0.0) {
        return Err(Error::validation(
            "tol",
            "quadrature tolerance must be positive",
        ));
    }
    let floor = tol / 100.0;
    let reach = decay_scale * (100.0 / tol).ln().max(1.0).sqrt();
    let step = decay_scale;

    let mut upper = reach.max(lower + step);
    let mut guard = 0;
    while gauss_kronrod15(&f, upper, upper + step).value.abs() > floor {
        upper += step;
        guard += 1;
        if guard > 1000 {
            return Err(Error::Quadrature(
                "integrand does not decay on the right".into(),
            ));
        }
    }

    let mut start = lower;
    if lower < -reach {
        start = -reach;
        guard = 0;
        while start - step > lower && gauss_kronrod15(&f, start - step, start).value.abs() > floor {
            start -= step;
            guard += 1;
            if guard > 1000 {
                return Err(Error::Quadrature(
                    "integrand does not decay on the left".into(),
                ));
            }
        }
    }

    integrate_interval(f, start, upper, tol)
}
