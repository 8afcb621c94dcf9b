//! Four low-dimensional test families for the criterion `A_B > 0` and the
//! thresholds where their maxima change sign.
//!
//! | id | `û(0)` | `û(±1)` | `û(±2)` | params |
//! |----|--------|---------|---------|--------|
//! | 1  | 1      | r       | 0       | (r)    |
//! | 2  | 1      | r       | s       | (r, s) |
//! | 3  | 1      | p + iq  | 0       | (p, q) |
//! | 4  | 1      | p + iq  | p + iq  | (p, q) |

use std::f64::consts::FRAC_1_SQRT_2;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ascent::{AscentConfig, OptResult};
use crate::error::{param, Error, Result};
use crate::functional::a_functional;
use crate::spectral::FourierVector;

/// Half-extent of the start grid in every parameter.
pub const GRID_RADIUS: f64 = 2.0;
/// Spacing of the start grid.
pub const GRID_STEP: f64 = 0.1;
/// Upper end of the threshold scan.
pub const SCAN_MAX: f64 = 4.0;
/// Final bracket width of the threshold bisection.
pub const BISECT_WIDTH: f64 = 1e-4;

const SIMPLEX_SD_TOL: f64 = 1e-13;
const SIMPLEX_MAX_ITERS: u64 = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint {
    pub family_id: u8,
    pub params: Vec<f64>,
}

/// Number of real parameters of a family.
pub fn arity(family_id: u8) -> Result<usize> {
    match family_id {
        1 => Ok(1),
        2..=4 => Ok(2),
        _ => param(format!("family id must be 1, 2, 3 or 4, got {family_id}")),
    }
}

impl FamilyPoint {
    pub fn new(family_id: u8, params: Vec<f64>) -> Result<Self> {
        let n = arity(family_id)?;
        if params.len() != n {
            return param(format!(
                "family {family_id} takes {n} parameter(s), got {}",
                params.len()
            ));
        }
        if params.iter().any(|x| !x.is_finite()) {
            return param("family parameters must be finite");
        }
        Ok(Self { family_id, params })
    }
}

/// The (unnormalized) vector of a family point, on `[-1, 1]` or `[-2, 2]`.
pub fn family_vector(fp: &FamilyPoint) -> FourierVector {
    let one = Complex64::new(1.0, 0.0);
    let x = &fp.params;
    let coeffs = match fp.family_id {
        1 => {
            let r = Complex64::new(x[0], 0.0);
            vec![r, one, r]
        }
        2 => {
            let (r, s) = (Complex64::new(x[0], 0.0), Complex64::new(x[1], 0.0));
            vec![s, r, one, r, s]
        }
        3 => {
            let z = Complex64::new(x[0], x[1]);
            vec![z, one, z]
        }
        4 => {
            let z = Complex64::new(x[0], x[1]);
            vec![z, z, one, z, z]
        }
        id => panic!("invalid family id {id}"),
    };
    let half = (coeffs.len() / 2) as i64;
    FourierVector::new(-half, coeffs).expect("finite family coefficients")
}

fn sinc(x: f64) -> f64 {
    x.sin() / x
}

/// `A_B(w₁) = 4r² sinc(2B) − (1 + 2r⁴)`.
pub fn a_closed_w1(r: f64, b: f64) -> f64 {
    4.0 * r * r * sinc(2.0 * b) - (1.0 + 2.0 * r.powi(4))
}

/// `A_B(w₂)` with `sinc(2B)`, `sinc(4B)`, `sinc(6B)` and `sinc(8B)` terms.
pub fn a_closed_w2(r: f64, s: f64, b: f64) -> f64 {
    let r2 = r * r;
    4.0 * r2 * (1.0 + 2.0 * s) * sinc(2.0 * b)
        + 16.0 * r2 * s * sinc(4.0 * b)
        + 8.0 * r2 * s * s * sinc(6.0 * b)
        + 4.0 * s * s * sinc(8.0 * b)
        - (1.0 + 2.0 * r.powi(4) + 2.0 * s.powi(4))
}

fn a_at(family_id: u8, params: &[f64], b: f64) -> f64 {
    let fp = FamilyPoint {
        family_id,
        params: params.to_vec(),
    };
    a_functional(&family_vector(&fp), b).expect("family vectors are nonzero")
}

struct NegA {
    family_id: u8,
    b: f64,
}

impl CostFunction for NegA {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        // family 2 is unbounded above for small B; overflow yields NaN
        let a = a_at(self.family_id, x, self.b);
        Ok(if a.is_nan() { f64::INFINITY } else { -a })
    }
}

fn grid_points(dim: usize) -> Vec<Vec<f64>> {
    let k = (GRID_RADIUS / GRID_STEP).round() as i64;
    let axis: Vec<f64> = (-k..=k).map(|i| i as f64 * GRID_STEP).collect();
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..dim {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    pts
}

fn refine(family_id: u8, b: f64, start: &[f64]) -> Result<(Vec<f64>, f64, u64)> {
    let dim = start.len();
    let mut simplex = vec![start.to_vec()];
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += 0.5 * GRID_STEP;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(SIMPLEX_SD_TOL)
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let res = Executor::new(NegA { family_id, b }, solver)
        .configure(|s| s.max_iters(SIMPLEX_MAX_ITERS))
        .run()
        .map_err(|e| Error::Parameter(e.to_string()))?;
    let state = res.state();
    let best = state.best_param.clone().unwrap_or_else(|| start.to_vec());
    let value = match a_at(family_id, &best, b) {
        v if v.is_nan() => f64::INFINITY,
        v => v,
    };
    Ok((best, value, state.iter))
}

/// Symmetry representative: `r ≥ 0` for families 1 and 2 (only `r²` enters),
/// `p ≥ 0` for family 3 (`(p, q) ↦ (−p, −q)` is a half-period translation).
fn canonical_params(family_id: u8, mut x: Vec<f64>) -> Vec<f64> {
    match family_id {
        1 | 2 => x[0] = x[0].abs(),
        3 if x[0] < 0.0 || (x[0] == 0.0 && x[1] < 0.0) => {
            x[0] = -x[0];
            x[1] = -x[1];
        }
        _ => {}
    }
    x
}

/// Maximum of `A_B` over a family.
///
/// Every point of the grid `[-2, 2]^d` with spacing 0.1 is evaluated; the best
/// `cfg.restarts` distinct grid points then seed Nelder–Mead refinements of
/// `−A_B`. The trace records the running best after the grid and after each
/// refinement.
pub fn maximize_a_family(family_id: u8, b: f64, cfg: &AscentConfig) -> Result<OptResult<FamilyPoint>> {
    let dim = arity(family_id)?;
    if !(b > 0.0 && b.is_finite()) {
        return param(format!("B must be positive and finite, got {b}"));
    }
    cfg.validate()?;
    let mut scored: Vec<(f64, Vec<f64>)> = grid_points(dim)
        .into_iter()
        .map(|p| (a_at(family_id, &p, b), p))
        .collect();
    // stable sort keeps grid order among ties
    scored.sort_by(|x, y| y.0.total_cmp(&x.0));

    let mut best_x = scored[0].1.clone();
    let mut best_v = scored[0].0;
    let mut iterations = 0;
    let mut trace = vec![(0, best_v)];
    for (_, start) in scored.iter().take(cfg.restarts) {
        let (x, v, it) = refine(family_id, b, start)?;
        iterations += it as usize;
        if v > best_v {
            best_v = v;
            best_x = x;
        }
        trace.push((iterations, best_v));
    }
    Ok(OptResult {
        argmax: FamilyPoint::new(family_id, canonical_params(family_id, best_x))?,
        value: best_v,
        iterations,
        converged: true,
        trace,
    })
}

/// One row of a threshold sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub b: f64,
    pub family_id: u8,
    pub max_a: f64,
    pub argmax: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    /// Refined location of the last downward sign change of `m(B)`.
    pub threshold: f64,
    /// Maximizer at the positive end of the final bracket.
    pub argmax: Vec<f64>,
    pub sweep: Vec<SweepRow>,
    /// Other sign changes of `m`, as `(B_left, B_right)` scan brackets.
    pub anomalies: Vec<(f64, f64)>,
}

/// Threshold of a family: where `m(B) = max A_B` last turns from positive to
/// nonpositive on the scan `B = k·scan_step ≤ 4`, bisected to width `1e-4`.
pub fn threshold_b(family_id: u8, cfg: &AscentConfig, scan_step: f64) -> Result<ThresholdScan> {
    arity(family_id)?;
    if !(scan_step > 0.0 && scan_step <= 0.05) {
        return param(format!("scan_step must lie in (0, 0.05], got {scan_step}"));
    }
    cfg.validate()?;
    let count = (SCAN_MAX / scan_step + 1e-9).floor() as usize;
    let sweep: Vec<SweepRow> = (1..=count)
        .into_par_iter()
        .map(|k| {
            let b = k as f64 * scan_step;
            maximize_a_family(family_id, b, cfg).map(|r| SweepRow {
                b,
                family_id,
                max_a: r.value,
                argmax: r.argmax.params,
            })
        })
        .collect::<Result<_>>()?;

    let crossings: Vec<usize> = (0..sweep.len().saturating_sub(1))
        .filter(|&i| (sweep[i].max_a > 0.0) != (sweep[i + 1].max_a > 0.0))
        .collect();
    let last_down = crossings
        .iter()
        .rev()
        .copied()
        .find(|&i| sweep[i].max_a > 0.0)
        .ok_or(Error::NoSignChange { upper: SCAN_MAX })?;
    let anomalies: Vec<(f64, f64)> = crossings
        .iter()
        .filter(|&&i| i != last_down)
        .map(|&i| (sweep[i].b, sweep[i + 1].b))
        .collect();
    for &(lo, hi) in &anomalies {
        log::warn!("family {family_id}: additional sign change of max A_B in [{lo}, {hi}]");
    }

    let (mut lo, mut hi) = (sweep[last_down].b, sweep[last_down + 1].b);
    let mut argmax = sweep[last_down].argmax.clone();
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let r = maximize_a_family(family_id, mid, cfg)?;
        if r.value > 0.0 {
            lo = mid;
            argmax = r.argmax.params;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdScan {
        threshold: 0.5 * (lo + hi),
        argmax,
        sweep,
        anomalies,
    })
}

/// Root of `sinc(2B) = √2/2` in `[0.1, 1.5]`, bisected to `1e-10`.
pub fn solve_b0() -> f64 {
    let g = |b: f64| sinc(2.0 * b) - FRAC_1_SQRT_2;
    let (mut lo, mut hi) = (0.1, 1.5);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
