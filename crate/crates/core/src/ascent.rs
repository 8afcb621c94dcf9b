//! Projected gradient ascent for `J_{B,1} = sup { W_B(u) : ‖u‖_{L²} = 1 }`
//! over vectors supported on `[-h, h]`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};
use crate::functional::{strichartz_w_with, KernelTable};
use crate::gradient::grad_w_with;
use crate::spectral::FourierVector;

/// Sufficient-increase constant of the backtracking line search.
pub const ARMIJO: f64 = 1e-4;

/// Steps shorter than this end a run as stalled.
const MIN_STEP: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub step_init: f64,
    pub backtrack_factor: f64,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            step_init: 1.0,
            backtrack_factor: 0.5,
            grad_tol: 1e-7,
            max_iters: 5000,
            restarts: 16,
            seed: 0,
        }
    }
}

impl AscentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_init > 0.0 && self.step_init.is_finite()) {
            return param(format!("step_init must be positive, got {}", self.step_init));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return param(format!(
                "backtrack_factor must lie in (0, 1), got {}",
                self.backtrack_factor
            ));
        }
        if !(self.grad_tol > 0.0) {
            return param(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        if self.max_iters == 0 || self.restarts == 0 {
            return param("max_iters and restarts must be at least 1");
        }
        Ok(())
    }
}

/// Outcome of a maximization. `trace` holds `(iteration, value)` pairs and is
/// nondecreasing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult<T> {
    pub argmax: T,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<(usize, f64)>,
}

/// Component of `g` tangent to the sphere through `u`, kept on `u`'s window.
fn tangent(g: &FourierVector, u: &FourierVector) -> FourierVector {
    let g = g.restrict(u.n_min(), u.width());
    let along = g.real_pairing(u) / u.real_pairing(u);
    g.add_scaled(u, Complex64::new(-along, 0.0))
}

/// Ascent from the unit vector `u0`, staying on `u0`'s window.
pub(crate) fn ascend(
    u0: FourierVector,
    b: f64,
    cfg: &AscentConfig,
    kernel: &KernelTable,
) -> Result<OptResult<FourierVector>> {
    let mut u = u0;
    let mut value = strichartz_w_with(&u, b, kernel)?;
    let mut trace = vec![(0, value)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let dir = tangent(&grad_w_with(&u, b, kernel), &u);
        let slope = dir.real_pairing(&dir);
        if slope.sqrt() <= cfg.grad_tol {
            converged = true;
            break;
        }
        let mut step = cfg.step_init;
        let accepted = loop {
            let moved = u.add_scaled(&dir, Complex64::new(step, 0.0));
            let cand = moved.scale(1.0 / moved.l2_norm());
            let cv = strichartz_w_with(&cand, b, kernel)?;
            if cv >= value + ARMIJO * step * slope {
                break Some((cand, cv));
            }
            step *= cfg.backtrack_factor;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((cand, cv)) = accepted else { break };
        u = cand;
        value = cv;
        iterations += 1;
        trace.push((iterations, value));
    }
    if !converged {
        let dir = tangent(&grad_w_with(&u, b, kernel), &u);
        converged = dir.l2_norm() <= cfg.grad_tol;
    }
    Ok(OptResult {
        argmax: u,
        value,
        iterations,
        converged,
        trace,
    })
}

/// Unit vector on `[-h, h]` with coefficients drawn uniformly from the unit
/// disc.
pub fn random_start(rng: &mut impl Rng, h: usize) -> FourierVector {
    let coeffs = (0..2 * h + 1)
        .map(|_| loop {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if z.norm_sqr() <= 1.0 && z.norm_sqr() > 0.0 {
                break z;
            }
        })
        .collect();
    let u = FourierVector::from_parts_unchecked(-(h as i64), coeffs);
    u.scale(1.0 / u.l2_norm())
}

/// Best of `cfg.restarts` projected ascents on the unit sphere of vectors
/// supported on `[-h, h]`.
///
/// Start `k` draws from a ChaCha8 stream seeded with `cfg.seed + k`, so the
/// result does not depend on thread scheduling. Ties go to the lowest start.
pub fn maximize_w(b: f64, h: usize, cfg: &AscentConfig) -> Result<OptResult<FourierVector>> {
    if !(b > 0.0 && b.is_finite()) {
        return param(format!("B must be positive and finite, got {b}"));
    }
    if h == 0 {
        return param("support halfwidth must be at least 1");
    }
    cfg.validate()?;
    let kernel = KernelTable::new(b, 2 * h);
    let runs: Vec<OptResult<FourierVector>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
            ascend(random_start(&mut rng, h), b, cfg, &kernel)
        })
        .collect::<Result<_>>()?;
    let mut best: Option<OptResult<FourierVector>> = None;
    for run in runs {
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}
