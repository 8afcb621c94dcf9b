//! The space-time functional `W_B(u) = ∫₀^B ∫_𝕋 |T_t u|⁴ dx dt` and its
//! pieces.
//!
//! Expanding `T_t u` in modes turns `W_B` into a finite quartic form:
//!
//! ```text
//! W_B(u) = 2πB Σ_{p,l} a_{p,l}(u) b_{p,l}
//! a_{p,l}(u) = Σ_n û(n) conj(û(n-l)) conj(û(n-p)) û(n-p-l)
//! b_{p,l}    = (1/B) ∫₀^B e^{-2ilpt} dt
//! ```
//!
//! For a window of width `W` only `|p|, |l| < W` contribute. Splitting off the
//! `l = 0` and `p = 0` rows gives
//! `W_B = 4πB‖û‖⁴_{ℓ²} − 2πB‖û‖⁴_{ℓ⁴} + D_B`, and the sign of
//! `A_B = D_B/(2πB) − ‖û‖⁴_{ℓ⁴}` decides whether `W_B` beats `B/π` on the
//! unit sphere.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{phase, FourierVector};

/// Relative size of the imaginary part tolerated in sums that are real by
/// symmetry.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

/// Relative agreement required between the decomposition and the direct sum.
pub const DECOMPOSITION_TOL: f64 = 1e-10;

/// `b_{p,l} = (1/B) ∫₀^B e^{-2ilpt} dt` in closed form.
///
/// Equals 1 when `lp = 0`, otherwise `e^{-iθB} sin(θB)/(θB)` with `θ = lp`,
/// which is the same as `(1 - e^{-2iθB})/(2iθB)` without the cancellation.
pub fn kernel_b(p: i64, l: i64, b: f64) -> Complex64 {
    let theta = l * p;
    if theta == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let x = theta as f64 * b;
    phase(-x) * (x.sin() / x)
}

/// `b_{p,l}` for `|p|, |l| ≤ half`, laid out row-major in `p`.
#[derive(Clone, Debug)]
pub(crate) struct KernelTable {
    half: i64,
    side: usize,
    values: Vec<Complex64>,
}

impl KernelTable {
    pub(crate) fn new(b: f64, half: usize) -> Self {
        let half = half as i64;
        let side = (2 * half + 1) as usize;
        let mut values = Vec::with_capacity(side * side);
        for p in -half..=half {
            for l in -half..=half {
                values.push(kernel_b(p, l, b));
            }
        }
        Self { half, side, values }
    }

    #[inline]
    pub(crate) fn get(&self, p: i64, l: i64) -> Complex64 {
        debug_assert!(p.abs() <= self.half && l.abs() <= self.half);
        self.values[(p + self.half) as usize * self.side + (l + self.half) as usize]
    }

    pub(crate) fn half(&self) -> usize {
        self.half as usize
    }
}

/// `a_{p,l}(u) = Σ_n û(n) conj(û(n-l)) conj(û(n-p)) û(n-p-l)`.
pub fn quartic_a(u: &FourierVector, p: i64, l: i64) -> Complex64 {
    u.modes()
        .map(|(n, c)| c * u.get(n - l).conj() * u.get(n - p).conj() * u.get(n - p - l))
        .sum()
}

/// Sum of `a_{p,l} b_{p,l}` over the pairs accepted by `keep`, with the
/// running sum of term magnitudes for the residue check.
fn weighted_quartic_sum(u: &FourierVector, kernel: &KernelTable, keep: impl Fn(i64, i64) -> bool) -> (Complex64, f64) {
    let half = (u.width() - 1) as i64;
    debug_assert!(kernel.half() as i64 >= half);
    let c = u.coeffs();
    let n0 = u.n_min();
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for p in -half..=half {
        for l in -half..=half {
            if !keep(p, l) {
                continue;
            }
            // n, n-l, n-p, n-p-l all inside the window
            let lo = n0.max(n0 + l).max(n0 + p).max(n0 + p + l);
            let hi = u.n_max().min(u.n_max() + l).min(u.n_max() + p).min(u.n_max() + p + l);
            let mut a = Complex64::new(0.0, 0.0);
            for n in lo..=hi {
                let k = |m: i64| c[(m - n0) as usize];
                a += k(n) * k(n - l).conj() * k(n - p).conj() * k(n - p - l);
            }
            let term = a * kernel.get(p, l);
            total += term;
            scale += term.norm();
        }
    }
    (total, scale)
}

fn real_part_checked(z: Complex64, scale: f64, what: &'static str) -> Result<f64> {
    if z.im.abs() > IMAG_RESIDUE_TOL * scale {
        return Err(Error::Inconsistency {
            what,
            residual: z.im.abs() / scale,
            tolerance: IMAG_RESIDUE_TOL,
        });
    }
    Ok(z.re)
}

fn check_b(b: f64) -> Result<()> {
    if !(b > 0.0) || !b.is_finite() {
        return param(format!("B must be positive and finite, got {b}"));
    }
    Ok(())
}

pub(crate) fn strichartz_w_with(u: &FourierVector, b: f64, kernel: &KernelTable) -> Result<f64> {
    let (sum, scale) = weighted_quartic_sum(u, kernel, |_, _| true);
    Ok(2.0 * PI * b * real_part_checked(sum, scale, "strichartz_w")?)
}

/// `W_B(u)` from the finite triple sum.
pub fn strichartz_w(u: &FourierVector, b: f64) -> Result<f64> {
    check_b(b)?;
    strichartz_w_with(u, b, &KernelTable::new(b, u.width() - 1))
}

/// `W_B(u)` by brute-force space-time quadrature.
///
/// The `x` integral uses the `M`-point trapezoid rule on the full period,
/// exact for the degree `2(W-1)` trigonometric polynomial `|T_t u|⁴` when
/// `M > 2(W-1)`; the `t` integral uses the composite Gauss–Legendre rule of
/// `q`. Shares nothing with [`strichartz_w`] beyond grid sampling.
pub fn strichartz_w_oracle(u: &FourierVector, b: f64, q: &QuadratureSpec) -> Result<f64> {
    check_b(b)?;
    let m = q.x_points_for(u.width());
    let dx = 2.0 * PI / m as f64;
    let total = q
        .time_rule(0.0, b)
        .into_iter()
        .map(|(t, w)| {
            let inner: f64 = u
                .sample_on_grid(m, t)
                .values
                .iter()
                .map(|v| {
                    let s = v.norm_sqr();
                    s * s
                })
                .sum();
            w * inner * dx
        })
        .sum();
    Ok(total)
}

/// `D_B(u)`: the `l ≠ 0, p ≠ 0` part of the triple sum.
pub fn d_functional(u: &FourierVector, b: f64) -> Result<f64> {
    check_b(b)?;
    let kernel = KernelTable::new(b, u.width() - 1);
    let (sum, scale) = weighted_quartic_sum(u, &kernel, |p, l| p != 0 && l != 0);
    Ok(2.0 * PI * b * real_part_checked(sum, scale, "d_functional")?)
}

/// `A_B(u) = D_B(u)/(2πB) − ‖û‖⁴_{ℓ⁴}`.
pub fn a_functional(u: &FourierVector, b: f64) -> Result<f64> {
    if u.is_zero() {
        return param("A_B is undefined for the zero vector");
    }
    Ok(d_functional(u, b)? / (2.0 * PI * b) - u.ell4_pow4())
}

/// `A_B(u)` for real coefficients via the folded sine form
///
/// `4 Σ_{p≥1} a_{p,p} sinc(2p²B) + 8 Σ_{p>l≥1} a_{p,l} sinc(2plB) − a_{0,0}`
///
/// with `sinc(x) = sin(x)/x`.
pub fn a_functional_real(u: &FourierVector, b: f64) -> Result<f64> {
    check_b(b)?;
    if !u.is_real() {
        return param("the folded real formula needs real Fourier coefficients");
    }
    if u.is_zero() {
        return param("A_B is undefined for the zero vector");
    }
    let sinc = |x: f64| x.sin() / x;
    let top = (u.width() - 1) as i64;
    let mut acc = 0.0;
    for p in 1..=top {
        let pp = (p * p) as f64;
        acc += 4.0 * quartic_a(u, p, p).re * sinc(2.0 * pp * b);
        for l in 1..p {
            let pl = (p * l) as f64;
            acc += 8.0 * quartic_a(u, p, l).re * sinc(2.0 * pl * b);
        }
    }
    Ok(acc - quartic_a(u, 0, 0).re)
}

/// `G_B(u) = Σ |û(n) û(n-l) û(n-p) û(n-p-l)| / (1 + |lp|B)`.
pub fn g_functional(u: &FourierVector, b: f64) -> Result<f64> {
    check_b(b)?;
    let half = (u.width() - 1) as i64;
    let mut acc = 0.0;
    for p in -half..=half {
        for l in -half..=half {
            let s: f64 = u
                .modes()
                .map(|(n, c)| c.norm() * u.get(n - l).norm() * u.get(n - p).norm() * u.get(n - p - l).norm())
                .sum();
            acc += s / (1.0 + (l * p).abs() as f64 * b);
        }
    }
    Ok(acc)
}

/// The three terms of `W_B = 4πB‖û‖⁴_{ℓ²} − 2πB‖û‖⁴_{ℓ⁴} + D_B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub mass_term: f64,
    pub ell4_term: f64,
    pub d_term: f64,
    pub total: f64,
}

pub fn decomposition(u: &FourierVector, b: f64) -> Result<DecompositionReport> {
    let l2 = u.ell2_sq();
    let mass_term = 4.0 * PI * b * l2 * l2;
    let ell4_term = -2.0 * PI * b * u.ell4_pow4();
    let d_term = d_functional(u, b)?;
    let total = mass_term + ell4_term + d_term;
    let direct = strichartz_w(u, b)?;
    let residual = (total - direct).abs() / direct.abs().max(f64::MIN_POSITIVE);
    if direct != total && residual > DECOMPOSITION_TOL {
        return Err(Error::Inconsistency {
            what: "decomposition",
            residual,
            tolerance: DECOMPOSITION_TOL,
        });
    }
    Ok(DecompositionReport {
        mass_term,
        ell4_term,
        d_term,
        total,
    })
}
