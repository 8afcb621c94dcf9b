//! The periodic dispersion-managed NLS flow `u_t = −i ∇H_L(u)` on `[0, L)`.
//!
//! A [`PeriodicField`] stores coefficients against `e^{i(2πn/L)x}`. With
//! `δ = L/2π` and `B = (2π/L)²`, the dilation `v(y) = u(δy)` keeps the
//! coefficients and turns `T^L_t` into `T_{Bt}`, so
//! `H_L(u) = −(1/B) W_B(v)` and `∇H_L(u) = −∇W_B(v)/(δB)`.
//!
//! Inner products are `⟨f, g⟩_L = Re ∫₀^L f ḡ dx = L Re Σ f̂(n) conj(ĝ(n))`
//! and the mass is `P(u) = ½ ∫₀^L |u|² dx`. Under this mass, a maximizer
//! `v` with `‖v‖²_{L²(𝕋)} = 2λ/δ` corresponds to a field with `P = λ`.
//!
//! Time stepping is classical RK4 on the coefficients of the initial
//! window (a Galerkin truncation): the right-hand side is the exact gradient
//! restricted to that window, which keeps `H_L` and `P` as invariants of the
//! truncated system.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::functional::{strichartz_w, KernelTable};
use crate::gradient::{grad_w_quadrature, grad_w_with};
use crate::quadrature::QuadratureSpec;
use crate::spectral::{dilation_params, phase, FourierVector};

/// Relative drift of `P` above which a trajectory carries a warning.
pub const MASS_DRIFT_WARN: f64 = 1e-5;

/// Residual gate for [`stability_experiment`].
pub const GROUND_STATE_GATE: f64 = 1e-3;

/// Spatial translations tried by [`stability_experiment`] per distance sample.
pub const STABILITY_SHIFT_GRID: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicField {
    #[serde(rename = "L")]
    period: f64,
    #[serde(flatten)]
    coeffs: FourierVector,
}

impl PeriodicField {
    pub fn new(period: f64, coeffs: FourierVector) -> Result<Self> {
        dilation_params(period)?;
        Ok(Self { period, coeffs })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn coeffs(&self) -> &FourierVector {
        &self.coeffs
    }

    /// `(δ, B)` of the dilation to the torus.
    pub fn dilation(&self) -> (f64, f64) {
        dilation_params(self.period).expect("period validated at construction")
    }

    fn with(&self, coeffs: FourierVector) -> Self {
        Self {
            period: self.period,
            coeffs,
        }
    }

    /// `⟨f, g⟩_L = L Re Σ f̂ conj(ĝ)`.
    pub fn pairing(&self, other: &Self) -> f64 {
        self.period * self.coeffs.dot(&other.coeffs).re
    }

    /// `‖u‖_{L²(0,L)}`.
    pub fn l2_norm(&self) -> f64 {
        (self.period * self.coeffs.ell2_sq()).sqrt()
    }

    /// `u(· + x0)`, i.e. `û(n) ↦ e^{i(2πn/L)x0} û(n)`.
    pub fn shift(&self, x0: f64) -> Self {
        let k = 2.0 * PI / self.period;
        self.with(self.coeffs.map(|n, c| c * phase(k * n as f64 * x0)))
    }

    /// Quadrature sized for this field, with `B = (2π/L)²`.
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::for_operand(self.dilation().1, self.coeffs.width())
    }

    fn check_same_period(&self, other: &Self) -> Result<()> {
        if self.period != other.period {
            return param(format!(
                "fields have different periods {} and {}",
                self.period, other.period
            ));
        }
        Ok(())
    }
}

/// `𝓕_L(T^L_t u)[n] = e^{−i(2πn/L)²t} 𝓕_L u[n]`.
pub fn evolve_linear_l(u: &PeriodicField, t: f64) -> PeriodicField {
    let (_, b) = u.dilation();
    u.with(u.coeffs.evolve(b * t))
}

/// `P(u) = ½ ∫₀^L |u|² dx = ½ L Σ |û(n)|²`.
pub fn mass_p(u: &PeriodicField) -> f64 {
    0.5 * u.period * u.coeffs.ell2_sq()
}

/// `H_L(u) = −(2π/L) ∫₀^L ∫₀^1 |T^L_t u|⁴ dt dx`, through `−W_B(v)/B`.
pub fn hamiltonian_h(u: &PeriodicField) -> Result<f64> {
    let (_, b) = u.dilation();
    Ok(-strichartz_w(&u.coeffs, b)? / b)
}

/// `H_L` by direct quadrature on `[0, L) × [0, 1]`: trapezoid in `x`,
/// composite Gauss–Legendre in `t`.
pub fn hamiltonian_h_quadrature(u: &PeriodicField, q: &QuadratureSpec) -> f64 {
    let (_, b) = u.dilation();
    let m = q.x_points_for(u.coeffs.width());
    let dx = u.period / m as f64;
    // sampling T^L_t u at x_j = jL/M is sampling T_{Bt} v at 2πj/M
    let integral: f64 = q
        .time_rule(0.0, 1.0)
        .into_iter()
        .map(|(t, w)| {
            let s: f64 = u
                .coeffs
                .sample_on_grid(m, b * t)
                .values
                .iter()
                .map(|z| z.norm_sqr() * z.norm_sqr())
                .sum();
            w * s * dx
        })
        .sum();
    -(2.0 * PI / u.period) * integral
}

/// `∇H_L(u) = −(8π/L) ∫₀^1 T^L_{−t}(|T^L_t u|² T^L_t u) dt` by Gauss–Legendre
/// in `t`, on the full window of width `3W − 2`.
pub fn grad_h(u: &PeriodicField, q: &QuadratureSpec) -> PeriodicField {
    let (delta, b) = u.dilation();
    // the t-rule is stretched to [0, B] to reuse the torus gradient
    let gw = grad_w_quadrature(&u.coeffs, b, q);
    u.with(gw.scale(-1.0 / (delta * b)))
}

/// [`grad_h`] from the quartic sum instead of quadrature.
pub fn grad_h_spectral(u: &PeriodicField) -> PeriodicField {
    let (delta, b) = u.dilation();
    let kernel = KernelTable::new(b, u.coeffs.width() - 1);
    u.with(grad_w_with(&u.coeffs, b, &kernel).scale(-1.0 / (delta * b)))
}

/// Right-hand side `−i ∇H_L(u)` restricted to `u`'s window.
struct Rhs {
    kernel: KernelTable,
    scale: Complex64,
    b: f64,
}

impl Rhs {
    fn new(u: &PeriodicField) -> Self {
        let (delta, b) = u.dilation();
        Self {
            kernel: KernelTable::new(b, u.coeffs.width() - 1),
            scale: Complex64::new(0.0, 1.0 / (delta * b)),
            b,
        }
    }

    fn eval(&self, c: &FourierVector) -> FourierVector {
        grad_w_with(c, self.b, &self.kernel)
            .restrict(c.n_min(), c.width())
            .scale_complex(self.scale)
    }

    fn step(&self, c: &FourierVector, dt: f64) -> FourierVector {
        let half = Complex64::new(0.5 * dt, 0.0);
        let k1 = self.eval(c);
        let k2 = self.eval(&c.add_scaled(&k1, half));
        let k3 = self.eval(&c.add_scaled(&k2, half));
        let k4 = self.eval(&c.add_scaled(&k3, Complex64::new(dt, 0.0)));
        let sum = k1
            .add_scaled(&k2, Complex64::new(2.0, 0.0))
            .add_scaled(&k3, Complex64::new(2.0, 0.0))
            .add_scaled(&k4, Complex64::new(1.0, 0.0));
        c.add_scaled(&sum, Complex64::new(dt / 6.0, 0.0))
    }
}

/// One classical RK4 step of `u_t = −i ∇H_L(u)` on `u`'s window. `dt` may
/// be negative.
pub fn rk4_step(u: &PeriodicField, dt: f64) -> PeriodicField {
    u.with(Rhs::new(u).step(&u.coeffs, dt))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PeriodicField>,
    /// `(H_L, P)` at each recorded time.
    pub ledger: Vec<(f64, f64)>,
    pub warning: Option<String>,
}

impl Trajectory {
    /// Largest relative deviation of `(H_L, P)` from their initial values.
    pub fn conserved_drift(&self) -> (f64, f64) {
        let (h0, p0) = self.ledger[0];
        self.ledger.iter().fold((0.0, 0.0), |(dh, dp), &(h, p)| {
            (f64::max(dh, rel(h, h0)), f64::max(dp, rel(p, p0)))
        })
    }

    pub fn final_state(&self) -> &PeriodicField {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn rel(x: f64, x0: f64) -> f64 {
    if x0 == 0.0 {
        x.abs()
    } else {
        (x - x0).abs() / x0.abs()
    }
}

/// Integrates from `t = 0` to `t_end` with steps of `dt` (the last one
/// shortened to land on `t_end`), recording every state.
///
/// A relative drift of `P` above [`MASS_DRIFT_WARN`], or a non-finite state,
/// sets `warning`; non-finite states also stop the integration.
pub fn evolve_dmnls(u0: &PeriodicField, dt: f64, t_end: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite() && t_end.is_finite()) || dt > t_end {
        return param(format!("need 0 < dt <= T_end, got dt = {dt}, T_end = {t_end}"));
    }
    let rhs = Rhs::new(u0);
    let record = |c: &FourierVector| -> Result<(f64, f64)> {
        let f = u0.with(c.clone());
        Ok((hamiltonian_h(&f)?, mass_p(&f)))
    };
    let steps = (t_end / dt - 1e-9).ceil() as usize;
    let mut times = vec![0.0];
    let mut states = vec![u0.clone()];
    let mut ledger = vec![record(&u0.coeffs)?];
    let mut warning = None;
    let mut c = u0.coeffs.clone();
    for k in 1..=steps {
        let t_prev = (k - 1) as f64 * dt;
        let t = if k == steps { t_end } else { k as f64 * dt };
        c = rhs.step(&c, t - t_prev);
        if c.coeffs().iter().any(|z| !z.is_finite()) {
            warning = Some(format!("state became non-finite at t = {t}"));
            break;
        }
        times.push(t);
        ledger.push(record(&c)?);
        states.push(u0.with(c.clone()));
    }
    let mut traj = Trajectory {
        times,
        states,
        ledger,
        warning,
    };
    let (_, dp) = traj.conserved_drift();
    if traj.warning.is_none() && !(dp <= MASS_DRIFT_WARN) {
        traj.warning = Some(format!("relative mass drift {dp:.3e} exceeds {MASS_DRIFT_WARN:e}"));
    }
    Ok(traj)
}

/// The field with the coefficients of `v` at period `L`, rescaled to
/// `P = λ`.
pub fn ground_state_from_maximizer(v: &FourierVector, period: f64, lambda: f64) -> Result<PeriodicField> {
    if v.is_zero() {
        return param("cannot build a ground state from the zero vector");
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param(format!("mass must be positive, got {lambda}"));
    }
    let f = PeriodicField::new(period, v.clone())?;
    let s = (lambda / mass_p(&f)).sqrt();
    Ok(f.with(v.scale(s)))
}

/// Euler–Lagrange diagnostics for `∇H_L(φ) = ωφ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    /// `⟨∇H_L(φ), φ⟩_L / ⟨φ, φ⟩_L`.
    pub omega: f64,
    /// `‖∇H_L(φ) − ωφ‖ / ‖φ‖` with the full gradient.
    pub residual: f64,
    /// The same quotient restricted to `φ`'s window.
    pub window_residual: f64,
}

pub fn omega_residual(phi: &PeriodicField, q: &QuadratureSpec) -> Result<OmegaReport> {
    if phi.coeffs.is_zero() {
        return param("omega is undefined for the zero field");
    }
    let g = grad_h(phi, q);
    let omega = g.pairing(phi) / phi.pairing(phi);
    let diff = g.with(g.coeffs.add_scaled(&phi.coeffs, Complex64::new(-omega, 0.0)));
    let norm = phi.l2_norm();
    let inside = diff.with(diff.coeffs.restrict(phi.coeffs.n_min(), phi.coeffs.width()));
    Ok(OmegaReport {
        omega,
        residual: diff.l2_norm() / norm,
        window_residual: inside.l2_norm() / norm,
    })
}

/// Best alignment `max_θ Re⟨u, e^{iθ}ψ⟩_L = |⟨u, ψ⟩|` for ψ = `phi` shifted by
/// `m` modes and `x0` in space.
fn overlap(u: &FourierVector, phi: &FourierVector, m: i64, k: f64, x0: f64) -> Complex64 {
    let lo = u.n_min().max(phi.n_min() + m);
    let hi = u.n_max().min(phi.n_max() + m);
    (lo..=hi)
        .map(|n| u.get(n) * (phi.get(n - m) * phase(k * n as f64 * x0)).conj())
        .sum()
}

/// Orbit distance `inf ‖u − e^{iθ} φ_m(· + x0)‖_{L²(0,L)}` over phases,
/// spatial translations and frequency translations `|m| ≤ shift_grid`.
///
/// The phase is optimal in closed form. Translations are scanned on
/// `shift_grid` equispaced points of `[0, L)` and the best one is polished by
/// golden-section search within one grid cell.
pub fn orbit_distance(u: &PeriodicField, phi: &PeriodicField, shift_grid: usize) -> Result<f64> {
    u.check_same_period(phi)?;
    if shift_grid == 0 {
        return param("shift_grid must be at least 1");
    }
    let k = 2.0 * PI / u.period;
    let cell = u.period / shift_grid as f64;
    let s = shift_grid as i64;
    let mut best = (f64::NEG_INFINITY, 0i64, 0.0);
    for m in -s..=s {
        if phi.coeffs.n_min() + m > u.coeffs.n_max() || phi.coeffs.n_max() + m < u.coeffs.n_min() {
            continue;
        }
        for j in 0..shift_grid {
            let x0 = j as f64 * cell;
            let a = overlap(&u.coeffs, &phi.coeffs, m, k, x0).norm();
            if a > best.0 {
                best = (a, m, x0);
            }
        }
    }
    let (_, m, x0) = if best.0 == f64::NEG_INFINITY {
        (0.0, 0, 0.0)
    } else {
        best
    };
    let polished = golden_max(
        |x| overlap(&u.coeffs, &phi.coeffs, m, k, x).norm(),
        x0 - cell,
        x0 + cell,
    );
    let distance_at = |x: f64| {
        let psi = phi.with(phi.coeffs.translate_freq(m)).shift(x);
        let z = u.coeffs.dot(&psi.coeffs);
        let rot = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        u.with(u.coeffs.add_scaled(&psi.coeffs, -rot)).l2_norm()
    };
    let refined = newton_polish(&u.coeffs, &phi.coeffs, m, k, polished);
    Ok(distance_at(x0).min(distance_at(polished)).min(distance_at(refined)))
}

/// Newton steps on `d/dx |z(x)|² = 2 Re(conj(z) z')` for the overlap
/// `z(x) = Σ û(n) conj(φ̂(n−m)) e^{−iknx}`; the flat top of `|z|` limits
/// bracketing methods to about `√ε` in `x`.
fn newton_polish(u: &FourierVector, phi: &FourierVector, m: i64, k: f64, mut x: f64) -> f64 {
    let lo = u.n_min().max(phi.n_min() + m);
    let hi = u.n_max().min(phi.n_max() + m);
    for _ in 0..6 {
        let (mut z, mut z1, mut z2) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        for n in lo..=hi {
            let kn = k * n as f64;
            let t = u.get(n) * phi.get(n - m).conj() * phase(-kn * x);
            z += t;
            z1 += t * Complex64::new(0.0, -kn);
            z2 += t * (-kn * kn);
        }
        let f = (z.conj() * z1).re;
        let df = z1.norm_sqr() + (z.conj() * z2).re;
        if !(df < 0.0) {
            break;
        }
        x -= f / df;
    }
    x
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Orbit distance of the perturbed initial field.
    pub epsilon0: f64,
    /// Largest sampled orbit distance.
    pub max_drift: f64,
    pub horizon: f64,
    /// Relative drift of `(H_L, P)` along the run.
    pub conserved_drift: (f64, f64),
    /// `(t, orbit distance)` samples.
    pub samples: Vec<(f64, f64)>,
}

/// Perturbs `phi` by a random field of `L²` size `epsilon`, restores the mass
/// `P(phi)`, integrates to `horizon` and tracks the orbit distance to `phi`
/// at every integer multiple of `sample_every` time units (and at the end).
///
/// Fails with [`Error::ResidualGate`] unless `phi` passes the
/// [`GROUND_STATE_GATE`] on its Euler–Lagrange residual.
pub fn stability_experiment(
    phi: &PeriodicField,
    epsilon: f64,
    horizon: f64,
    dt: f64,
    q: &QuadratureSpec,
    seed: u64,
) -> Result<StabilityReport> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return param(format!("epsilon must be nonnegative, got {epsilon}"));
    }
    let report = omega_residual(phi, q)?;
    if !(report.residual < GROUND_STATE_GATE) {
        return Err(Error::ResidualGate {
            residual: report.residual,
            gate: GROUND_STATE_GATE,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = phi.with(
        phi.coeffs
            .map(|_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))),
    );
    let noise = noise.with(noise.coeffs.scale(epsilon / noise.l2_norm()));
    let perturbed = phi.with(phi.coeffs.add_scaled(&noise.coeffs, Complex64::new(1.0, 0.0)));
    let u0 = perturbed.with(perturbed.coeffs.scale((mass_p(phi) / mass_p(&perturbed)).sqrt()));

    let traj = evolve_dmnls(&u0, dt, horizon)?;
    if let Some(w) = &traj.warning {
        log::warn!("stability run: {w}");
    }
    let stride = ((0.1 / dt).round() as usize).max(1);
    let last = traj.states.len() - 1;
    let mut samples = Vec::new();
    for (i, (t, state)) in traj.times.iter().zip(&traj.states).enumerate() {
        if i % stride == 0 || i == last {
            samples.push((*t, orbit_distance(state, phi, STABILITY_SHIFT_GRID)?));
        }
    }
    let max_drift = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(StabilityReport {
        epsilon0: samples[0].1,
        max_drift,
        horizon,
        conserved_drift: traj.conserved_drift(),
        samples,
    })
}
