//! Gradients of `W_B` with respect to the real pairing
//! `⟨u, v⟩ = Re ∫ u v̄ dx = 2π Re Σ û(n) conj(v̂(n))`.
//!
//! In physical space the gradient is `4 ∫₀^B T_{-t}(|T_t u|² T_t u) dt`.
//! For `u` supported on `[n_min, n_max]` it lives on
//! `[2n_min − n_max, 2n_max − n_min]`, a window of width `3W − 2`.

use num_complex::Complex64;

use crate::error::{param, Result};
use crate::functional::KernelTable;
use crate::quadrature::QuadratureSpec;
use crate::spectral::FourierVector;

/// Window `(n_min, width)` carrying the gradient of a vector supported on
/// `u`'s window.
pub fn gradient_window(u: &FourierVector) -> (i64, usize) {
    let w = u.width();
    (2 * u.n_min() - u.n_max(), 3 * w - 2)
}

pub(crate) fn grad_w_with(u: &FourierVector, b: f64, kernel: &KernelTable) -> FourierVector {
    let w = u.width();
    let c = u.coeffs();
    let (lo, width) = gradient_window(u);
    let mut g = vec![Complex64::new(0.0, 0.0); width];
    let shift = w - 1;
    for (i1, &c1) in c.iter().enumerate() {
        if c1.re == 0.0 && c1.im == 0.0 {
            continue;
        }
        for (i2, &c2) in c.iter().enumerate() {
            let c12 = c1 * c2.conj();
            let l = i1 as i64 - i2 as i64;
            for (i3, &c3) in c.iter().enumerate() {
                let p = i3 as i64 - i2 as i64;
                g[i1 + i3 + shift - i2] += c12 * c3 * kernel.get(p, l).conj();
            }
        }
    }
    let s = 4.0 * b;
    for z in &mut g {
        *z *= s;
    }
    FourierVector::from_parts_unchecked(lo, g)
}

/// Gradient of `W_B` from the quartic sum, on the full window of
/// [`gradient_window`].
///
/// Coefficient `m` is `4B Σ û(n₁) conj(û(n₂)) û(n₃) conj(b_{n₃−n₂, n₁−n₂})`
/// over `n₁ − n₂ + n₃ = m`. Satisfies `⟨∇W_B(u), u⟩ = 4 W_B(u)`.
pub fn grad_w_spectral(u: &FourierVector, b: f64) -> FourierVector {
    grad_w_with(u, b, &KernelTable::new(b, u.width() - 1))
}

/// Gradient of `W_B` by time quadrature of `4 T_{-t}(|T_t u|² T_t u)`.
///
/// Each node samples `T_t u` on an `x` grid of at least `3W − 2` points,
/// applies the cubic nonlinearity pointwise, analyses back onto the
/// gradient window and evolves backwards.
pub fn grad_w_quadrature(u: &FourierVector, b: f64, q: &QuadratureSpec) -> FourierVector {
    let (lo, width) = gradient_window(u);
    let m = q.x_points_for(u.width()).max(width);
    let mut acc = FourierVector::zeros(lo, width);
    for (t, w) in q.time_rule(0.0, b) {
        let mut samples = u.sample_on_grid(m, t);
        for v in &mut samples.values {
            *v *= v.norm_sqr();
        }
        let back = samples.analyze(lo, width).evolve(-t);
        acc = acc.add_scaled(&back, Complex64::new(4.0 * w, 0.0));
    }
    acc
}

/// `u` rescaled to `‖u‖_{L²} = target_norm`.
pub fn project_sphere(u: &FourierVector, target_norm: f64) -> Result<FourierVector> {
    if !(target_norm > 0.0) || !target_norm.is_finite() {
        return param(format!("target norm must be positive, got {target_norm}"));
    }
    if u.is_zero() {
        return param("cannot project the zero vector onto a sphere");
    }
    Ok(u.scale(target_norm / u.l2_norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::strichartz_w;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_vector(rng: &mut impl Rng, max_width: usize) -> FourierVector {
        let w = rng.gen_range(1..=max_width);
        let coeffs = (0..w)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        FourierVector::new(rng.gen_range(-3..3), coeffs).unwrap()
    }

    fn directional_fd(u: &FourierVector, h: &FourierVector, b: f64, eps: f64) -> f64 {
        let plus = strichartz_w(&u.add_scaled(h, Complex64::new(eps, 0.0)), b).unwrap();
        let minus = strichartz_w(&u.add_scaled(h, Complex64::new(-eps, 0.0)), b).unwrap();
        (plus - minus) / (2.0 * eps)
    }

    #[test]
    fn single_mode_gradient_is_a_multiple() {
        let c = Complex64::new(0.3, -0.7);
        let u = FourierVector::single_mode(4, c);
        for b in [0.5, 1.0, 2.5] {
            let g = grad_w_spectral(&u, b);
            assert_eq!(g.n_min(), 4);
            assert_eq!(g.width(), 1);
            assert!((g.get(4) - c * (4.0 * b * c.norm_sqr())).norm() < 1e-15);
            let q = QuadratureSpec::for_operand(b, 1);
            let gq = grad_w_quadrature(&u, b, &q);
            assert!((gq.get(4) - g.get(4)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_vector_has_zero_gradient() {
        let z = FourierVector::zeros(-1, 3);
        assert!(grad_w_spectral(&z, 1.0).is_zero());
        assert!(grad_w_quadrature(&z, 1.0, &QuadratureSpec::for_operand(1.0, 3)).is_zero());
    }

    #[test]
    fn euler_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let u = random_vector(&mut rng, 7);
            let b = rng.gen_range(0.1..4.0);
            let g = grad_w_spectral(&u, b);
            assert_relative_eq!(
                g.real_pairing(&u),
                4.0 * strichartz_w(&u, b).unwrap(),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let u = random_vector(&mut rng, 6);
            let b = rng.gen_range(0.2..3.5);
            let g = grad_w_spectral(&u, b);
            let (lo, width) = gradient_window(&u);
            for _ in 0..10 {
                let h = FourierVector::new(
                    lo + rng.gen_range(0..width as i64),
                    (0..rng.gen_range(1..=u.width()))
                        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect(),
                )
                .unwrap();
                let fd = directional_fd(&u, &h, b, 1e-5);
                let an = g.real_pairing(&h);
                let scale = g.l2_norm() * h.l2_norm();
                assert!((fd - an).abs() <= 1e-6 * scale, "fd={fd} an={an} scale={scale}");
            }
        }
    }

    #[test]
    fn quadrature_path_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..25 {
            let u = random_vector(&mut rng, 6);
            for b in [0.3, 1.0, PI / 2.0, 2.6] {
                let q = QuadratureSpec::for_operand(b, u.width());
                let gs = grad_w_spectral(&u, b);
                let gq = grad_w_quadrature(&u, b, &q);
                assert!(gs.sub(&gq).l2_norm() <= 1e-7 * gs.l2_norm());
            }
        }
    }

    #[test]
    fn projection() {
        let u = FourierVector::single_mode(0, Complex64::new(2.0, 0.0));
        let p = project_sphere(&u, (2.0 * PI).sqrt()).unwrap();
        assert_relative_eq!(p.get(0).re, 1.0, max_relative = 1e-15);
        let unit = project_sphere(&u, 1.0).unwrap();
        assert_relative_eq!(unit.l2_norm(), 1.0, max_relative = 1e-15);
        let again = project_sphere(&unit, 1.0).unwrap();
        assert!(again.sub(&unit).l2_norm() < 1e-15);
        assert!(project_sphere(&FourierVector::zeros(0, 2), 1.0).is_err());
        assert!(project_sphere(&u, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gradient_is_orthogonal_to_phase_rotation(seed in any::<u64>(), b in 0.1f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_vector(&mut rng, 7);
            let g = grad_w_spectral(&u, b);
            let iu = u.scale_complex(Complex64::i());
            prop_assert!(g.real_pairing(&iu).abs() <= 1e-12 * g.l2_norm() * u.l2_norm() + 1e-300);
        }
    }
}
