//! Truncated Fourier representation of functions on the torus `[0, 2π)`.
//!
//! A [`FourierVector`] stores the coefficients `û(n)` of
//! `u(x) = Σ û(n) e^{inx}` over a contiguous window of mode indices. With this
//! normalisation `‖u‖_{L²} = √(2π) ‖û‖_{ℓ²}`, and the free Schrödinger flow
//! acts as the multiplier `û(n) ↦ e^{-in²t} û(n)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{param, Error, Result};

/// Finitely supported coefficient sequence on ℤ.
///
/// `coeffs[k]` holds `û(n_min + k)`; everything outside the window is zero.
/// Values are immutable after construction and always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierVector {
    n_min: i64,
    coeffs: Vec<Complex64>,
}

/// Which coefficient norm to take in [`FourierVector::lp_coeff_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffNorm {
    L1,
    L2,
    L4,
    Sup,
}

impl CoeffNorm {
    /// Maps an exponent `p` to a supported norm. `None` selects the sup norm.
    pub fn from_exponent(p: Option<u32>) -> Result<Self> {
        match p {
            Some(1) => Ok(Self::L1),
            Some(2) => Ok(Self::L2),
            Some(4) => Ok(Self::L4),
            None => Ok(Self::Sup),
            Some(other) => param(format!("unsupported coefficient norm exponent {other}")),
        }
    }
}

/// Samples of `T_t u` on the equispaced grid `x_j = 2πj/M`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    pub values: Vec<Complex64>,
    pub t: f64,
}

impl FourierVector {
    pub fn new(n_min: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return param("a Fourier vector needs at least one coefficient");
        }
        if let Some(k) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return param(format!("coefficient at mode {} is not finite", n_min + k as i64));
        }
        Ok(Self { n_min, coeffs })
    }

    /// Real coefficients starting at `n_min`.
    pub fn from_real(n_min: i64, values: &[f64]) -> Result<Self> {
        Self::new(n_min, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n_min: i64, width: usize) -> Self {
        assert!(width >= 1, "window width must be positive");
        Self {
            n_min,
            coeffs: vec![Complex64::new(0.0, 0.0); width],
        }
    }

    pub fn single_mode(n: i64, c: Complex64) -> Self {
        Self::new(n, vec![c]).expect("single mode must be finite")
    }

    /// Uniform-modulus vector on `|n| ≤ j` with unit L² norm.
    ///
    /// As `j` grows the ℓ² mass spreads out and `W_B` of these vectors tends
    /// to `B/π` from below; they are the standard vanishing sequence.
    pub fn vanishing(j: usize) -> Self {
        let width = 2 * j + 1;
        let c = 1.0 / (2.0 * PI * width as f64).sqrt();
        Self {
            n_min: -(j as i64),
            coeffs: vec![Complex64::new(c, 0.0); width],
        }
    }

    pub(crate) fn from_parts_unchecked(n_min: i64, coeffs: Vec<Complex64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { n_min, coeffs }
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.coeffs.len() as i64 - 1
    }

    /// Support width `W`.
    pub fn width(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `û(n)`, zero outside the stored window.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        let k = n - self.n_min;
        if k >= 0 && (k as usize) < self.coeffs.len() {
            self.coeffs[k as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `(n, û(n))` pairs over the window.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (self.n_min + k as i64, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// `Σ |û(n)|²`.
    pub fn ell2_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `‖u‖_{L²(𝕋)} = √(2π Σ |û(n)|²)`.
    pub fn l2_norm(&self) -> f64 {
        (2.0 * PI * self.ell2_sq()).sqrt()
    }

    pub fn lp_coeff_norm(&self, p: CoeffNorm) -> f64 {
        match p {
            CoeffNorm::L1 => self.coeffs.iter().map(|c| c.norm()).sum(),
            CoeffNorm::L2 => self.ell2_sq().sqrt(),
            CoeffNorm::L4 => self
                .coeffs
                .iter()
                .map(|c| c.norm_sqr() * c.norm_sqr())
                .sum::<f64>()
                .powf(0.25),
            CoeffNorm::Sup => self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max),
        }
    }

    /// `Σ |û(n)|⁴`, which equals `a_{0,0}(u)`.
    pub fn ell4_pow4(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum()
    }

    /// Complex coefficient inner product `Σ û(n) conj(v̂(n))`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        let lo = self.n_min.max(other.n_min);
        let hi = self.n_max().min(other.n_max());
        (lo..=hi).map(|n| self.get(n) * other.get(n).conj()).sum()
    }

    /// Real L² pairing `Re ∫ u v̄ dx = 2π Re Σ û conj(v̂)`.
    pub fn real_pairing(&self, other: &Self) -> f64 {
        2.0 * PI * self.dot(other).re
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|_, c| c * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map(|_, c| c * s)
    }

    /// Applies `f(n, û(n))` coefficient-wise on the same window.
    pub fn map(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        Self {
            n_min: self.n_min,
            coeffs: self.modes().map(|(n, c)| f(n, c)).collect(),
        }
    }

    /// `self + s·other` on the union of both windows.
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Self {
        let lo = self.n_min.min(other.n_min);
        let hi = self.n_max().max(other.n_max());
        Self {
            n_min: lo,
            coeffs: (lo..=hi).map(|n| self.get(n) + s * other.get(n)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, Complex64::new(-1.0, 0.0))
    }

    /// The coefficients on `[n_min, n_min + width)`, zero-filled where needed.
    pub fn restrict(&self, n_min: i64, width: usize) -> Self {
        assert!(width >= 1, "window width must be positive");
        Self {
            n_min,
            coeffs: (0..width as i64).map(|k| self.get(n_min + k)).collect(),
        }
    }

    /// Widens the window by `k` zero modes on each side.
    pub fn pad(&self, k: usize) -> Self {
        self.restrict(self.n_min - k as i64, self.width() + 2 * k)
    }

    /// Drops exactly-zero coefficients from both ends. A zero vector keeps a
    /// single zero coefficient at its old `n_min`.
    pub fn trim(&self) -> Self {
        let nz = |c: &Complex64| c.re != 0.0 || c.im != 0.0;
        match (self.coeffs.iter().position(nz), self.coeffs.iter().rposition(nz)) {
            (Some(a), Some(b)) => Self {
                n_min: self.n_min + a as i64,
                coeffs: self.coeffs[a..=b].to_vec(),
            },
            _ => Self::zeros(self.n_min, 1),
        }
    }

    /// Free Schrödinger evolution `T_t`: `û(n) ↦ e^{-in²t} û(n)`.
    pub fn evolve(&self, t: f64) -> Self {
        self.map(|n, c| c * phase(-((n * n) as f64) * t))
    }

    /// Samples `T_t u` at `x_j = 2πj/M`, `j = 0..M`, by direct summation.
    pub fn sample_on_grid(&self, m: usize, t: f64) -> GridSamples {
        assert!(m >= 1, "grid needs at least one point");
        let evolved = self.evolve(t);
        let values = (0..m)
            .map(|j| {
                let x = 2.0 * PI * j as f64 / m as f64;
                evolved.modes().map(|(n, c)| c * phase(n as f64 * x)).sum()
            })
            .collect();
        GridSamples { values, t }
    }

    /// `v(x) = u(x - x0)`, i.e. `û(n) ↦ e^{-inx0} û(n)`.
    pub fn translate_phys(&self, x0: f64) -> Self {
        self.map(|n, c| c * phase(-(n as f64) * x0))
    }

    /// `ŵ(n) = û(n - m)`: the same values on a window shifted by `m`.
    pub fn translate_freq(&self, m: i64) -> Self {
        Self {
            n_min: self.n_min + m,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Representative of the symmetry orbit used for reporting maximizers.
    ///
    /// The window is shifted so that the mass centroid `Σ n|û|² / Σ |û|²`
    /// rounds to mode 0, then a global phase makes `û(0)` real and positive.
    /// If `û(0)` vanishes after the shift, the largest coefficient is used for
    /// the phase instead.
    pub fn canonicalize(&self) -> Self {
        let mass = self.ell2_sq();
        if mass == 0.0 {
            return self.clone();
        }
        let centroid: f64 = self.modes().map(|(n, c)| n as f64 * c.norm_sqr()).sum::<f64>() / mass;
        let shifted = self.translate_freq(-(centroid.round() as i64));
        let mut anchor = shifted.get(0);
        if anchor.norm() == 0.0 {
            anchor = shifted
                .coeffs
                .iter()
                .copied()
                .fold(
                    Complex64::new(0.0, 0.0),
                    |best, c| if c.norm() > best.norm() { c } else { best },
                );
        }
        shifted.scale_complex(anchor.conj() / anchor.norm())
    }
}

impl GridSamples {
    /// Discrete Fourier analysis back onto `[n_min, n_min + width)`.
    ///
    /// `ĉ(n) = (1/M) Σ_j values[j] e^{-inx_j}` recovers the coefficients of a
    /// trigonometric polynomial exactly when its frequencies fit in the window
    /// and `M ≥ width`. The time tag is ignored.
    pub fn analyze(&self, n_min: i64, width: usize) -> FourierVector {
        let m = self.values.len();
        let coeffs = (0..width as i64)
            .map(|k| {
                let n = n_min + k;
                let s: Complex64 = self
                    .values
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * phase(-(n as f64) * 2.0 * PI * j as f64 / m as f64))
                    .sum();
                s / m as f64
            })
            .collect();
        FourierVector::from_parts_unchecked(n_min, coeffs)
    }
}

/// `(δ, B) = (L/2π, (2π/L)²)` relating period-`L` fields to the torus.
pub fn dilation_params(period: f64) -> Result<(f64, f64)> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::Parameter(format!("period must be positive, got {period}")));
    }
    let delta = period / (2.0 * PI);
    Ok((delta, 1.0 / (delta * delta)))
}

#[inline]
pub(crate) fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

#[derive(Serialize, Deserialize)]
struct FourierVectorRepr {
    n_min: i64,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for FourierVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FourierVectorRepr {
            n_min: self.n_min,
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FourierVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FourierVectorRepr::deserialize(deserializer)?;
        let coeffs = repr.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        FourierVector::new(repr.n_min, coeffs).map_err(serde::de::Error::custom)
    }
}
