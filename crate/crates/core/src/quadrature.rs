//! Composite Gauss–Legendre rules for the time integrals.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Grid size for the exact `x` integral: a fixed count, or `4W + 1` for an
/// operand of support width `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XPoints {
    Fixed(usize),
    Auto(AutoTag),
}

/// Serialises as the string `"auto"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// Resolution of the space-time quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub time_panels: usize,
    pub gauss_order: usize,
    pub x_points: XPoints,
}

impl QuadratureSpec {
    pub fn new(time_panels: usize, gauss_order: usize, x_points: XPoints) -> Result<Self> {
        if time_panels == 0 {
            return param("time_panels must be at least 1");
        }
        if !(2..=20).contains(&gauss_order) {
            return param(format!("gauss_order must lie in [2, 20], got {gauss_order}"));
        }
        if x_points == XPoints::Fixed(0) {
            return param("x_points must be at least 1");
        }
        Ok(Self {
            time_panels,
            gauss_order,
            x_points,
        })
    }

    /// Order-10 rule with `max(8, ⌈B·W²⌉)` panels and an automatic `x` grid.
    ///
    /// The `t` integrands are trigonometric polynomials with frequencies up to
    /// `2(W-1)²`, so this keeps every panel below about one radian of phase
    /// per unit frequency.
    pub fn for_operand(b: f64, width: usize) -> Self {
        let panels = (b * (width * width) as f64).ceil().max(8.0) as usize;
        Self {
            time_panels: panels,
            gauss_order: 10,
            x_points: XPoints::Auto(AutoTag::Auto),
        }
    }

    /// Number of `x` points to use for an operand of width `width`.
    pub fn x_points_for(&self, width: usize) -> usize {
        match self.x_points {
            XPoints::Fixed(m) => m,
            XPoints::Auto(_) => 4 * width + 1,
        }
    }

    /// Nodes and weights of the composite rule on `[a, b]`.
    pub fn time_rule(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        composite_gauss_legendre(a, b, self.time_panels, self.gauss_order)
    }
}

/// `panels` equal sub-intervals of `[a, b]`, each with an `order`-point
/// Gauss–Legendre rule.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(order).expect("Gauss-Legendre order must be at least 2");
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for &(x, w) in rule.as_node_weight_pairs() {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_oscillatory_exponential() {
        // ∫₀^B cos(ωt) dt with ω·(B/panels) ≈ 2
        let (b, omega) = (3.0, 60.0);
        let rule = composite_gauss_legendre(0.0, b, 90, 10);
        let approx: f64 = rule.iter().map(|&(t, w)| w * (omega * t).cos()).sum();
        assert_relative_eq!(approx, (omega * b).sin() / omega, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_validation() {
        assert!(QuadratureSpec::new(0, 10, XPoints::Fixed(9)).is_err());
        assert!(QuadratureSpec::new(4, 1, XPoints::Fixed(9)).is_err());
        assert!(QuadratureSpec::new(4, 21, XPoints::Fixed(9)).is_err());
        assert!(QuadratureSpec::new(4, 10, XPoints::Fixed(0)).is_err());
        let q = QuadratureSpec::for_operand(std::f64::consts::PI, 8);
        assert_eq!(q.time_panels, 202);
        assert_eq!(q.x_points_for(8), 33);
        assert_eq!(QuadratureSpec::for_operand(0.1, 2).time_panels, 8);
    }

    #[test]
    fn x_points_serialises_as_auto_or_count() {
        let q = QuadratureSpec::for_operand(1.0, 3);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"time_panels":9,"gauss_order":10,"x_points":"auto"}"#);
        let f: QuadratureSpec = serde_json::from_str(r#"{"time_panels":3,"gauss_order":4,"x_points":17}"#).unwrap();
        assert_eq!(f.x_points, XPoints::Fixed(17));
    }
}
