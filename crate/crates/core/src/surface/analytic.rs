use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::chart::{Chart, ParamRect, PolarAxis};
use super::SurfaceError;
use crate::geom::Vec3;
use crate::quadrature::{gauss_legendre, Rule};

/// Polar margin of every spherical chart: `theta` ranges over `[0.1, pi - 0.1]`.
pub const POLAR_MARGIN: f64 = 0.1;

/// Partition-of-unity ramp: a chart's weight is 1 while `|cos theta| <= 0.5`
/// and vanishes once `|cos theta| >= 0.99`, inside the `cos(0.1)` cap limit.
const CUTOFF_START: f64 = 0.5;
const CUTOFF_END: f64 = 0.99;

const GAUSS_ORDER: usize = 16;
const THETA_PANELS: usize = 24;
const PHI_PANELS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceName {
    UnitSphere,
    Ellipsoid { a: f64, b: f64, c: f64 },
}

/// A closed surface described by two spherical-coordinate charts whose polar
/// axes are 90 degrees apart, so that each chart's excluded polar caps are
/// covered by the other.
#[derive(Debug, Clone)]
pub struct AnalyticSurface {
    name: SurfaceName,
    charts: Vec<Chart>,
    theta_rule: Rule,
    phi_rule: Rule,
}

impl AnalyticSurface {
    pub fn unit_sphere() -> Self {
        Self::build(SurfaceName::UnitSphere, [1.0; 3])
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self, SurfaceError> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(SurfaceError::InvalidParams("ellipsoid semi-axes must be positive"));
        }
        Ok(Self::build(SurfaceName::Ellipsoid { a, b, c }, [a, b, c]))
    }

    pub fn from_name(name: SurfaceName) -> Result<Self, SurfaceError> {
        match name {
            SurfaceName::UnitSphere => Ok(Self::unit_sphere()),
            SurfaceName::Ellipsoid { a, b, c } => Self::ellipsoid(a, b, c),
        }
    }

    fn build(name: SurfaceName, axes: [f64; 3]) -> Self {
        let domain = ParamRect { lo: [POLAR_MARGIN, 0.0], hi: [PI - POLAR_MARGIN, 2.0 * PI] };
        let charts = vec![
            Chart::spherical(axes, PolarAxis::Z, domain),
            Chart::spherical(axes, PolarAxis::X, domain),
        ];
        let base = gauss_legendre(GAUSS_ORDER);
        Self {
            name,
            charts,
            theta_rule: base.composite(domain.lo[0], domain.hi[0], THETA_PANELS),
            phi_rule: base.composite(domain.lo[1], domain.hi[1], PHI_PANELS),
        }
    }

    pub fn name(&self) -> SurfaceName {
        self.name
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        self.charts[0].semi_axes()
    }

    /// Weight of chart `i` at surface point `p`; the weights sum to one.
    pub fn partition_weight(&self, i: usize, p: &Vec3) -> f64 {
        let raw: Vec<f64> = self.charts.iter().map(|c| cutoff(c.polar_closeness(p))).collect();
        let total: f64 = raw.iter().sum();
        raw[i] / total
    }

    /// Tensor Gauss-Legendre quadrature on each chart, blended by the
    /// partition of unity.
    pub fn integrate(&self, f: impl Fn(&Vec3) -> f64) -> f64 {
        let mut total = 0.0;
        for (ci, chart) in self.charts.iter().enumerate() {
            for (&th, &wt) in self.theta_rule.nodes.iter().zip(&self.theta_rule.weights) {
                let mut row = 0.0;
                for (&ph, &wp) in self.phi_rule.nodes.iter().zip(&self.phi_rule.weights) {
                    let x = [th, ph];
                    let p = chart.point(&x);
                    let psi = self.partition_weight(ci, &p);
                    if psi == 0.0 {
                        continue;
                    }
                    row += wp * psi * chart.area_element(&x) * f(&p);
                }
                total += wt * row;
            }
        }
        total
    }

    pub fn area(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// `[min, max]` of `<w, x>` over the surface.
    pub fn support_range(&self, w: &Vec3) -> (f64, f64) {
        let ax = self.semi_axes();
        let h = libm::sqrt((0..3).map(|i| (ax[i] * w[i]) * (ax[i] * w[i])).sum::<f64>());
        (-h, h)
    }

    /// Chart index and parameters of a surface point, preferring the chart
    /// in which the point is farthest from the poles.
    pub fn locate(&self, p: &Vec3) -> Option<(usize, [f64; 2])> {
        let best = (0..self.charts.len())
            .min_by(|&a, &b| self.charts[a].polar_closeness(p).total_cmp(&self.charts[b].polar_closeness(p)))?;
        self.charts[best].locate(p).map(|x| (best, x))
    }
}

/// Smooth ramp from 1 (t <= CUTOFF_START) to 0 (t >= CUTOFF_END).
fn cutoff(t: f64) -> f64 {
    let s = (t - CUTOFF_START) / (CUTOFF_END - CUTOFF_START);
    if s <= 0.0 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let f = |x: f64| if x > 0.0 { libm::exp(-1.0 / x) } else { 0.0 };
    1.0 - f(s) / (f(s) + f(1.0 - s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dot, norm};

    #[test]
    fn sphere_area_and_moments() {
        let s = AnalyticSurface::unit_sphere();
        assert!((s.area() - 4.0 * PI).abs() < 1e-8);
        assert!(s.integrate(|p| p[2]).abs() < 1e-8);
        assert!((s.integrate(|p| p[2] * p[2]) - 4.0 * PI / 3.0).abs() < 1e-6);
    }

    #[test]
    fn prolate_spheroid_area() {
        // closed form for a > b = c
        let (a, b) = (2.0f64, 1.0f64);
        let e = libm::sqrt(1.0 - b * b / (a * a));
        let exact = 2.0 * PI * b * b * (1.0 + a / (b * e) * libm::asin(e));
        let s = AnalyticSurface::ellipsoid(a, b, b).unwrap();
        assert!((s.area() - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn partition_sums_to_one_and_respects_domains() {
        let s = AnalyticSurface::unit_sphere();
        for p in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.6, 0.0, 0.8], [0.0, 1.0, 0.0]] {
            let w0 = s.partition_weight(0, &p);
            let w1 = s.partition_weight(1, &p);
            assert!((w0 + w1 - 1.0).abs() < 1e-15);
            for (i, w) in [w0, w1].into_iter().enumerate() {
                if w > 0.0 {
                    assert!(s.charts()[i].locate(&p).is_some());
                }
            }
        }
    }

    #[test]
    fn sphere_normals_are_radial() {
        let s = AnalyticSurface::unit_sphere();
        for chart in s.charts() {
            for x in [[0.3, 0.1], [1.5, 3.0], [2.9, 6.0]] {
                let nu = chart.normal(&x).unwrap();
                let p = chart.point(&x);
                assert!((dot(&nu, &p) - 1.0).abs() < 1e-10);
                let [t0, t1] = chart.tangents(&x);
                assert!(dot(&nu, &t0).abs() < 1e-10 && dot(&nu, &t1).abs() < 1e-10);
                assert!((norm(&nu) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn north_pole_normal() {
        let s = AnalyticSurface::unit_sphere();
        let (ci, x) = s.locate(&[0.0, 0.0, 1.0]).unwrap();
        let nu = s.charts()[ci].normal(&x).unwrap();
        assert!((nu[0]).abs() < 1e-12 && nu[1].abs() < 1e-12 && (nu[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_tip_normal() {
        // gradient of x^2/4 + y^2 + z^2 - 1 at (2, 0, 0) is (1, 0, 0)
        let s = AnalyticSurface::ellipsoid(2.0, 1.0, 1.0).unwrap();
        let (ci, x) = s.locate(&[2.0, 0.0, 0.0]).unwrap();
        let nu = s.charts()[ci].normal(&x).unwrap();
        assert!((nu[0] - 1.0).abs() < 1e-12 && nu[1].abs() < 1e-12 && nu[2].abs() < 1e-12);
    }

    #[test]
    fn ellipsoid_normals_match_implicit_gradient() {
        let s = AnalyticSurface::ellipsoid(2.0, 1.0, 1.5).unwrap();
        for chart in s.charts() {
            let x = [1.0, 2.0];
            let p = chart.point(&x);
            let g = [p[0] / 4.0, p[1], p[2] / 2.25];
            let gn = crate::geom::normalize(&g).unwrap();
            let nu = chart.normal(&x).unwrap();
            for i in 0..3 {
                assert!((gn[i] - nu[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(AnalyticSurface::ellipsoid(0.0, 1.0, 1.0).is_err());
        assert!(AnalyticSurface::ellipsoid(1.0, -1.0, 1.0).is_err());
    }
}
