use crate::geom::{cross, dot, normalize, Vec3};

use super::SurfaceError;

/// Central-difference step for charts without analytic derivatives.
pub const FD_STEP: f64 = 1e-6;

/// Minimum Gram determinant of the tangent pair for a usable chart point.
const MIN_GRAM_DET: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl ParamRect {
    pub fn contains(&self, x: &[f64; 2]) -> bool {
        (self.lo[0]..=self.hi[0]).contains(&x[0]) && (self.lo[1]..=self.hi[1]).contains(&x[1])
    }

    pub fn width(&self, k: usize) -> f64 {
        self.hi[k] - self.lo[k]
    }
}

/// Coordinate axis through the poles of a spherical-coordinate chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarAxis {
    Z,
    X,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Derivatives {
    Analytic,
    CentralDifference { step: f64 },
}

/// Spherical-coordinate parametrization `(theta, phi) -> diag(a, b, c) u(theta, phi)`
/// of an ellipsoid, where `u` is the unit direction with polar angle `theta`
/// about `polar`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    domain: ParamRect,
    semi_axes: [f64; 3],
    polar: PolarAxis,
    derivatives: Derivatives,
}

impl Chart {
    pub fn spherical(semi_axes: [f64; 3], polar: PolarAxis, domain: ParamRect) -> Self {
        Self { domain, semi_axes, polar, derivatives: Derivatives::Analytic }
    }

    pub fn with_derivatives(mut self, derivatives: Derivatives) -> Self {
        self.derivatives = derivatives;
        self
    }

    pub fn domain(&self) -> &ParamRect {
        &self.domain
    }

    pub fn polar_axis(&self) -> PolarAxis {
        self.polar
    }

    pub fn semi_axes(&self) -> [f64; 3] {
        self.semi_axes
    }

    fn direction(&self, theta: f64, phi: f64) -> Vec3 {
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        let (sp, cp) = (libm::sin(phi), libm::cos(phi));
        match self.polar {
            PolarAxis::Z => [st * cp, st * sp, ct],
            PolarAxis::X => [ct, st * cp, st * sp],
        }
    }

    fn direction_derivatives(&self, theta: f64, phi: f64) -> [Vec3; 2] {
        let (st, ct) = (libm::sin(theta), libm::cos(theta));
        let (sp, cp) = (libm::sin(phi), libm::cos(phi));
        match self.polar {
            PolarAxis::Z => [[ct * cp, ct * sp, -st], [-st * sp, st * cp, 0.0]],
            PolarAxis::X => [[-st, ct * cp, ct * sp], [0.0, -st * sp, st * cp]],
        }
    }

    fn stretch(&self, u: Vec3) -> Vec3 {
        [self.semi_axes[0] * u[0], self.semi_axes[1] * u[1], self.semi_axes[2] * u[2]]
    }

    /// `s(x')`
    pub fn point(&self, x: &[f64; 2]) -> Vec3 {
        self.stretch(self.direction(x[0], x[1]))
    }

    /// `(ds/dx_2, ds/dx_3)`
    pub fn tangents(&self, x: &[f64; 2]) -> [Vec3; 2] {
        match self.derivatives {
            Derivatives::Analytic => {
                let [d0, d1] = self.direction_derivatives(x[0], x[1]);
                [self.stretch(d0), self.stretch(d1)]
            }
            Derivatives::CentralDifference { step } => {
                let fd = |k: usize| {
                    let mut xp = *x;
                    let mut xm = *x;
                    xp[k] += step;
                    xm[k] -= step;
                    let (p, m) = (self.point(&xp), self.point(&xm));
                    [(p[0] - m[0]) / (2.0 * step), (p[1] - m[1]) / (2.0 * step), (p[2] - m[2]) / (2.0 * step)]
                };
                [fd(0), fd(1)]
            }
        }
    }

    /// Induced metric `g_jk = <ds/dx_j, ds/dx_k>`.
    pub fn metric(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        let [t0, t1] = self.tangents(x);
        let g01 = dot(&t0, &t1);
        [[dot(&t0, &t0), g01], [g01, dot(&t1, &t1)]]
    }

    /// Surface element `sqrt(det g)`.
    pub fn area_element(&self, x: &[f64; 2]) -> f64 {
        let g = self.metric(x);
        libm::sqrt((g[0][0] * g[1][1] - g[0][1] * g[1][0]).max(0.0))
    }

    /// Unit outward normal at `x'`.
    pub fn normal(&self, x: &[f64; 2]) -> Result<Vec3, SurfaceError> {
        if !self.domain.contains(x) {
            return Err(SurfaceError::OutsideDomain(x[0], x[1]));
        }
        let g = self.metric(x);
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        if !(det > MIN_GRAM_DET) {
            return Err(SurfaceError::ChartDegenerate(x[0], x[1], det));
        }
        let [t0, t1] = self.tangents(x);
        normalize(&cross(&t0, &t1)).ok_or(SurfaceError::ChartDegenerate(x[0], x[1], det))
    }

    /// Parameters of the surface point `p`, if it lies in this chart's domain.
    pub fn locate(&self, p: &Vec3) -> Option<[f64; 2]> {
        let u = [p[0] / self.semi_axes[0], p[1] / self.semi_axes[1], p[2] / self.semi_axes[2]];
        let (polar, a, b) = match self.polar {
            PolarAxis::Z => (u[2], u[0], u[1]),
            PolarAxis::X => (u[0], u[1], u[2]),
        };
        let theta = libm::acos(polar.clamp(-1.0, 1.0));
        let mut phi = libm::atan2(b, a);
        if phi < 0.0 {
            phi += 2.0 * core::f64::consts::PI;
        }
        let x = [theta, phi];
        self.domain.contains(&x).then_some(x)
    }

    /// `|cos theta|` of the point, i.e. closeness to this chart's poles.
    pub fn polar_closeness(&self, p: &Vec3) -> f64 {
        match self.polar {
            PolarAxis::Z => (p[2] / self.semi_axes[2]).abs(),
            PolarAxis::X => (p[0] / self.semi_axes[0]).abs(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn rect() -> ParamRect {
        ParamRect { lo: [0.1, 0.0], hi: [PI - 0.1, 2.0 * PI] }
    }

    #[test]
    fn finite_differences_match_analytic() {
        let analytic = Chart::spherical([2.0, 1.0, 1.5], PolarAxis::X, rect());
        let fd = analytic.clone().with_derivatives(Derivatives::CentralDifference { step: FD_STEP });
        let x = [1.1, 2.3];
        let (a, f) = (analytic.tangents(&x), fd.tangents(&x));
        for k in 0..2 {
            for i in 0..3 {
                assert!((a[k][i] - f[k][i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn locate_inverts_point() {
        for polar in [PolarAxis::Z, PolarAxis::X] {
            let c = Chart::spherical([2.0, 1.0, 1.0], polar, rect());
            let x = [0.7, 4.0];
            let back = c.locate(&c.point(&x)).unwrap();
            assert!((back[0] - x[0]).abs() < 1e-12 && (back[1] - x[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn normal_outside_domain_is_error() {
        let c = Chart::spherical([1.0; 3], PolarAxis::Z, rect());
        assert!(matches!(c.normal(&[0.0, 1.0]), Err(SurfaceError::OutsideDomain(..))));
    }

    #[test]
    fn degenerate_chart_is_reported() {
        let c = Chart::spherical([1.0; 3], PolarAxis::Z, ParamRect { lo: [0.0, 0.0], hi: [PI, 2.0 * PI] });
        assert!(matches!(c.normal(&[0.0, 1.0]), Err(SurfaceError::ChartDegenerate(..))));
    }
}
