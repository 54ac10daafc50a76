use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Surface, SurfaceError};
use crate::geom::{dot, norm, scale, Vec3};

/// Where a field is evaluated: an arbitrary surface point, or a mesh vertex
/// (needed by per-vertex tables).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Site {
    Point(Vec3),
    Vertex(usize, Vec3),
}

impl Site {
    pub fn position(&self) -> &Vec3 {
        match self {
            Site::Point(p) | Site::Vertex(_, p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GammaKind {
    Constant { value: f64 },
    /// `offset + slope * <direction, x>` with a unit `direction`.
    Affine { offset: f64, slope: f64, direction: Vec3 },
    PerVertex { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    BelowOne,
    AboveOne,
}

/// Extremes of the damping over a surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRange {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub regime: Regime,
    /// `min gamma0`
    pub c0: f64,
    /// `max gamma0`
    pub c1: f64,
}

/// The damping coefficient `gamma` of the impedance boundary condition.
///
/// `kind` gives an expression `e(x)`; the damping is `gamma = e` or, for an
/// inverted field, `gamma = 1 / e`. The effective damping
/// `gamma0 = max{gamma, 1/gamma}` depends on `e` alone, so a field and its
/// reciprocal yield bit-identical `gamma0` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaField {
    kind: GammaKind,
    inverted: bool,
}

impl GammaField {
    pub fn constant(value: f64) -> Result<Self, SurfaceError> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(SurfaceError::InvalidField(format!("constant damping {value} is not positive")));
        }
        Ok(Self { kind: GammaKind::Constant { value }, inverted: false })
    }

    pub fn affine(offset: f64, slope: f64, direction: Vec3) -> Result<Self, SurfaceError> {
        let n = norm(&direction);
        if !((n - 1.0).abs() <= 1e-9) {
            return Err(SurfaceError::InvalidField(format!("affine direction has norm {n}, expected a unit vector")));
        }
        if !(offset.is_finite() && slope.is_finite()) {
            return Err(SurfaceError::InvalidField("affine coefficients must be finite".to_string()));
        }
        Ok(Self { kind: GammaKind::Affine { offset, slope, direction: scale(&direction, 1.0 / n) }, inverted: false })
    }

    pub fn per_vertex(values: Vec<f64>) -> Result<Self, SurfaceError> {
        if values.is_empty() {
            return Err(SurfaceError::InvalidField("per-vertex table is empty".to_string()));
        }
        Ok(Self { kind: GammaKind::PerVertex { values }, inverted: false })
    }

    /// The field `1 / gamma`.
    pub fn reciprocal(&self) -> Self {
        Self { kind: self.kind.clone(), inverted: !self.inverted }
    }

    pub fn kind(&self) -> &GammaKind {
        &self.kind
    }

    pub fn is_inverted(&self) -> bool {
        self.inverted
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, GammaKind::Constant { .. })
    }

    fn expression(&self, site: &Site) -> Result<f64, SurfaceError> {
        match (&self.kind, site) {
            (GammaKind::Constant { value }, _) => Ok(*value),
            (GammaKind::Affine { offset, slope, direction }, s) => Ok(offset + slope * dot(direction, s.position())),
            (GammaKind::PerVertex { values }, Site::Vertex(i, _)) => values
                .get(*i)
                .copied()
                .ok_or_else(|| SurfaceError::InvalidField(format!("no table entry for vertex {i}"))),
            (GammaKind::PerVertex { .. }, Site::Point(_)) => {
                Err(SurfaceError::InvalidField("per-vertex damping is only defined at mesh vertices".to_string()))
            }
        }
    }

    pub fn gamma(&self, site: &Site) -> Result<f64, SurfaceError> {
        let e = self.expression(site)?;
        Ok(if self.inverted { 1.0 / e } else { e })
    }

    /// `gamma0 = max{gamma, 1/gamma}`; errors where `gamma` is not positive or
    /// equals 1.
    pub fn gamma0(&self, site: &Site) -> Result<f64, SurfaceError> {
        gamma0_of_expression(self.expression(site)?)
    }

    /// For fields depending on the position only through `<w, x>`, returns
    /// `w` (any unit vector for constants).
    pub fn symmetry_axis(&self) -> Option<Vec3> {
        match &self.kind {
            GammaKind::Constant { .. } => Some([0.0, 0.0, 1.0]),
            GammaKind::Affine { direction, .. } => Some(*direction),
            GammaKind::PerVertex { .. } => None,
        }
    }

    /// `gamma0` as a function of `mu = <w, x>` for axisymmetric fields.
    pub fn gamma0_along_axis(&self, mu: f64) -> Result<f64, SurfaceError> {
        let e = match &self.kind {
            GammaKind::Constant { value } => *value,
            GammaKind::Affine { offset, slope, .. } => offset + slope * mu,
            GammaKind::PerVertex { .. } => {
                return Err(SurfaceError::InvalidField("per-vertex damping has no symmetry axis".to_string()))
            }
        };
        gamma0_of_expression(e)
    }

    /// Validates the field on `surface`: positive, and entirely below or
    /// entirely above 1.
    pub fn range_on(&self, surface: &Surface) -> Result<GammaRange, SurfaceError> {
        let (emin, emax) = match &self.kind {
            GammaKind::Constant { value } => (*value, *value),
            GammaKind::Affine { offset, slope, direction } => {
                let (lo, hi) = surface.support_range(direction);
                let (a, b) = (offset + slope * lo, offset + slope * hi);
                (a.min(b), a.max(b))
            }
            GammaKind::PerVertex { values } => {
                match surface.vertex_count() {
                    Some(n) if n == values.len() => {}
                    Some(n) => {
                        return Err(SurfaceError::InvalidField(format!(
                            "per-vertex table has {} entries for {n} vertices",
                            values.len()
                        )))
                    }
                    None => {
                        return Err(SurfaceError::InvalidField(
                            "per-vertex damping needs a mesh surface".to_string(),
                        ))
                    }
                }
                values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
            }
        };
        if !(emin > 0.0) || !emax.is_finite() {
            return Err(SurfaceError::InvalidField(format!("damping must be positive and finite, range [{emin}, {emax}]")));
        }
        let (c0, c1, expr_regime) = if emin > 1.0 {
            (emin, emax, Regime::AboveOne)
        } else if emax < 1.0 {
            (1.0 / emax, 1.0 / emin, Regime::BelowOne)
        } else {
            return Err(SurfaceError::InvalidField(format!(
                "damping range [{emin}, {emax}] touches 1; it must lie entirely below or above 1"
            )));
        };
        let (gamma_min, gamma_max, regime) = if self.inverted {
            let flipped = match expr_regime {
                Regime::AboveOne => Regime::BelowOne,
                Regime::BelowOne => Regime::AboveOne,
            };
            (1.0 / emax, 1.0 / emin, flipped)
        } else {
            (emin, emax, expr_regime)
        };
        Ok(GammaRange { gamma_min, gamma_max, regime, c0, c1 })
    }
}

fn gamma0_of_expression(e: f64) -> Result<f64, SurfaceError> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(SurfaceError::InvalidField(format!("damping value {e} is not positive")));
    }
    if e == 1.0 {
        return Err(SurfaceError::InvalidField("damping equals 1".to_string()));
    }
    Ok(if e > 1.0 { e } else { 1.0 / e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{icosphere, AnalyticSurface};
    use proptest::prelude::*;

    fn sphere() -> Surface {
        Surface::Analytic(AnalyticSurface::unit_sphere())
    }

    #[test]
    fn constant_fields() {
        let p = Site::Point([0.0, 0.0, 1.0]);
        assert_eq!(GammaField::constant(0.5).unwrap().gamma0(&p).unwrap(), 2.0);
        assert_eq!(GammaField::constant(3.0).unwrap().gamma0(&p).unwrap(), 3.0);
        assert!(GammaField::constant(1.0).unwrap().gamma0(&p).is_err());
        assert!(GammaField::constant(-1.0).is_err());
    }

    #[test]
    fn reciprocal_of_affine_below_one() {
        // gamma = 1 / (2 + 0.5 z)  =>  gamma0 = 2 + 0.5 z
        let f = GammaField::affine(2.0, 0.5, [0.0, 0.0, 1.0]).unwrap().reciprocal();
        for z in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let s = Site::Point([0.0, libm::sqrt(1.0 - z * z), z]);
            assert!((f.gamma(&s).unwrap() - 1.0 / (2.0 + 0.5 * z)).abs() < 1e-15);
            assert_eq!(f.gamma0(&s).unwrap(), 2.0 + 0.5 * z);
        }
        let r = f.range_on(&sphere()).unwrap();
        assert_eq!(r.regime, Regime::BelowOne);
        assert_eq!((r.c0, r.c1), (1.5, 2.5));
    }

    #[test]
    fn mixed_regime_is_rejected() {
        let f = GammaField::affine(1.0, 0.5, [0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(f.range_on(&sphere()), Err(SurfaceError::InvalidField(_))));
        let g = GammaField::affine(0.2, 0.5, [1.0, 0.0, 0.0]).unwrap();
        assert!(g.range_on(&sphere()).is_err());
    }

    #[test]
    fn per_vertex_needs_matching_mesh() {
        let mesh = icosphere(1);
        let n = mesh.vertices().len();
        let f = GammaField::per_vertex(alloc::vec![0.25; n]).unwrap();
        let r = f.range_on(&Surface::Mesh(mesh.clone())).unwrap();
        assert_eq!((r.c0, r.c1, r.regime), (4.0, 4.0, Regime::BelowOne));
        assert!(f.range_on(&sphere()).is_err());
        assert!(GammaField::per_vertex(alloc::vec![0.25; n - 1]).unwrap().range_on(&Surface::Mesh(mesh)).is_err());
        assert!(f.gamma0(&Site::Point([1.0, 0.0, 0.0])).is_err());
        assert_eq!(f.gamma0(&Site::Vertex(3, [1.0, 0.0, 0.0])).unwrap(), 4.0);
    }

    #[test]
    fn non_unit_direction_rejected() {
        assert!(GammaField::affine(2.0, 0.5, [0.0, 0.0, 2.0]).is_err());
    }

    proptest! {
        #[test]
        fn regime_symmetry(e in 0.01f64..100.0) {
            prop_assume!((e - 1.0).abs() > 1e-9);
            let f = GammaField::constant(e).unwrap();
            let s = Site::Point([1.0, 0.0, 0.0]);
            let g0 = f.gamma0(&s).unwrap();
            prop_assert_eq!(g0, f.reciprocal().gamma0(&s).unwrap());
            prop_assert!(g0 > 1.0);
            // the pointwise reciprocal, evaluated as a fresh constant
            let back = GammaField::constant(1.0 / e).unwrap().gamma0(&s).unwrap();
            prop_assert!((back - g0).abs() <= 1e-12 * g0);
        }
    }
}
