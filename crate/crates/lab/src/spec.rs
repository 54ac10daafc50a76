//! Textual specifications of surfaces, damping fields and `r` grids.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use weyl_core::surface::{icosphere, AnalyticSurface};
use weyl_core::{GammaField, Surface};

use crate::LabError;

/// `unit-sphere`, `ellipsoid:A,B,C`, `icosphere:LEVEL` or `mesh:PATH`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SurfaceSpec {
    UnitSphere,
    Ellipsoid([f64; 3]),
    Icosphere(usize),
    Mesh(PathBuf),
}

fn numbers<T: FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>, String> {
    let v: Vec<T> = s
        .split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("invalid {what} `{s}`"))?;
    if v.len() != n {
        return Err(format!("{what} needs {n} comma-separated values, got `{s}`"));
    }
    Ok(v)
}

impl FromStr for SurfaceSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, arg) = s.split_once(':').map_or((s, None), |(a, b)| (a, Some(b)));
        match (name, arg) {
            ("unit-sphere" | "sphere", None) => Ok(SurfaceSpec::UnitSphere),
            ("ellipsoid", Some(a)) => {
                let v = numbers::<f64>(a, 3, "ellipsoid axes")?;
                if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                    return Err(format!("ellipsoid axes must be positive, got `{a}`"));
                }
                Ok(SurfaceSpec::Ellipsoid([v[0], v[1], v[2]]))
            }
            ("icosphere", Some(l)) => {
                let level: usize = l.trim().parse().map_err(|_| format!("invalid icosphere level `{l}`"))?;
                if level > 7 {
                    return Err(format!("icosphere level {level} is too large (max 7)"));
                }
                Ok(SurfaceSpec::Icosphere(level))
            }
            ("mesh", Some(p)) if !p.is_empty() => Ok(SurfaceSpec::Mesh(PathBuf::from(p))),
            _ => Err(format!(
                "unknown surface `{s}`; expected unit-sphere, ellipsoid:A,B,C, icosphere:LEVEL or mesh:PATH"
            )),
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::UnitSphere => write!(f, "unit-sphere"),
            SurfaceSpec::Ellipsoid([a, b, c]) => write!(f, "ellipsoid:{a},{b},{c}"),
            SurfaceSpec::Icosphere(l) => write!(f, "icosphere:{l}"),
            SurfaceSpec::Mesh(p) => write!(f, "mesh:{}", p.display()),
        }
    }
}

impl From<SurfaceSpec> for String {
    fn from(s: SurfaceSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SurfaceSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl SurfaceSpec {
    pub fn is_mesh(&self) -> bool {
        matches!(self, SurfaceSpec::Icosphere(_) | SurfaceSpec::Mesh(_))
    }

    pub fn load(&self) -> Result<Surface, LabError> {
        Ok(match self {
            SurfaceSpec::UnitSphere => Surface::Analytic(AnalyticSurface::unit_sphere()),
            SurfaceSpec::Ellipsoid([a, b, c]) => Surface::Analytic(AnalyticSurface::ellipsoid(*a, *b, *c)?),
            SurfaceSpec::Icosphere(l) => Surface::Mesh(icosphere(*l)),
            SurfaceSpec::Mesh(p) => Surface::Mesh(crate::io::read_off(p)?),
        })
    }

    pub fn analytic(&self) -> Result<AnalyticSurface, LabError> {
        match self {
            SurfaceSpec::UnitSphere => Ok(AnalyticSurface::unit_sphere()),
            SurfaceSpec::Ellipsoid([a, b, c]) => Ok(AnalyticSurface::ellipsoid(*a, *b, *c)?),
            other => Err(LabError::Usage(format!("`{other}` is not an analytic surface"))),
        }
    }
}

/// `constant:C`, `affine:A,B,WX,WY,WZ` (`A + B <w, x>`) or `table:PATH`,
/// optionally prefixed by `inv-` for the reciprocal field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct GammaSpec {
    pub kind: GammaSpecKind,
    pub inverted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GammaSpecKind {
    Constant(f64),
    Affine { offset: f64, slope: f64, direction: [f64; 3] },
    Table(PathBuf),
}

impl FromStr for GammaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (inverted, rest) = match s.strip_prefix("inv-") {
            Some(r) => (true, r),
            None => (false, s),
        };
        let (name, arg) = rest.split_once(':').ok_or_else(|| format!("invalid damping `{s}`"))?;
        let kind = match name {
            "constant" => {
                let v: f64 = arg.trim().parse().map_err(|_| format!("invalid constant `{arg}`"))?;
                GammaSpecKind::Constant(v)
            }
            "affine" => {
                let v = numbers::<f64>(arg, 5, "affine damping")?;
                GammaSpecKind::Affine { offset: v[0], slope: v[1], direction: [v[2], v[3], v[4]] }
            }
            "table" if !arg.is_empty() => GammaSpecKind::Table(PathBuf::from(arg)),
            _ => {
                return Err(format!(
                    "unknown damping `{s}`; expected constant:C, affine:A,B,WX,WY,WZ or table:PATH (optionally inv-)"
                ))
            }
        };
        Ok(GammaSpec { kind, inverted })
    }
}

impl fmt::Display for GammaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "inv-")?;
        }
        match &self.kind {
            GammaSpecKind::Constant(c) => write!(f, "constant:{c}"),
            GammaSpecKind::Affine { offset, slope, direction: [x, y, z] } => {
                write!(f, "affine:{offset},{slope},{x},{y},{z}")
            }
            GammaSpecKind::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

impl From<GammaSpec> for String {
    fn from(s: GammaSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for GammaSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl GammaSpec {
    pub fn load(&self) -> Result<GammaField, LabError> {
        let field = match &self.kind {
            GammaSpecKind::Constant(c) => GammaField::constant(*c)?,
            GammaSpecKind::Affine { offset, slope, direction } => GammaField::affine(*offset, *slope, *direction)?,
            GammaSpecKind::Table(p) => GammaField::per_vertex(crate::io::read_gamma_table(p)?)?,
        };
        Ok(if self.inverted { field.reciprocal() } else { field })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

/// `steps` points from `r_min` to `r_max` inclusive.
pub fn r_grid(r_min: f64, r_max: f64, steps: usize, spacing: Spacing) -> Result<Vec<f64>, LabError> {
    if steps < 2 {
        return Err(LabError::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(LabError::Usage(format!("need 0 < r-min < r-max, got {r_min} and {r_max}")));
    }
    let n = (steps - 1) as f64;
    let grid = (0..steps)
        .map(|k| {
            let t = k as f64 / n;
            if k == steps - 1 {
                r_max
            } else {
                match spacing {
                    Spacing::Linear => r_min + (r_max - r_min) * t,
                    Spacing::Log => r_min * (r_max / r_min).powf(t),
                }
            }
        })
        .collect();
    Ok(grid)
}

/// Explicit comma-separated grid, e.g. `5,10,20`.
pub fn parse_r_list(s: &str) -> Result<Vec<f64>, LabError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| LabError::Usage(format!("invalid r list `{s}`")))?;
    if v.is_empty() || v.iter().any(|r| !(*r > 0.0 && r.is_finite())) || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::Usage(format!("r list `{s}` must be positive and strictly ascending")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn surface_specs() {
        assert_eq!("unit-sphere".parse::<SurfaceSpec>().unwrap(), SurfaceSpec::UnitSphere);
        assert_eq!("ellipsoid:2,1,1".parse::<SurfaceSpec>().unwrap(), SurfaceSpec::Ellipsoid([2.0, 1.0, 1.0]));
        assert_eq!("icosphere:4".parse::<SurfaceSpec>().unwrap(), SurfaceSpec::Icosphere(4));
        assert!("ellipsoid:2,1".parse::<SurfaceSpec>().is_err());
        assert!("ellipsoid:2,0,1".parse::<SurfaceSpec>().is_err());
        assert!("torus".parse::<SurfaceSpec>().is_err());
    }

    #[test]
    fn gamma_specs() {
        let g: GammaSpec = "inv-affine:2,0.5,0,0,1".parse().unwrap();
        assert!(g.inverted);
        assert_eq!(g.kind, GammaSpecKind::Affine { offset: 2.0, slope: 0.5, direction: [0.0, 0.0, 1.0] });
        assert_eq!(g.to_string(), "inv-affine:2,0.5,0,0,1");
        let field = g.load().unwrap();
        assert!(field.is_inverted());
        assert!("constant:x".parse::<GammaSpec>().is_err());
        assert!("quadratic:1".parse::<GammaSpec>().is_err());
        assert!(matches!("constant:-1".parse::<GammaSpec>().unwrap().load(), Err(LabError::Surface(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(r_grid(5.0, 20.0, 4, Spacing::Linear).unwrap(), [5.0, 10.0, 15.0, 20.0]);
        let g = r_grid(5.0, 20.0, 3, Spacing::Log).unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12 && g[2] == 20.0);
        assert!(matches!(r_grid(5.0, 20.0, 1, Spacing::Linear), Err(LabError::Usage(_))));
        assert_eq!(parse_r_list("5, 10,20").unwrap(), [5.0, 10.0, 20.0]);
        assert!(parse_r_list("5,5").is_err());
    }

    proptest! {
        #[test]
        fn gamma_spec_display_round_trips(c in 0.01f64..50.0, inv: bool) {
            let s = GammaSpec { kind: GammaSpecKind::Constant(c), inverted: inv };
            prop_assert_eq!(s.to_string().parse::<GammaSpec>().unwrap(), s);
        }

        #[test]
        fn grids_are_ascending(a in 0.1f64..10.0, span in 0.1f64..50.0, steps in 2usize..40, log: bool) {
            let sp = if log { Spacing::Log } else { Spacing::Linear };
            let g = r_grid(a, a + span, steps, sp).unwrap();
            prop_assert_eq!(g.len(), steps);
            prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
