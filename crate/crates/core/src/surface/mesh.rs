use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::SurfaceError;
use crate::geom::{add, cross, dot, norm, normalize, scale, sub, Vec3};

/// Triangles with area below this are rejected.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

/// A closed, consistently oriented triangle mesh with outward orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Vec3>,
}

impl SurfaceMesh {
    /// Validates the connectivity (watertight, manifold, consistently
    /// oriented, outward) and computes area-weighted vertex normals.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, SurfaceError> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(SurfaceError::MeshQuality("mesh has no triangles".into()));
        }
        if vertices.iter().any(|v| v.iter().any(|c| !c.is_finite())) {
            return Err(SurfaceError::MeshQuality("non-finite vertex coordinate".into()));
        }
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(SurfaceError::MeshQuality(format!("triangle {t} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(SurfaceError::MeshQuality(format!("triangle {t} repeats a vertex")));
            }
            let area = triangle_area(&vertices, tri);
            if !(area >= MIN_TRIANGLE_AREA) {
                return Err(SurfaceError::MeshQuality(format!("triangle {t} is degenerate (area {area:e})")));
            }
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &directed {
            if count > 1 {
                return Err(SurfaceError::MeshQuality(format!(
                    "edge ({a}, {b}) is traversed twice in the same direction (inconsistent orientation or non-manifold)"
                )));
            }
            if !directed.contains_key(&(b, a)) {
                return Err(SurfaceError::MeshQuality(format!("edge ({a}, {b}) is on a boundary; mesh is not watertight")));
            }
        }
        let mut used = vec![false; nv];
        triangles.iter().flatten().for_each(|&i| used[i] = true);
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(SurfaceError::MeshQuality(format!("vertex {i} belongs to no triangle")));
        }

        let mut mesh = Self { vertices, triangles, normals: Vec::new() };
        let volume = mesh.signed_volume();
        if !(volume > 0.0) {
            return Err(SurfaceError::MeshQuality(format!("signed volume {volume:e} is not positive (inward orientation)")));
        }
        mesh.normals = mesh.vertex_normals()?;
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }

    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (a, b, c) = (&self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]]);
                dot(a, &cross(b, c)) / 6.0
            })
            .sum()
    }

    pub fn area(&self) -> f64 {
        self.triangles.iter().map(|t| triangle_area(&self.vertices, t)).sum()
    }

    fn vertex_normals(&self) -> Result<Vec<Vec3>, SurfaceError> {
        let mut acc = vec![[0.0; 3]; self.vertices.len()];
        for t in &self.triangles {
            let (a, b, c) = (&self.vertices[t[0]], &self.vertices[t[1]], &self.vertices[t[2]]);
            // |n| = 2 * area: area weighting
            let n = cross(&sub(b, a), &sub(c, a));
            for &i in t {
                acc[i] = add(&acc[i], &n);
            }
        }
        acc.iter()
            .enumerate()
            .map(|(i, n)| {
                normalize(n).ok_or_else(|| SurfaceError::MeshQuality(format!("vertex {i} has a vanishing normal")))
            })
            .collect()
    }

    /// Mixed Voronoi vertex areas: Voronoi cells for non-obtuse triangles,
    /// with the barycentric-style split (1/2, 1/4, 1/4) for obtuse ones.
    /// They sum to the mesh area.
    pub fn vertex_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.vertices.len()];
        for t in &self.triangles {
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            let area = triangle_area(&self.vertices, t);
            let cots = corner_cotangents(&p);
            let obtuse = (0..3).find(|&k| cots[k] < 0.0);
            match obtuse {
                None => {
                    for k in 0..3 {
                        let (j, l) = ((k + 1) % 3, (k + 2) % 3);
                        let ekj = sub(&p[j], &p[k]);
                        let ekl = sub(&p[l], &p[k]);
                        areas[t[k]] += (dot(&ekj, &ekj) * cots[l] + dot(&ekl, &ekl) * cots[j]) / 8.0;
                    }
                }
                Some(o) => {
                    for k in 0..3 {
                        areas[t[k]] += if k == o { area / 2.0 } else { area / 4.0 };
                    }
                }
            }
        }
        areas
    }

    /// Lumped vertex quadrature `sum_i A_i f(i, v_i)`.
    pub fn integrate_vertices(&self, f: impl Fn(usize, &Vec3) -> f64) -> f64 {
        self.vertex_areas().iter().enumerate().map(|(i, a)| a * f(i, &self.vertices[i])).sum()
    }

    pub fn support_range(&self, w: &Vec3) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let s = dot(w, v);
            (lo.min(s), hi.max(s))
        })
    }
}

pub fn triangle_area(vertices: &[Vec3], t: &[usize; 3]) -> f64 {
    let (a, b, c) = (&vertices[t[0]], &vertices[t[1]], &vertices[t[2]]);
    0.5 * norm(&cross(&sub(b, a), &sub(c, a)))
}

/// Cotangent of the interior angle at each corner.
pub(crate) fn corner_cotangents(p: &[Vec3; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for k in 0..3 {
        let u = sub(&p[(k + 1) % 3], &p[k]);
        let v = sub(&p[(k + 2) % 3], &p[k]);
        out[k] = dot(&u, &v) / norm(&cross(&u, &v));
    }
    out
}

/// Icosahedron refined `level` times by edge midpoints, projected onto the
/// unit sphere. Level `k` has `10 * 4^k + 2` vertices.
pub fn icosphere(level: usize) -> SurfaceMesh {
    let t = (1.0 + libm::sqrt(5.0)) / 2.0;
    let raw: [Vec3; 12] = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut vertices: Vec<Vec3> = raw.iter().map(|v| normalize(v).unwrap()).collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let m = scale(&add(&vertices[a], &vertices[b]), 0.5);
                vertices.push(normalize(&m).unwrap());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    SurfaceMesh::new(vertices, triangles).expect("icosphere construction yields a valid mesh")
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn icosphere_counts_and_orientation() {
        for level in 0..4 {
            let m = icosphere(level);
            assert_eq!(m.vertices().len(), 10 * 4usize.pow(level as u32) + 2);
            assert_eq!(m.triangles().len(), 20 * 4usize.pow(level as u32));
            assert!(m.signed_volume() > 0.0);
            for (v, n) in m.vertices().iter().zip(m.normals()) {
                assert!((norm(n) - 1.0).abs() < 1e-12);
                assert!(dot(v, n) > 0.9);
            }
        }
    }

    #[test]
    fn area_converges_from_below_at_second_order() {
        let errs: Vec<f64> = (1..6).map(|l| 4.0 * PI - icosphere(l).area()).collect();
        for w in errs.windows(2) {
            assert!(w[0] > 0.0 && w[1] > 0.0);
            // second order: the error roughly quarters per level
            assert!(w[0] / w[1] > 3.0, "ratio {}", w[0] / w[1]);
        }
    }

    #[test]
    fn voronoi_areas_sum_to_area() {
        let m = icosphere(3);
        let total: f64 = m.vertex_areas().iter().sum();
        assert!((total - m.area()).abs() < 1e-12);
        assert!(m.vertex_areas().iter().all(|&a| a > 0.0));
    }

    #[test]
    fn level4_area_within_half_percent() {
        let m = icosphere(4);
        assert!((m.integrate_vertices(|_, _| 1.0) - 4.0 * PI).abs() < 0.005 * 4.0 * PI);
    }

    #[test]
    fn rejects_open_and_flipped_meshes() {
        let m = icosphere(0);
        let mut open = m.triangles().to_vec();
        open.pop();
        assert!(matches!(SurfaceMesh::new(m.vertices().to_vec(), open), Err(SurfaceError::MeshQuality(_))));

        let flipped: Vec<[usize; 3]> = m.triangles().iter().map(|&[a, b, c]| [a, c, b]).collect();
        let err = SurfaceMesh::new(m.vertices().to_vec(), flipped).unwrap_err();
        assert!(matches!(err, SurfaceError::MeshQuality(ref s) if s.contains("signed volume")));

        let mut one_flipped = m.triangles().to_vec();
        one_flipped[3] = [one_flipped[3][0], one_flipped[3][2], one_flipped[3][1]];
        assert!(SurfaceMesh::new(m.vertices().to_vec(), one_flipped).is_err());
    }

    #[test]
    fn rejects_degenerate_triangle() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let t = vec![[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]];
        let err = SurfaceMesh::new(v, t).unwrap_err();
        assert!(matches!(err, SurfaceError::MeshQuality(ref s) if s.contains("degenerate")));
    }
}
