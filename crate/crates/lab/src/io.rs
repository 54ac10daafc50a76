//! OFF meshes, per-vertex damping tables and complex point lists.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use weyl_core::num_complex::Complex64;
use weyl_core::SurfaceMesh;

use crate::LabError;

fn read(path: &Path) -> Result<String, LabError> {
    fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

/// Non-empty lines with `#` comments removed, paired with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses an ASCII OFF file with triangle faces.
pub fn parse_off(text: &str, path: &Path) -> Result<SurfaceMesh, LabError> {
    let err = |line: usize, msg: String| LabError::Parse { path: path.to_path_buf(), line, msg };
    let mut tokens = content_lines(text).flat_map(|(n, l)| l.split_whitespace().map(move |t| (n, t)));
    let mut last_line = 1;
    let mut next = |what: &str| -> Result<(usize, String), LabError> {
        match tokens.next() {
            Some((n, t)) => {
                last_line = n;
                Ok((n, t.to_string()))
            }
            None => Err(err(last_line, format!("unexpected end of file, expected {what}"))),
        }
    };
    let (n, header) = next("the OFF header")?;
    if header != "OFF" {
        return Err(err(n, format!("expected header `OFF`, found `{header}`")));
    }
    let mut count = |what: &str| -> Result<usize, LabError> {
        let (n, t) = next(what)?;
        t.parse().map_err(|_| err(n, format!("invalid {what} `{t}`")))
    };
    let nv = count("vertex count")?;
    let nf = count("face count")?;
    let _edges = count("edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let mut p = [0.0f64; 3];
        for c in &mut p {
            let (n, t) = next("a vertex coordinate")?;
            *c = t.parse().map_err(|_| err(n, format!("invalid coordinate `{t}`")))?;
            if !c.is_finite() {
                return Err(err(n, format!("non-finite coordinate `{t}`")));
            }
        }
        vertices.push(p);
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, k) = next("a face size")?;
        if k != "3" {
            return Err(err(n, format!("only triangle faces are supported, found a face with {k} vertices")));
        }
        let mut t = [0usize; 3];
        for v in &mut t {
            let (n, s) = next("a face index")?;
            *v = s.parse().map_err(|_| err(n, format!("invalid face index `{s}`")))?;
            if *v >= nv {
                return Err(err(n, format!("face index {v} out of range for {nv} vertices")));
            }
        }
        triangles.push(t);
    }
    Ok(SurfaceMesh::new(vertices, triangles)?)
}

pub fn read_off(path: &Path) -> Result<SurfaceMesh, LabError> {
    parse_off(&read(path)?, path)
}

/// Shortest round-trip representation, so written meshes reload bit-exactly.
pub fn format_off(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "OFF\n{} {} 0", mesh.vertices().len(), mesh.triangles().len());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    for t in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

pub fn write_off(mesh: &SurfaceMesh, path: &Path) -> Result<(), LabError> {
    fs::write(path, format_off(mesh)).map_err(|e| LabError::io(path, e))
}

/// One damping value per line.
pub fn parse_gamma_table(text: &str, path: &Path) -> Result<Vec<f64>, LabError> {
    content_lines(text)
        .map(|(n, l)| {
            let v: f64 = l
                .parse()
                .map_err(|_| LabError::Parse { path: path.to_path_buf(), line: n, msg: format!("invalid value `{l}`") })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(LabError::Parse { path: path.to_path_buf(), line: n, msg: format!("damping {v} is not positive") });
            }
            Ok(v)
        })
        .collect()
}

pub fn read_gamma_table(path: &Path) -> Result<Vec<f64>, LabError> {
    parse_gamma_table(&read(path)?, path)
}

/// `re im` per line.
pub fn parse_points(text: &str, path: &Path) -> Result<Vec<Complex64>, LabError> {
    content_lines(text)
        .map(|(n, l)| {
            let bad = || LabError::Parse { path: path.to_path_buf(), line: n, msg: format!("expected `re im`, found `{l}`") };
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(bad());
            }
            let re: f64 = parts[0].parse().map_err(|_| bad())?;
            let im: f64 = parts[1].parse().map_err(|_| bad())?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

pub fn read_points(path: &Path) -> Result<Vec<Complex64>, LabError> {
    parse_points(&read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use weyl_core::surface::icosphere;

    const TETRA: &str = "OFF\n# a tetrahedron\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn parses_tetrahedron() {
        let m = parse_off(TETRA, Path::new("t.off")).unwrap();
        assert_eq!(m.vertices().len(), 4);
        assert_eq!(m.triangles()[1], [0, 3, 1]);
    }

    #[test]
    fn header_with_counts_on_one_line() {
        let text = TETRA.replacen("OFF\n# a tetrahedron\n4 4 6", "OFF 4 4 6", 1);
        assert_eq!(parse_off(&text, Path::new("t.off")).unwrap().vertices().len(), 4);
    }

    #[test]
    fn round_trip_is_exact() {
        let m = icosphere(2);
        let back = parse_off(&format_off(&m), Path::new("x.off")).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = TETRA.replace("3 0 3 1", "4 0 3 1 2");
        match parse_off(&bad, Path::new("t.off")) {
            Err(LabError::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_off("PLY\n", Path::new("t")), Err(LabError::Parse { line: 1, .. })));
        assert!(matches!(parse_off("OFF\n4 4", Path::new("t")), Err(LabError::Parse { .. })));
        let oob = TETRA.replace("3 1 3 2", "3 1 3 9");
        assert!(matches!(parse_off(&oob, Path::new("t")), Err(LabError::Parse { .. })));
    }

    #[test]
    fn degenerate_mesh_is_a_quality_error() {
        let flat = "OFF\n3 1 0\n0 0 0\n1 0 0\n2 0 0\n3 0 1 2\n";
        assert!(matches!(parse_off(flat, Path::new("f.off")), Err(LabError::Surface(_))));
    }

    #[test]
    fn gamma_table_and_points() {
        let t = parse_gamma_table("0.5\n# c\n2.5\n\n3\n", Path::new("g")).unwrap();
        assert_eq!(t, [0.5, 2.5, 3.0]);
        assert!(parse_gamma_table("0.5\n-1\n", Path::new("g")).is_err());
        let p = parse_points("-3 0\n-3 0.1\n", Path::new("p")).unwrap();
        assert_eq!(p[1], Complex64::new(-3.0, 0.1));
        assert!(parse_points("1\n", Path::new("p")).is_err());
    }
}
