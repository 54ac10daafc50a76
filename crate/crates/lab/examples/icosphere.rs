//! Writes a subdivided icosahedron as an OFF file.
//!
//! cargo run -p weyl-lab --example icosphere -- 4 icosphere4.off

use std::path::PathBuf;

fn main() {
    let mut args = std::env::args().skip(1);
    let level: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let path = PathBuf::from(args.next().unwrap_or_else(|| format!("icosphere{level}.off")));
    let mesh = weyl_core::surface::icosphere(level);
    if let Err(e) = weyl_lab::io::write_off(&mesh, &path) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    println!("{}: {} vertices, {} triangles", path.display(), mesh.vertices().len(), mesh.triangles().len());
}
