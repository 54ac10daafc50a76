//! CSV and JSON emission.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use weyl_core::CountReport;

use crate::LabError;

pub const CSV_HEADER: &str = "r,N_scalar,N_system,W,borderline";

/// `printf("%.17g", x)`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_fraction(&format!("{:.*}", (16 - exp) as usize, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn scan_csv(report: &CountReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &report.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_g17(p.r),
            p.n_scalar,
            p.n_system,
            fmt_g17(p.weyl),
            p.borderline
        ));
    }
    out
}

/// Wraps a payload with the resolved configuration and the program version.
pub fn envelope(command: &str, config: Value, payload: Value) -> Value {
    json!({
        "command": command,
        "config": config,
        "version": concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")),
        "result": payload,
    })
}

/// Pretty JSON with keys sorted and a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    // serde_json's default map is ordered by key
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and an atomic rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), LabError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| LabError::io(path, e))?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (75.0, "75"),
            (0.1, "0.10000000000000001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (3.0833333333333335, "3.0833333333333335"),
            (1e17, "1e+17"),
            (1.5e-5, "1.5e-05"),
            (1e-4, "0.0001"),
            (-2.5, "-2.5"),
            (123456789012345680.0, "1.2345678901234568e+17"),
            (12345678901234567.0, "12345678901234568"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn json_keys_are_sorted() {
        let v = envelope("weyl", json!({"zeta": 1, "alpha": 2}), json!({"b": 1, "a": 2}));
        let s = to_json_string(&v);
        assert!(s.find("\"alpha\"").unwrap() < s.find("\"zeta\"").unwrap());
        assert!(s.find("\"command\"").unwrap() < s.find("\"version\"").unwrap());
        assert!(s.ends_with("}\n"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
    }

    proptest! {
        #[test]
        fn g17_round_trips(x in proptest::num::f64::NORMAL) {
            prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
