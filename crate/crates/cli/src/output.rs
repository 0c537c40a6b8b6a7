//! Grids and the realization file formats.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! magic   4 bytes  "ELRF"
//! version u32      1
//! d       u32      values per point (21 tensor components)
//! count   u64      grid points
//! payload count × d f64, grid-major then component-major
//! ```
//!
//! Components follow the 21-entry storage order, listed in the JSON sidecar
//! written next to the file as `<out>.json`.

use crate::config::num;
use elastrf_core::simulate::RealizationField;
use elastrf_core::tensor::component_orbit;
use elastrf_core::{GroupId, Vec3};
use serde_json::json;
use std::fmt::Write;

pub const MAGIC: &[u8; 4] = b"ELRF";
pub const VERSION: u32 = 1;

/// Points of `lattice:nx,ny,nz,h` (x fastest) or of a file with one
/// `x y z` per line.
pub fn parse_grid(src: &str) -> Result<Vec<Vec3>, String> {
    if let Some(spec) = src.strip_prefix("lattice:") {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let [nx, ny, nz, h] = parts.as_slice() else {
            return Err(format!("lattice needs nx,ny,nz,h, got `{spec}`"));
        };
        let count = |s: &str| s.parse::<usize>().map_err(|_| format!("bad lattice size `{s}`"));
        let (nx, ny, nz) = (count(nx)?, count(ny)?, count(nz)?);
        let h: f64 = h.parse().ok().filter(|h: &f64| h.is_finite()).ok_or(format!("bad lattice spacing `{h}`"))?;
        let mut pts = Vec::with_capacity(nx * ny * nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    pts.push(Vec3::new(i as f64 * h, j as f64 * h, k as f64 * h));
                }
            }
        }
        return Ok(pts);
    }
    let text = std::fs::read_to_string(src).map_err(|e| format!("{src}: {e}"))?;
    points_from_text(&text, 3)
        .map(|v| v.into_iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect())
        .map_err(|e| format!("{src}: {e}"))
}

/// Pairs from a file with one `x y z x' y' z'` per line.
pub fn parse_pairs(src: &str) -> Result<Vec<(Vec3, Vec3)>, String> {
    let text = std::fs::read_to_string(src).map_err(|e| format!("{src}: {e}"))?;
    points_from_text(&text, 6)
        .map(|v| v.into_iter().map(|p| (Vec3::new(p[0], p[1], p[2]), Vec3::new(p[3], p[4], p[5]))).collect())
        .map_err(|e| format!("{src}: {e}"))
}

fn points_from_text(text: &str, width: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        let v: Result<Vec<f64>, _> = body.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect();
        match v {
            Ok(v) if v.len() == width && v.iter().all(|x| x.is_finite()) => out.push(v),
            _ => return Err(format!("line {}: expected {width} numbers", n + 1)),
        }
    }
    Ok(out)
}

pub fn component_names() -> Vec<String> {
    (0..21).map(|n| component_orbit(n)[0].iter().map(|i| (i + 1).to_string()).collect()).collect()
}

pub fn realization_bytes(field: &RealizationField) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + field.values.len() * 21 * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&21u32.to_le_bytes());
    out.extend_from_slice(&(field.values.len() as u64).to_le_bytes());
    for v in &field.values {
        for x in v.components() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn realization_csv(field: &RealizationField, points: &[Vec3]) -> String {
    let mut out = String::from("point,x,y,z");
    for c in component_names() {
        write!(out, ",c{c}").unwrap();
    }
    out.push('\n');
    for (n, (v, x)) in field.values.iter().zip(points).enumerate() {
        write!(out, "{n},{},{},{}", num(x.x), num(x.y), num(x.z)).unwrap();
        for c in v.components() {
            write!(out, ",{}", num(*c)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn sidecar(field: &RealizationField, group: GroupId, grid: &str) -> String {
    let m = &field.metadata;
    let v = json!({
        "magic": "ELRF",
        "version": VERSION,
        "group": group.to_string(),
        "class": group.class().name(),
        "d": 21,
        "grid_count": field.values.len(),
        "grid": grid,
        "components": component_names(),
        "byte_order": "little-endian",
        "layout": "grid-major then component-major",
        "seed": m.seed,
        "realization": m.realization,
        "l_max": m.l_max,
        "tail_bound": m.tail,
        "spec_hash": format!("{:016x}", m.spec_hash),
    });
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_order_is_x_fastest() {
        let p = parse_grid("lattice:2,3,1,0.5").unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(p[2], Vec3::new(0.0, 0.5, 0.0));
        assert!(parse_grid("lattice:2,3,0.5").is_err());
        assert!(parse_grid("lattice:2,3,1,x").is_err());
    }

    #[test]
    fn point_files() {
        assert_eq!(points_from_text("# c\n1 2 3\n\n4,5,6\n", 3).unwrap().len(), 2);
        assert!(points_from_text("1 2\n", 3).unwrap_err().contains("line 1"));
    }

    #[test]
    fn component_labels() {
        let c = component_names();
        assert_eq!(c.len(), 21);
        assert_eq!(c.iter().collect::<std::collections::HashSet<_>>().len(), 21);
    }
}
