//! Canonical world-file serialization.
//!
//! The document is JSON with keys in sorted order and every float written
//! with six decimals, so `save(load(bytes)) == bytes` for any saved world.
//! Occupied cells may carry `null` elevation.

use super::GridWorld;
use crate::error::{Error, Result};
use serde::Deserialize;
use std::fmt::Write;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldFile {
    name: String,
    resolution: f64,
    width: usize,
    height: usize,
    max_step: f64,
    occupancy: Vec<u8>,
    elevation: Vec<Option<f64>>,
}

pub(crate) fn fmt_f64(out: &mut String, v: f64) {
    if v.is_finite() {
        let v = if v == 0.0 { 0.0 } else { v };
        let s = format!("{v:.6}");
        // "-0.000000" would not survive a round trip distinctly
        if s == "-0.000000" {
            out.push_str("0.000000");
        } else {
            out.push_str(&s);
        }
    } else {
        out.push_str("null");
    }
}

pub(crate) fn write_f64_array(out: &mut String, values: &[f64]) {
    out.push('[');
    for (k, &v) in values.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        fmt_f64(out, v);
    }
    out.push(']');
}

pub fn save_world(world: &GridWorld) -> String {
    let mut out = String::with_capacity(world.len() * 12 + 256);
    out.push_str("{\n\"elevation\":");
    let elev: Vec<f64> = world
        .elevation()
        .iter()
        .zip(world.occupancy())
        .map(|(&z, &occ)| if occ && !z.is_finite() { f64::NAN } else { z })
        .collect();
    write_f64_array(&mut out, &elev);
    let _ = write!(out, ",\n\"height\":{},\n\"max_step\":", world.height());
    fmt_f64(&mut out, world.max_step());
    out.push_str(",\n\"name\":");
    out.push_str(&serde_json::to_string(world.name()).expect("string serializes"));
    out.push_str(",\n\"occupancy\":[");
    for (k, &o) in world.occupancy().iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push(if o { '1' } else { '0' });
    }
    out.push_str("],\n\"resolution\":");
    fmt_f64(&mut out, world.resolution());
    let _ = write!(out, ",\n\"width\":{}\n}}\n", world.width());
    out
}

pub fn load_world(bytes: &[u8]) -> Result<GridWorld> {
    let file: WorldFile =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    let n = file.width * file.height;
    if file.occupancy.len() != n {
        return Err(Error::DimensionMismatch {
            field: "occupancy",
            expected: n,
            got: file.occupancy.len(),
        });
    }
    if file.elevation.len() != n {
        return Err(Error::DimensionMismatch {
            field: "elevation",
            expected: n,
            got: file.elevation.len(),
        });
    }
    let occupancy = file
        .occupancy
        .iter()
        .map(|&v| match v {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(Error::Malformed(format!("occupancy value {other} is not 0/1"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let elevation = file
        .elevation
        .iter()
        .map(|z| z.unwrap_or(f64::NAN))
        .collect();
    GridWorld::new(
        file.name,
        file.resolution,
        file.width,
        file.height,
        file.max_step,
        occupancy,
        elevation,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_world_loads() {
        let text = br#"{"elevation":[0.0],"height":1,"max_step":0.15,"name":"one","occupancy":[0],"resolution":0.05,"width":1}"#;
        let w = load_world(text).unwrap();
        assert_eq!((w.width(), w.height()), (1, 1));
        let saved = save_world(&w);
        assert_eq!(save_world(&load_world(saved.as_bytes()).unwrap()), saved);
    }

    #[test]
    fn occupancy_length_mismatch() {
        let text = br#"{"elevation":[0.0,0.0],"height":1,"max_step":0.15,"name":"x","occupancy":[0],"resolution":0.05,"width":2}"#;
        assert!(matches!(
            load_world(text),
            Err(Error::DimensionMismatch { field: "occupancy", expected: 2, got: 1 })
        ));
    }

    #[test]
    fn null_elevation_on_free_cell_rejected() {
        let text = br#"{"elevation":[null],"height":1,"max_step":0.15,"name":"x","occupancy":[0],"resolution":0.05,"width":1}"#;
        assert!(matches!(load_world(text), Err(Error::NonFiniteElevation { .. })));
    }

    #[test]
    fn garbage_is_malformed() {
        assert!(matches!(load_world(b"{not json"), Err(Error::Malformed(_))));
        let extra = br#"{"bogus":1,"elevation":[0.0],"height":1,"max_step":0.15,"name":"x","occupancy":[0],"resolution":0.05,"width":1}"#;
        assert!(matches!(load_world(extra), Err(Error::Malformed(_))));
    }

    #[test]
    fn occupied_cells_serialize_null() {
        let w = GridWorld::from_ascii("a", 0.5, &["#."]).unwrap();
        let s = save_world(&w);
        assert!(s.contains("\"elevation\":[null,0.000000]"), "{s}");
        assert!(s.contains("\"occupancy\":[1,0]"));
    }
}
