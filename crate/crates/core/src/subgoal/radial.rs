use crate::error::{Error, Result};
use crate::geometry::wrap_deg;
use serde::{Deserialize, Serialize};

pub const RANGE_BINS: usize = 24;
pub const HEADING_BINS: usize = 48;
/// Meters per range bin.
pub const RANGE_BIN_SIZE: f64 = 0.2;
/// Degrees per heading bin.
pub const HEADING_BIN_SIZE: f64 = 7.5;
pub const MAX_RANGE: f64 = RANGE_BINS as f64 * RANGE_BIN_SIZE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RadialKind {
    /// 1.0 = blocked, 0.0 = free.
    Obstacle,
    /// Non-negative mass.
    Prob,
}

/// Egocentric polar grid: range bin `r` covers `[0.2 r, 0.2 (r+1))` meters and
/// heading bin `h` covers `[7.5 h, 7.5 (h+1))` degrees counterclockwise from
/// the agent's heading.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMap {
    kind: RadialKind,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RadialFile {
    heading_bins: usize,
    kind: RadialKind,
    range_bins: usize,
    values: Vec<Vec<f64>>,
}

impl RadialMap {
    pub fn zeros(kind: RadialKind) -> Self {
        Self {
            kind,
            values: vec![0.0; RANGE_BINS * HEADING_BINS],
        }
    }

    pub fn from_values(kind: RadialKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != RANGE_BINS * HEADING_BINS {
            return Err(Error::DimensionMismatch {
                field: "radial values",
                expected: RANGE_BINS * HEADING_BINS,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameter("radial values must be finite and non-negative".into()));
        }
        Ok(Self { kind, values })
    }

    /// Uniform probability over every bin.
    pub fn uniform() -> Self {
        let n = RANGE_BINS * HEADING_BINS;
        Self {
            kind: RadialKind::Prob,
            values: vec![1.0 / n as f64; n],
        }
    }

    pub fn kind(&self) -> RadialKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index(range: usize, heading: usize) -> usize {
        range * HEADING_BINS + heading
    }

    pub fn bins(idx: usize) -> (usize, usize) {
        (idx / HEADING_BINS, idx % HEADING_BINS)
    }

    pub fn get(&self, range: usize, heading: usize) -> f64 {
        self.values[Self::index(range, heading)]
    }

    pub fn set(&mut self, range: usize, heading: usize, v: f64) {
        self.values[Self::index(range, heading)] = v;
    }

    pub fn add(&mut self, range: usize, heading: usize, v: f64) {
        self.values[Self::index(range, heading)] += v;
    }

    pub fn is_blocked(&self, range: usize, heading: usize) -> bool {
        self.get(range, heading) > 0.5
    }

    /// First blocked range bin along a heading, or `RANGE_BINS` if clear.
    pub fn first_blocked(&self, heading: usize) -> usize {
        (0..RANGE_BINS)
            .find(|&r| self.is_blocked(r, heading))
            .unwrap_or(RANGE_BINS)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Scales to unit mass. All-zero maps stay all-zero.
    pub fn normalize(&mut self) {
        let s = self.sum();
        if s > 0.0 {
            for v in &mut self.values {
                *v /= s;
            }
        }
    }

    pub fn to_json(&self) -> String {
        let file = RadialFile {
            heading_bins: HEADING_BINS,
            kind: self.kind,
            range_bins: RANGE_BINS,
            values: self.values.chunks(HEADING_BINS).map(<[f64]>::to_vec).collect(),
        };
        serde_json::to_string(&file).expect("radial map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RadialFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if file.range_bins != RANGE_BINS || file.heading_bins != HEADING_BINS {
            return Err(Error::Malformed(format!(
                "radial map must be {RANGE_BINS}x{HEADING_BINS}, got {}x{}",
                file.range_bins, file.heading_bins
            )));
        }
        Self::from_values(file.kind, file.values.concat())
    }
}

/// Center range (meters) of a range bin.
pub fn range_center(range: usize) -> f64 {
    (range as f64 + 0.5) * RANGE_BIN_SIZE
}

/// Center angle (degrees) of a heading bin.
pub fn heading_center(heading: usize) -> f64 {
    (heading as f64 + 0.5) * HEADING_BIN_SIZE
}

/// Range bin of `r` meters; the flag is set when `r` lies beyond the last
/// bin and was clamped into it.
pub fn range_bin(r: f64) -> (usize, bool) {
    let b = (r.max(0.0) / RANGE_BIN_SIZE).floor();
    if b >= RANGE_BINS as f64 {
        (RANGE_BINS - 1, r > MAX_RANGE)
    } else {
        (b as usize, false)
    }
}

pub fn heading_bin(theta: f64) -> usize {
    ((wrap_deg(theta) / HEADING_BIN_SIZE).floor() as usize) % HEADING_BINS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_arithmetic() {
        assert_eq!(range_bin(1.03), (5, false));
        assert_eq!(heading_bin(11.0), 1);
        assert!((range_center(5) - 1.1).abs() < 1e-12);
        assert!((heading_center(1) - 11.25).abs() < 1e-12);
        assert_eq!(range_bin(7.0), (23, true));
        assert_eq!(heading_bin(-1.0), 47);
    }

    #[test]
    fn json_round_trip_keeps_shape() {
        let mut m = RadialMap::zeros(RadialKind::Prob);
        m.set(3, 7, 0.25);
        m.set(23, 47, 0.75);
        let back = RadialMap::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"heading_bins":4,"kind":"PROB","range_bins":2,"values":[[0,0,0,0],[0,0,0,0]]}"#;
        assert!(RadialMap::from_json(bad).is_err());
    }

    #[test]
    fn uniform_sums_to_one() {
        assert!((RadialMap::uniform().sum() - 1.0).abs() < 1e-9);
    }
}
