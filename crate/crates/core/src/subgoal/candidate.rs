use crate::geometry::{snap_heading, Point3};
use serde::{Deserialize, Serialize};

/// Panorama geometry: 12 headings 30° apart at three elevation rows.
pub const VIEW_HEADINGS: usize = 12;
pub const VIEW_ELEVATIONS: [f64; 3] = [-30.0, 0.0, 30.0];
pub const VIEW_COUNT: usize = VIEW_HEADINGS * VIEW_ELEVATIONS.len();

/// A reachable location offered to the agent, egocentric to the pose it was
/// generated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgoalCandidate {
    /// Planar distance, meters.
    pub r: f64,
    /// Bearing relative to the agent's heading, `[0, 360)`.
    pub theta: f64,
    /// Elevation angle, degrees.
    pub phi: f64,
    pub view_index: usize,
    pub mass: f64,
    /// Graph node the candidate stands for, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<usize>,
    /// Absolute position of the candidate's source location, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Point3>,
    /// Set when `r` exceeded the radial map range and was clamped.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub clamped: bool,
}

impl SubgoalCandidate {
    pub fn new(r: f64, theta: f64, phi: f64, mass: f64) -> Self {
        Self {
            r,
            theta,
            phi,
            view_index: candidate_view_index(theta, phi),
            mass,
            node: None,
            target: None,
            clamped: false,
        }
    }
}

/// Panorama view that most closely centers a candidate: heading slot is the
/// nearest 30° multiple (ties down), row the nearest of -30/0/+30 (ties to
/// the lower row).
pub fn candidate_view_index(theta: f64, phi: f64) -> usize {
    let slot = (snap_heading(theta, 30.0) / 30.0).round() as usize % VIEW_HEADINGS;
    let mut row = 0;
    for (k, e) in VIEW_ELEVATIONS.iter().enumerate() {
        if (phi - e).abs() < (phi - VIEW_ELEVATIONS[row]).abs() {
            row = k;
        }
    }
    row * VIEW_HEADINGS + slot
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn view_index_examples() {
        assert_eq!(candidate_view_index(0.0, 0.0), 12);
        assert_eq!(candidate_view_index(170.0, 0.0), 18);
        assert_eq!(candidate_view_index(0.0, 20.0), 24);
        assert_eq!(candidate_view_index(15.0, 0.0), 12);
        assert_eq!(candidate_view_index(359.0, -15.0), 0);
        assert_eq!(candidate_view_index(345.0, -80.0), 11);
    }

    #[test]
    fn view_index_in_range() {
        for t in 0..3600 {
            for p in [-90.0, -30.0, -15.0, 0.0, 15.0, 45.0] {
                assert!(candidate_view_index(t as f64 / 10.0, p) < VIEW_COUNT);
            }
        }
    }
}
