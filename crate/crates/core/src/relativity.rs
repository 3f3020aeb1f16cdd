//! Boosts along the flight axis in natural units (`c = 1`): times in
//! seconds, distances in light-seconds.
//!
//! The experiment has three events: emission at the origin, detection of the
//! right photon at `(d, d)` (event 1) and of the left photon at `(d, −d)`
//! (event 2). Frame A moves with `+β`, frame B with `−β`.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub x: f64,
    pub label: String,
}

impl SpacetimeEvent {
    pub fn new(t: f64, x: f64, label: impl Into<String>) -> Result<Self> {
        if !t.is_finite() || !x.is_finite() {
            return Err(invalid!("event coordinates must be finite, got ({t}, {x})"));
        }
        Ok(SpacetimeEvent {
            t,
            x,
            label: label.into(),
        })
    }
}

/// Frame velocity as a fraction of `c`, `|β| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FrameVelocity(f64);

impl FrameVelocity {
    pub const REST: FrameVelocity = FrameVelocity(0.0);

    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && math::abs(beta) < 1.0 {
            Ok(FrameVelocity(beta))
        } else {
            Err(invalid!(
                "frame velocity must satisfy |beta| < 1, got {beta}"
            ))
        }
    }

    pub fn beta(self) -> f64 {
        self.0
    }

    pub fn reversed(self) -> Self {
        FrameVelocity(-self.0)
    }
}

impl TryFrom<f64> for FrameVelocity {
    type Error = crate::Error;

    fn try_from(beta: f64) -> Result<Self> {
        FrameVelocity::new(beta)
    }
}

impl From<FrameVelocity> for f64 {
    fn from(v: FrameVelocity) -> f64 {
        v.0
    }
}

/// Source-to-detector distance `d > 0` in light-seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ExperimentGeometry(f64);

impl ExperimentGeometry {
    pub fn new(distance: f64) -> Result<Self> {
        if distance.is_finite() && distance > 0.0 {
            Ok(ExperimentGeometry(distance))
        } else {
            Err(invalid!(
                "detector distance must be positive and finite, got {distance}"
            ))
        }
    }

    pub fn distance(self) -> f64 {
        self.0
    }

    pub fn emission(self) -> SpacetimeEvent {
        SpacetimeEvent {
            t: 0.0,
            x: 0.0,
            label: "emission".into(),
        }
    }

    /// Event 1: the right photon reaches its detector.
    pub fn detect_right(self) -> SpacetimeEvent {
        SpacetimeEvent {
            t: self.0,
            x: self.0,
            label: "detect_right".into(),
        }
    }

    /// Event 2: the left photon reaches its detector.
    pub fn detect_left(self) -> SpacetimeEvent {
        SpacetimeEvent {
            t: self.0,
            x: -self.0,
            label: "detect_left".into(),
        }
    }
}

impl TryFrom<f64> for ExperimentGeometry {
    type Error = crate::Error;

    fn try_from(d: f64) -> Result<Self> {
        ExperimentGeometry::new(d)
    }
}

impl From<ExperimentGeometry> for f64 {
    fn from(g: ExperimentGeometry) -> f64 {
        g.0
    }
}

/// Lorentz factor `1/√(1 − β²)`.
pub fn gamma(beta: FrameVelocity) -> f64 {
    let b = beta.0;
    1.0 / math::sqrt(1.0 - b * b)
}

/// `t' = γ(t − βx)`, `x' = γ(x − βt)`.
pub fn lorentz_transform(event: &SpacetimeEvent, beta: FrameVelocity) -> SpacetimeEvent {
    let g = gamma(beta);
    let b = beta.0;
    SpacetimeEvent {
        t: g * (event.t - b * event.x),
        x: g * (event.x - b * event.t),
        label: event.label.clone(),
    }
}

/// Detection times of events 1 and 2 in frames A and B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventTimes {
    pub t_a_1: f64,
    pub t_a_2: f64,
    pub t_b_1: f64,
    pub t_b_2: f64,
}

pub fn event_times(geometry: ExperimentGeometry, beta: FrameVelocity) -> EventTimes {
    let right = geometry.detect_right();
    let left = geometry.detect_left();
    let t = |e: &SpacetimeEvent, v: FrameVelocity| lorentz_transform(e, v).t;
    EventTimes {
        t_a_1: t(&right, beta),
        t_a_2: t(&left, beta),
        t_b_1: t(&right, beta.reversed()),
        t_b_2: t(&left, beta.reversed()),
    }
}

/// `δt = 2γβd`, the separation of the two detections seen from frame A.
pub fn time_gap(geometry: ExperimentGeometry, beta: FrameVelocity) -> f64 {
    2.0 * gamma(beta) * beta.0 * geometry.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Source,
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionOrder {
    RightFirst,
    LeftFirst,
    Simultaneous,
}

pub fn detection_order(
    geometry: ExperimentGeometry,
    beta: FrameVelocity,
    frame: Frame,
) -> DetectionOrder {
    let v = match frame {
        Frame::Source => FrameVelocity::REST,
        Frame::A => beta,
        Frame::B => beta.reversed(),
    };
    let t_right = lorentz_transform(&geometry.detect_right(), v).t;
    let t_left = lorentz_transform(&geometry.detect_left(), v).t;
    match t_right.partial_cmp(&t_left) {
        Some(core::cmp::Ordering::Less) => DetectionOrder::RightFirst,
        Some(core::cmp::Ordering::Greater) => DetectionOrder::LeftFirst,
        _ => DetectionOrder::Simultaneous,
    }
}

/// `s² = Δt² − Δx²`; positive timelike, negative spacelike.
pub fn invariant_interval(e1: &SpacetimeEvent, e2: &SpacetimeEvent) -> f64 {
    let dt = e2.t - e1.t;
    let dx = e2.x - e1.x;
    dt * dt - dx * dx
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(b: f64) -> FrameVelocity {
        FrameVelocity::new(b).unwrap()
    }

    fn d(x: f64) -> ExperimentGeometry {
        ExperimentGeometry::new(x).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(v(0.0)), 1.0);
        assert_eq!(gamma(v(0.6)), 1.25);
        assert!(FrameVelocity::new(1.0).is_err());
        assert!(FrameVelocity::new(-1.0).is_err());
        assert!(FrameVelocity::new(f64::NAN).is_err());
        assert!(ExperimentGeometry::new(0.0).is_err());
    }

    #[test]
    fn transforms() {
        let e0 = d(1.0).emission();
        for b in [0.0, 0.3, -0.99] {
            let t = lorentz_transform(&e0, v(b));
            assert_eq!((t.t, t.x), (0.0, 0.0));
        }
        let e1 = lorentz_transform(&d(1.0).detect_right(), v(0.6));
        assert_eq!(e1.t, 0.5);
        assert_eq!(e1.label, "detect_right");
        assert_eq!(lorentz_transform(&d(1.0).detect_left(), v(0.6)).t, 2.0);
    }

    #[test]
    fn event_time_examples() {
        let t = event_times(d(1.0), v(0.0));
        assert_eq!([t.t_a_1, t.t_a_2, t.t_b_1, t.t_b_2], [1.0; 4]);
        let t = event_times(d(1.0), v(0.6));
        assert_eq!([t.t_a_1, t.t_a_2, t.t_b_1, t.t_b_2], [0.5, 2.0, 2.0, 0.5]);
        let t = event_times(d(2.0), v(0.6));
        for (got, want) in [
            (t.t_a_1, 1.0),
            (t.t_a_2, 4.0),
            (t.t_b_1, 4.0),
            (t.t_b_2, 1.0),
        ] {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn time_gap_examples() {
        assert_eq!(time_gap(d(1.0), v(0.0)), 0.0);
        assert_eq!(time_gap(d(1.0), v(0.6)), 1.5);
        let t = event_times(d(1.0), v(0.6));
        assert_eq!(t.t_a_2 - t.t_a_1, time_gap(d(1.0), v(0.6)));
        assert!(time_gap(d(1.0), v(0.9)) > time_gap(d(1.0), v(0.6)));
        assert!(time_gap(d(1.0), v(0.999_999)) > 1000.0);
        assert!(time_gap(d(5.0), v(0.6)) > time_gap(d(1.0), v(0.6)));
    }

    #[test]
    fn orderings() {
        assert_eq!(
            detection_order(d(1.0), v(0.6), Frame::A),
            DetectionOrder::RightFirst
        );
        assert_eq!(
            detection_order(d(1.0), v(0.6), Frame::B),
            DetectionOrder::LeftFirst
        );
        assert_eq!(
            detection_order(d(1.0), v(0.6), Frame::Source),
            DetectionOrder::Simultaneous
        );
        assert_eq!(
            detection_order(d(1.0), v(0.0), Frame::A),
            DetectionOrder::Simultaneous
        );
    }

    #[test]
    fn interval_examples() {
        let g = d(1.0);
        assert_eq!(
            invariant_interval(&g.detect_right(), &g.detect_left()),
            -4.0
        );
        assert_eq!(invariant_interval(&g.emission(), &g.detect_right()), 0.0);
        assert_eq!(invariant_interval(&g.detect_left(), &g.detect_left()), 0.0);
    }

    proptest! {
        #[test]
        fn interval_is_invariant(
            t1 in -100.0f64..100.0, x1 in -100.0f64..100.0,
            t2 in -100.0f64..100.0, x2 in -100.0f64..100.0,
            b in -0.99f64..0.99,
        ) {
            let e1 = SpacetimeEvent::new(t1, x1, "e1").unwrap();
            let e2 = SpacetimeEvent::new(t2, x2, "e2").unwrap();
            let s = invariant_interval(&e1, &e2);
            let s2 = invariant_interval(&lorentz_transform(&e1, v(b)), &lorentz_transform(&e2, v(b)));
            prop_assert!((s - s2).abs() <= 1e-9 * s.abs().max(1.0));
        }

        #[test]
        fn boost_then_inverse_is_identity(t in -100.0f64..100.0, x in -100.0f64..100.0, b in -0.99f64..0.99) {
            let e = SpacetimeEvent::new(t, x, "e").unwrap();
            let back = lorentz_transform(&lorentz_transform(&e, v(b)), v(-b));
            let scale = t.abs().max(x.abs()).max(1.0);
            prop_assert!((back.t - t).abs() <= 1e-9 * scale);
            prop_assert!((back.x - x).abs() <= 1e-9 * scale);
        }

        #[test]
        fn frame_times_are_mirror_images(dist in 0.001f64..1e3, b in -0.99f64..0.99) {
            let t = event_times(d(dist), v(b));
            prop_assert_eq!(t.t_a_1, t.t_b_2);
            prop_assert_eq!(t.t_a_2, t.t_b_1);
            let s = invariant_interval(&d(dist).detect_right(), &d(dist).detect_left());
            prop_assert!(s < 0.0);
        }
    }
}
