//! Static problem ingredients: geometry, time, requests and orders, and the
//! penalty and urgency functions.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// A point in time (or a duration) with millisecond resolution.
///
/// All event bookkeeping runs on integer milliseconds so that episodes replay
/// bit-exactly. Formulas that need seconds go through [`Time::secs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Time(i64);

impl Time {
    pub const ZERO: Time = Time(0);

    #[inline]
    pub const fn from_millis(ms: i64) -> Self {
        Time(ms)
    }

    /// Rounds to the nearest millisecond.
    #[inline]
    pub fn from_secs(secs: f64) -> Self {
        Time((secs * 1000.0).round() as i64)
    }

    #[inline]
    pub const fn from_secs_i(secs: i64) -> Self {
        Time(secs * 1000)
    }

    #[inline]
    pub const fn millis(self) -> i64 {
        self.0
    }

    #[inline]
    pub fn secs(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl Add for Time {
    type Output = Time;
    #[inline]
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Sub for Time {
    type Output = Time;
    #[inline]
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}s", self.secs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RequestId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VehicleId(pub u32);

impl VehicleId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A point in the plane, in distance units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Location {
    pub x: f64,
    pub y: f64,
}

impl Location {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Location { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Location) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Euclidean distances traversed at a constant speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelMetric {
    /// Distance units per second, strictly positive.
    pub speed: f64,
}

impl TravelMetric {
    pub fn new(speed: f64) -> Self {
        assert!(speed > 0.0 && speed.is_finite(), "speed must be positive");
        TravelMetric { speed }
    }

    #[inline]
    pub fn distance(&self, a: &Location, b: &Location) -> f64 {
        a.distance(b)
    }

    /// Travel time in seconds.
    #[inline]
    pub fn travel_time(&self, a: &Location, b: &Location) -> f64 {
        a.distance(b) / self.speed
    }

    /// Travel time rounded to the millisecond grid used by schedules.
    #[inline]
    pub fn leg(&self, a: &Location, b: &Location) -> Time {
        Time::from_secs(self.travel_time(a, b))
    }
}

/// One product to be picked up at a store and delivered to a customer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    pub order_id: u32,
    pub store: Location,
    pub customer: Location,
    pub order_time: Time,
    pub deadline: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderKind {
    /// One store, `n` customers.
    OneToN,
    /// `n` stores, one customer.
    NToOne,
}

impl OrderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OrderKind::OneToN => "1toN",
            OrderKind::NToOne => "Nto1",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1toN" => Some(OrderKind::OneToN),
            "Nto1" => Some(OrderKind::NToOne),
            _ => None,
        }
    }
}

/// A bundle of requests revealed at the same instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub id: u32,
    pub kind: OrderKind,
    pub arrival_time: Time,
    pub requests: Vec<Request>,
}

impl Order {
    /// Checks the shared-endpoint and shared-arrival constraints.
    pub fn is_consistent(&self) -> bool {
        let Some(first) = self.requests.first() else {
            return false;
        };
        self.requests.iter().all(|r| {
            r.order_time == self.arrival_time
                && r.order_id == self.id
                && match self.kind {
                    OrderKind::OneToN => r.store == first.store,
                    OrderKind::NToOne => r.customer == first.customer,
                }
        })
    }
}

/// Lateness penalty: zero up to the deadline, then a fixed charge plus a
/// linear rate per hour of lateness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltySpec {
    pub fixed: f64,
    /// Cost units per hour late.
    pub rate: f64,
}

impl PenaltySpec {
    pub const BASE: PenaltySpec = PenaltySpec { fixed: 50.0, rate: 100.0 };
    /// Fixed-cost dominated variant.
    pub const FIXED_DOMINANT: PenaltySpec = PenaltySpec { fixed: 50.0, rate: 1.0 };
    /// Variant with a negligible fixed cost.
    pub const RATE_DOMINANT: PenaltySpec = PenaltySpec { fixed: 1.0, rate: 100.0 };

    #[inline]
    pub fn penalty(&self, deadline: Time, delivery: Time) -> f64 {
        penalty(self, deadline, delivery)
    }

    /// Rate per millisecond of lateness.
    #[inline]
    pub fn rate_per_ms(&self) -> f64 {
        self.rate / 3_600_000.0
    }
}

/// Penalty for delivering at `delivery` against `deadline`.
#[inline]
pub fn penalty(spec: &PenaltySpec, deadline: Time, delivery: Time) -> f64 {
    if delivery <= deadline {
        0.0
    } else {
        spec.fixed + spec.rate * (delivery - deadline).secs() / 3600.0
    }
}

/// Linear urgency with a nonnegative intercept, measured in units of the
/// deadline window since the order arrived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UrgencySpec {
    pub intercept: f64,
    pub slope: f64,
}

impl Default for UrgencySpec {
    fn default() -> Self {
        UrgencySpec { intercept: 1.0, slope: 4.0 }
    }
}

impl UrgencySpec {
    #[inline]
    pub fn urgency(&self, now: Time, deadline: Time, window: Time) -> f64 {
        urgency(self, now, deadline, window)
    }
}

/// `max(0, h0 + h1 * (now - (deadline - window)) / window)`.
#[inline]
pub fn urgency(spec: &UrgencySpec, now: Time, deadline: Time, window: Time) -> f64 {
    debug_assert!(window.millis() > 0);
    let since_order = (now - (deadline - window)).millis() as f64;
    (spec.intercept + spec.slope * since_order / window.millis() as f64).max(0.0)
}
