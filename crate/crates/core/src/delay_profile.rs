//! Total route delay as a function of the departure time.
//!
//! For a fixed CP route, the service start of every stop is
//! `max(floor_j, departure + offset_j)`: a constant imposed by start windows
//! upstream, or the departure shifted by the accumulated travel and service
//! time. The delay of a stop is therefore `max(c_j, departure - kink_j + c_j)`
//! and the route total is a convex, non-decreasing piecewise-linear function
//! with integer slopes. Building it is one pass over the route plus a sort of
//! the kinks; a query is a binary search.

use thiserror::Error;

use crate::model::{Instance, EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("departure {departure} exceeds the latest feasible departure {max_departure}")]
    InfeasibleDeparture { departure: f64, max_departure: f64 },
    #[error("departure {0} is negative")]
    NegativeDeparture(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelayProfile {
    base_value: f64,
    /// Strictly increasing, all `> 0`.
    breakpoints: Vec<f64>,
    /// `slopes[k]` applies right of `breakpoints[k-1]` (left of the first one for `k = 0`).
    slopes: Vec<u32>,
    /// Function value at each breakpoint.
    values: Vec<f64>,
    max_departure: f64,
    return_floor: f64,
    return_offset: f64,
}

impl DelayProfile {
    /// Profile of a route with no stops.
    pub fn empty(max_duration: f64) -> Self {
        DelayProfile {
            base_value: 0.0,
            breakpoints: Vec::new(),
            slopes: vec![0],
            values: Vec::new(),
            max_departure: max_duration,
            return_floor: f64::NEG_INFINITY,
            return_offset: 0.0,
        }
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[u32] {
        &self.slopes
    }

    /// Latest departure with the route back by the duration limit;
    /// `-inf` when start windows alone already make it late.
    pub fn max_departure(&self) -> f64 {
        self.max_departure
    }

    /// Return time at the depot for the given departure.
    #[inline]
    pub fn return_at(&self, departure: f64) -> f64 {
        self.return_floor.max(departure + self.return_offset)
    }

    /// Checked query: departure must lie in `[0, max_departure]`.
    pub fn query(&self, departure: f64) -> Result<f64, ProfileError> {
        if departure < 0.0 {
            return Err(ProfileError::NegativeDeparture(departure));
        }
        if departure > self.max_departure + EPS {
            return Err(ProfileError::InfeasibleDeparture {
                departure,
                max_departure: self.max_departure,
            });
        }
        Ok(self.delay_at(departure))
    }

    /// Unchecked query; also valid past `max_departure`.
    #[inline]
    pub fn delay_at(&self, departure: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= departure);
        if k == 0 {
            self.base_value + f64::from(self.slopes[0]) * departure
        } else {
            self.values[k - 1] + f64::from(self.slopes[k]) * (departure - self.breakpoints[k - 1])
        }
    }
}

/// Builds the delay profile of `route` (a customer sequence).
pub fn build_profile(inst: &Instance, route: &[usize]) -> DelayProfile {
    if route.is_empty() {
        return DelayProfile::empty(inst.max_duration);
    }
    let mut kinks: Vec<f64> = Vec::with_capacity(route.len());
    let mut base_slope = 0u32;
    let mut base_value = 0.0;
    let mut prev = 0;
    // Service start is max(floor, departure + offset).
    let mut floor = f64::NEG_INFINITY;
    let mut offset = 0.0;
    for &c in route {
        let cust = inst.customer(c);
        let leg = inst.t(prev, c);
        floor = cust.tw_start.max(floor + leg);
        offset += leg;
        let constant = (floor - cust.tw_end).max(0.0);
        let kink = constant + cust.tw_end - offset;
        if kink <= 0.0 {
            base_slope += 1;
            base_value += (offset - cust.tw_end).max(constant);
        } else {
            base_value += constant;
            kinks.push(kink);
        }
        floor += cust.service_time;
        offset += cust.service_time;
        prev = c;
    }
    let back = inst.t(prev, 0);
    let return_floor = floor + back;
    let return_offset = offset + back;
    let max_departure = if return_floor > inst.max_duration + EPS {
        f64::NEG_INFINITY
    } else {
        inst.max_duration - return_offset
    };

    kinks.sort_by(f64::total_cmp);
    let mut breakpoints = Vec::with_capacity(kinks.len());
    let mut slopes = Vec::with_capacity(kinks.len() + 1);
    let mut values = Vec::with_capacity(kinks.len());
    slopes.push(base_slope);
    let mut slope = base_slope;
    let mut last_x = 0.0;
    let mut last_v = base_value;
    for kink in kinks {
        if breakpoints.last() == Some(&kink) {
            slope += 1;
            *slopes.last_mut().unwrap() = slope;
            continue;
        }
        last_v += f64::from(slope) * (kink - last_x);
        last_x = kink;
        slope += 1;
        breakpoints.push(kink);
        values.push(last_v);
        slopes.push(slope);
    }
    DelayProfile {
        base_value,
        breakpoints,
        slopes,
        values,
        max_departure,
        return_floor,
        return_offset,
    }
}

/// A set of route profiles where one route may be temporarily replaced by a
/// tentative profile, leaving the stored ones untouched.
#[derive(Clone, Copy, Debug)]
pub struct ProfileView<'a> {
    base: &'a [DelayProfile],
    overlay: Option<(usize, &'a DelayProfile)>,
}

impl<'a> ProfileView<'a> {
    pub fn new(base: &'a [DelayProfile]) -> Self {
        ProfileView { base, overlay: None }
    }

    pub fn with_overlay(base: &'a [DelayProfile], route: usize, profile: &'a DelayProfile) -> Self {
        ProfileView {
            base,
            overlay: Some((route, profile)),
        }
    }

    #[inline]
    pub fn get(&self, route: usize) -> &'a DelayProfile {
        match self.overlay {
            Some((r, p)) if r == route => p,
            _ => &self.base[route],
        }
    }
}
