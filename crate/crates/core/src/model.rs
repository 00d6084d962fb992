//! Problem data and exact evaluation for the mobile-production (MoP) and
//! central-production (CP) routing variants.
//!
//! Node `0` is the depot and customers are numbered `1..=n`. Machines and
//! routes are zero-based indices. Every other module checks its incremental
//! arithmetic against [`evaluate_mop`] and [`evaluate_cp`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance for every feasibility comparison.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Production on board, en route.
    Mop,
    /// Production at the depot before departure.
    Cp,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Mop => f.write_str("mop"),
            Variant::Cp => f.write_str("cp"),
        }
    }
}

impl FromStr for Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mop" => Ok(Variant::Mop),
            "cp" => Ok(Variant::Cp),
            other => Err(ModelError::InvalidInstance(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("customer {0} does not exist")]
    UnknownCustomer(usize),
    #[error("customer {0} is routed more than once")]
    DuplicateCustomer(usize),
    #[error("{routes} routes exceed the fleet of {vehicles} vehicles")]
    TooManyRoutes { routes: usize, vehicles: usize },
    #[error("routed customer {0} has no machine")]
    MissingMachine(usize),
    #[error("customer {customer} assigned to machine {machine}, only {machines} available")]
    MachineOutOfRange {
        customer: usize,
        machine: usize,
        machines: usize,
    },
    #[error("customer {0} has a production job but is not routed")]
    UnroutedJob(usize),
    #[error("routed customer {0} is not scheduled on any machine")]
    UnscheduledCustomer(usize),
    #[error("customer {0} is scheduled more than once")]
    DuplicateJob(usize),
    #[error("expected {expected} depot machines, found {found}")]
    MachineCount { expected: usize, found: usize },
    #[error("machine schedule does not match the route it belongs to: {0}")]
    ScheduleMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Customer {
    pub id: usize,
    pub demand: f64,
    pub production_time: f64,
    pub tw_start: f64,
    /// Soft end of the window; lateness beyond it is charged, never forbidden.
    pub tw_end: f64,
    pub service_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub travel: f64,
    pub delay: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            travel: 1.0,
            delay: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub id: String,
    pub customers: Vec<Customer>,
    /// `(n+1) x (n+1)` travel cost matrix, depot first.
    pub dist: Vec<Vec<f64>>,
    /// `(n+1) x (n+1)` travel time matrix in minutes.
    pub time: Vec<Vec<f64>>,
    pub num_vehicles: usize,
    pub capacity: f64,
    /// Latest return time to the depot.
    pub max_duration: f64,
    pub machines_per_vehicle: usize,
    /// How long before time zero depot machines may start (CP only).
    pub early_production: f64,
    pub weights: Weights,
}

impl Instance {
    pub fn num_customers(&self) -> usize {
        self.customers.len()
    }

    /// Customer data for node `id` (`1..=n`).
    #[inline]
    pub fn customer(&self, id: usize) -> &Customer {
        &self.customers[id - 1]
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    #[inline]
    pub fn t(&self, i: usize, j: usize) -> f64 {
        self.time[i][j]
    }

    /// Total number of depot machines in the CP variant.
    pub fn depot_machines(&self) -> usize {
        self.machines_per_vehicle * self.num_vehicles
    }

    pub fn max_dist(&self) -> f64 {
        self.dist
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }

    pub fn total_production(&self) -> f64 {
        self.customers.iter().map(|c| c.production_time).sum()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidInstance(msg));
        let n = self.customers.len();
        for (name, m) in [("dist", &self.dist), ("time", &self.time)] {
            if m.len() != n + 1 || m.iter().any(|row| row.len() != n + 1) {
                return bad(format!("{name} matrix must be {0}x{0}", n + 1));
            }
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    if !v.is_finite() || v < 0.0 {
                        return bad(format!("{name}[{i}][{j}] = {v} is not a finite nonnegative value"));
                    }
                    if i == j && v != 0.0 {
                        return bad(format!("{name}[{i}][{i}] must be zero"));
                    }
                }
            }
        }
        for (k, c) in self.customers.iter().enumerate() {
            if c.id != k + 1 {
                return bad(format!("customer at position {k} has id {}, expected {}", c.id, k + 1));
            }
            let fields = [c.demand, c.production_time, c.tw_start, c.tw_end, c.service_time];
            if fields.iter().any(|v| !v.is_finite()) {
                return bad(format!("customer {} has a non-finite field", c.id));
            }
            if c.demand < 0.0 || c.production_time < 0.0 || c.service_time < 0.0 {
                return bad(format!("customer {} has a negative demand, production or service time", c.id));
            }
            if c.tw_start > c.tw_end {
                return bad(format!("customer {} has tw_start > tw_end", c.id));
            }
        }
        if self.num_vehicles == 0 {
            return bad("at least one vehicle is required".into());
        }
        if self.machines_per_vehicle == 0 {
            return bad("at least one machine per vehicle is required".into());
        }
        for (name, v) in [
            ("capacity", self.capacity),
            ("max_duration", self.max_duration),
            ("early_production", self.early_production),
            ("weights.travel", self.weights.travel),
            ("weights.delay", self.weights.delay),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} = {v} must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    pub fn objective(&self, travel: f64, delay: f64) -> f64 {
        self.weights.travel * travel + self.weights.delay * delay
    }

    pub fn route_load(&self, route: &[usize]) -> f64 {
        route.iter().map(|&c| self.customer(c).demand).sum()
    }

    pub fn route_travel(&self, route: &[usize]) -> f64 {
        let mut prev = 0;
        let mut total = 0.0;
        for &c in route {
            total += self.c(prev, c);
            prev = c;
        }
        if !route.is_empty() {
            total += self.c(prev, 0);
        }
        total
    }
}

/// Routes plus an on-board machine per routed customer. Each machine's
/// production order is the delivery order of its customers.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MopSolution {
    pub routes: Vec<Vec<usize>>,
    /// Indexed by customer id; entry 0 is unused.
    pub machine_of: Vec<Option<usize>>,
}

impl MopSolution {
    pub fn empty(inst: &Instance) -> Self {
        MopSolution {
            routes: vec![Vec::new(); inst.num_vehicles],
            machine_of: vec![None; inst.num_customers() + 1],
        }
    }

    /// Per-route, per-machine production order implied by the routes.
    pub fn inline_orders(&self, machines: usize) -> Vec<Vec<Vec<usize>>> {
        self.routes
            .iter()
            .map(|route| {
                let mut orders = vec![Vec::new(); machines];
                for &c in route {
                    if let Some(l) = self.machine_of.get(c).copied().flatten() {
                        if l < machines {
                            orders[l].push(c);
                        }
                    }
                }
                orders
            })
            .collect()
    }
}

/// Routes plus explicit job sequences on every depot machine.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CpSolution {
    pub routes: Vec<Vec<usize>>,
    pub machine_jobs: Vec<Vec<usize>>,
}

impl CpSolution {
    pub fn empty(inst: &Instance) -> Self {
        CpSolution {
            routes: vec![Vec::new(); inst.num_vehicles],
            machine_jobs: vec![Vec::new(); inst.depot_machines()],
        }
    }

    /// Route index of every routed customer.
    pub fn route_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n + 1];
        for (r, route) in self.routes.iter().enumerate() {
            for &c in route {
                if c <= n {
                    out[c] = Some(r);
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Visit {
    pub route: usize,
    pub prod_start: f64,
    pub prod_end: f64,
    pub arrival: f64,
    pub service_start: f64,
    pub delay: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Timeline {
    /// Indexed by customer id; `None` for unrouted customers and the depot.
    pub visits: Vec<Option<Visit>>,
    pub route_departure: Vec<f64>,
    pub route_return: Vec<f64>,
    pub travel_cost: f64,
    pub delay_cost: f64,
    pub objective: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    Capacity,
    Duration,
    Coverage,
    MachineAssignment,
    DepartureBeforeZero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub route: Option<usize>,
    pub customer: Option<usize>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        FeasibilityReport {
            feasible: violations.is_empty(),
            violations,
        }
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Timing of one route for a given departure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct RouteTiming {
    pub travel: f64,
    pub delay: f64,
    pub return_time: f64,
}

/// Walks `route` from `departure`; `ready(c)` is the earliest time the
/// product of `c` is available (use `NEG_INFINITY` when it never binds).
/// `visit(c, arrival, service_start, delay)` is called per stop.
#[inline]
pub(crate) fn walk_route(
    inst: &Instance,
    route: &[usize],
    departure: f64,
    mut ready: impl FnMut(usize) -> f64,
    mut visit: impl FnMut(usize, f64, f64, f64),
) -> RouteTiming {
    let mut prev = 0;
    let mut clock = departure;
    let mut travel = 0.0;
    let mut delay = 0.0;
    for &c in route {
        let cust = inst.customer(c);
        let arrival = clock + inst.t(prev, c);
        let start = arrival.max(ready(c)).max(cust.tw_start);
        let late = (start - cust.tw_end).max(0.0);
        visit(c, arrival, start, late);
        travel += inst.c(prev, c);
        delay += late;
        clock = start + cust.service_time;
        prev = c;
    }
    let return_time = if route.is_empty() {
        departure
    } else {
        travel += inst.c(prev, 0);
        clock + inst.t(prev, 0)
    };
    RouteTiming {
        travel,
        delay,
        return_time,
    }
}

/// Timing of a single MoP route whose machine assignment is `machine_of`,
/// with in-line production starting at zero.
pub(crate) fn mop_route_timing(
    inst: &Instance,
    route: &[usize],
    machine_of: impl Fn(usize) -> usize,
    machine_clock: &mut [f64],
) -> RouteTiming {
    machine_clock.iter_mut().for_each(|t| *t = 0.0);
    walk_route(
        inst,
        route,
        0.0,
        |c| {
            let l = machine_of(c);
            machine_clock[l] += inst.customer(c).production_time;
            machine_clock[l]
        },
        |_, _, _, _| {},
    )
}

fn check_routes(inst: &Instance, routes: &[Vec<usize>]) -> Result<Vec<Option<usize>>, ModelError> {
    let n = inst.num_customers();
    if routes.len() > inst.num_vehicles {
        return Err(ModelError::TooManyRoutes {
            routes: routes.len(),
            vehicles: inst.num_vehicles,
        });
    }
    let mut route_of = vec![None; n + 1];
    for (r, route) in routes.iter().enumerate() {
        for &c in route {
            if c == 0 || c > n {
                return Err(ModelError::UnknownCustomer(c));
            }
            if route_of[c].is_some() {
                return Err(ModelError::DuplicateCustomer(c));
            }
            route_of[c] = Some(r);
        }
    }
    Ok(route_of)
}

fn check_mop_structure(inst: &Instance, sol: &MopSolution) -> Result<Vec<Option<usize>>, ModelError> {
    let route_of = check_routes(inst, &sol.routes)?;
    let m = inst.machines_per_vehicle;
    for c in 1..=inst.num_customers() {
        let machine = sol.machine_of.get(c).copied().flatten();
        match (route_of[c], machine) {
            (Some(_), None) => return Err(ModelError::MissingMachine(c)),
            (Some(_), Some(l)) if l >= m => {
                return Err(ModelError::MachineOutOfRange {
                    customer: c,
                    machine: l,
                    machines: m,
                })
            }
            (None, Some(_)) => return Err(ModelError::UnroutedJob(c)),
            _ => {}
        }
    }
    if let Some(extra) = sol
        .machine_of
        .iter()
        .enumerate()
        .skip(inst.num_customers() + 1)
        .find(|(_, l)| l.is_some())
    {
        return Err(ModelError::UnknownCustomer(extra.0));
    }
    Ok(route_of)
}

fn check_cp_structure(inst: &Instance, sol: &CpSolution) -> Result<Vec<Option<usize>>, ModelError> {
    let route_of = check_routes(inst, &sol.routes)?;
    let expected = inst.depot_machines();
    if sol.machine_jobs.len() != expected {
        return Err(ModelError::MachineCount {
            expected,
            found: sol.machine_jobs.len(),
        });
    }
    let n = inst.num_customers();
    let mut scheduled = vec![false; n + 1];
    for jobs in &sol.machine_jobs {
        for &c in jobs {
            if c == 0 || c > n {
                return Err(ModelError::UnknownCustomer(c));
            }
            if scheduled[c] {
                return Err(ModelError::DuplicateJob(c));
            }
            if route_of[c].is_none() {
                return Err(ModelError::UnroutedJob(c));
            }
            scheduled[c] = true;
        }
    }
    if let Some(c) = (1..=n).find(|&c| route_of[c].is_some() && !scheduled[c]) {
        return Err(ModelError::UnscheduledCustomer(c));
    }
    Ok(route_of)
}

/// Evaluates a MoP solution. Vehicles leave at time zero and every machine
/// produces its customers back to back in delivery order.
pub fn evaluate_mop(inst: &Instance, sol: &MopSolution) -> Result<Timeline, ModelError> {
    check_mop_structure(inst, sol)?;
    let orders = sol.inline_orders(inst.machines_per_vehicle);
    evaluate_mop_orders_unchecked(inst, &sol.routes, &orders)
}

/// Evaluates MoP routes with an explicit production order per route and
/// machine (`orders[route][machine]`), which need not follow the route.
/// Used to probe schedules that are not in line with delivery.
pub fn evaluate_mop_with_orders(
    inst: &Instance,
    routes: &[Vec<usize>],
    orders: &[Vec<Vec<usize>>],
) -> Result<Timeline, ModelError> {
    check_routes(inst, routes)?;
    if orders.len() != routes.len() {
        return Err(ModelError::ScheduleMismatch(format!(
            "{} routes but {} machine order sets",
            routes.len(),
            orders.len()
        )));
    }
    for (r, (route, machines)) in routes.iter().zip(orders).enumerate() {
        if machines.len() > inst.machines_per_vehicle {
            return Err(ModelError::ScheduleMismatch(format!(
                "route {r} uses {} machines, vehicles carry {}",
                machines.len(),
                inst.machines_per_vehicle
            )));
        }
        let mut listed: Vec<usize> = machines.iter().flatten().copied().collect();
        let mut expected = route.clone();
        listed.sort_unstable();
        expected.sort_unstable();
        if listed != expected {
            return Err(ModelError::ScheduleMismatch(format!(
                "machine orders of route {r} do not cover exactly its customers"
            )));
        }
    }
    evaluate_mop_orders_unchecked(inst, routes, orders)
}

fn evaluate_mop_orders_unchecked(
    inst: &Instance,
    routes: &[Vec<usize>],
    orders: &[Vec<Vec<usize>>],
) -> Result<Timeline, ModelError> {
    let n = inst.num_customers();
    let mut visits: Vec<Option<Visit>> = vec![None; n + 1];
    let mut prod = vec![(0.0, 0.0); n + 1];
    for machines in orders {
        for jobs in machines {
            let mut clock = 0.0;
            for &c in jobs {
                let end = clock + inst.customer(c).production_time;
                prod[c] = (clock, end);
                clock = end;
            }
        }
    }
    let mut tl = Timeline {
        visits: Vec::new(),
        route_departure: Vec::with_capacity(routes.len()),
        route_return: Vec::with_capacity(routes.len()),
        travel_cost: 0.0,
        delay_cost: 0.0,
        objective: 0.0,
    };
    for (r, route) in routes.iter().enumerate() {
        let timing = walk_route(
            inst,
            route,
            0.0,
            |c| prod[c].1,
            |c, arrival, start, delay| {
                visits[c] = Some(Visit {
                    route: r,
                    prod_start: prod[c].0,
                    prod_end: prod[c].1,
                    arrival,
                    service_start: start,
                    delay,
                })
            },
        );
        tl.route_departure.push(0.0);
        tl.route_return.push(timing.return_time);
        tl.travel_cost += timing.travel;
        tl.delay_cost += timing.delay;
    }
    tl.visits = visits;
    tl.objective = inst.objective(tl.travel_cost, tl.delay_cost);
    Ok(tl)
}

/// Evaluates a CP solution. Depot machines start at `-H`; a route departs
/// once all of its products are finished, never before zero.
pub fn evaluate_cp(inst: &Instance, sol: &CpSolution) -> Result<Timeline, ModelError> {
    let route_of = check_cp_structure(inst, sol)?;
    let n = inst.num_customers();
    let mut prod = vec![(0.0, 0.0); n + 1];
    let mut departure = vec![0.0_f64; sol.routes.len()];
    for jobs in &sol.machine_jobs {
        let mut clock = -inst.early_production;
        for &c in jobs {
            let end = clock + inst.customer(c).production_time;
            prod[c] = (clock, end);
            clock = end;
            let r = route_of[c].expect("checked above");
            departure[r] = departure[r].max(end);
        }
    }
    let mut visits: Vec<Option<Visit>> = vec![None; n + 1];
    let mut tl = Timeline {
        visits: Vec::new(),
        route_departure: departure.clone(),
        route_return: Vec::with_capacity(sol.routes.len()),
        travel_cost: 0.0,
        delay_cost: 0.0,
        objective: 0.0,
    };
    for (r, route) in sol.routes.iter().enumerate() {
        let timing = walk_route(
            inst,
            route,
            departure[r],
            |_| f64::NEG_INFINITY,
            |c, arrival, start, delay| {
                visits[c] = Some(Visit {
                    route: r,
                    prod_start: prod[c].0,
                    prod_end: prod[c].1,
                    arrival,
                    service_start: start,
                    delay,
                })
            },
        );
        tl.route_return.push(timing.return_time);
        tl.travel_cost += timing.travel;
        tl.delay_cost += timing.delay;
    }
    tl.visits = visits;
    tl.objective = inst.objective(tl.travel_cost, tl.delay_cost);
    Ok(tl)
}

fn coverage_violations(inst: &Instance, routes: &[Vec<usize>], out: &mut Vec<Violation>) -> Vec<usize> {
    let n = inst.num_customers();
    let mut seen = vec![0usize; n + 1];
    for (r, route) in routes.iter().enumerate() {
        for &c in route {
            if c == 0 || c > n {
                out.push(Violation {
                    kind: ViolationKind::Coverage,
                    route: Some(r),
                    customer: Some(c),
                    magnitude: 1.0,
                });
                continue;
            }
            seen[c] += 1;
            if seen[c] == 2 {
                out.push(Violation {
                    kind: ViolationKind::Coverage,
                    route: Some(r),
                    customer: Some(c),
                    magnitude: 1.0,
                });
            }
        }
    }
    for (c, &count) in seen.iter().enumerate().skip(1) {
        if count == 0 {
            out.push(Violation {
                kind: ViolationKind::Coverage,
                route: None,
                customer: Some(c),
                magnitude: 1.0,
            });
        }
    }
    if routes.len() > inst.num_vehicles {
        out.push(Violation {
            kind: ViolationKind::Coverage,
            route: None,
            customer: None,
            magnitude: (routes.len() - inst.num_vehicles) as f64,
        });
    }
    seen
}

fn capacity_and_duration(inst: &Instance, routes: &[Vec<usize>], tl: Option<&Timeline>, out: &mut Vec<Violation>) {
    for (r, route) in routes.iter().enumerate() {
        let load = inst.route_load(route);
        if load > inst.capacity + EPS {
            out.push(Violation {
                kind: ViolationKind::Capacity,
                route: Some(r),
                customer: None,
                magnitude: load - inst.capacity,
            });
        }
        if let Some(tl) = tl {
            let ret = tl.route_return[r];
            if ret > inst.max_duration + EPS {
                out.push(Violation {
                    kind: ViolationKind::Duration,
                    route: Some(r),
                    customer: None,
                    magnitude: ret - inst.max_duration,
                });
            }
            if tl.route_departure[r] < -EPS {
                out.push(Violation {
                    kind: ViolationKind::DepartureBeforeZero,
                    route: Some(r),
                    customer: None,
                    magnitude: -tl.route_departure[r],
                });
            }
        }
    }
}

/// Checks coverage, machine assignment, capacity and duration. Delay is
/// never a violation. Timing checks are skipped when the structure is too
/// broken to evaluate.
pub fn check_mop_feasibility(inst: &Instance, sol: &MopSolution) -> FeasibilityReport {
    let mut violations = Vec::new();
    let seen = coverage_violations(inst, &sol.routes, &mut violations);
    let m = inst.machines_per_vehicle;
    for c in 1..=inst.num_customers() {
        let machine = sol.machine_of.get(c).copied().flatten();
        let bad = match machine {
            None => seen[c] > 0,
            Some(l) => l >= m || seen[c] == 0,
        };
        if bad {
            violations.push(Violation {
                kind: ViolationKind::MachineAssignment,
                route: None,
                customer: Some(c),
                magnitude: 1.0,
            });
        }
    }
    let tl = evaluate_mop(inst, sol).ok();
    capacity_and_duration(inst, &sol.routes, tl.as_ref(), &mut violations);
    FeasibilityReport::from_violations(violations)
}

pub fn check_cp_feasibility(inst: &Instance, sol: &CpSolution) -> FeasibilityReport {
    let mut violations = Vec::new();
    let seen = coverage_violations(inst, &sol.routes, &mut violations);
    let n = inst.num_customers();
    let mut scheduled = vec![0usize; n + 1];
    for jobs in &sol.machine_jobs {
        for &c in jobs {
            if c == 0 || c > n {
                violations.push(Violation {
                    kind: ViolationKind::MachineAssignment,
                    route: None,
                    customer: Some(c),
                    magnitude: 1.0,
                });
            } else {
                scheduled[c] += 1;
            }
        }
    }
    for c in 1..=n {
        if (seen[c] > 0) != (scheduled[c] > 0) || scheduled[c] > 1 {
            violations.push(Violation {
                kind: ViolationKind::MachineAssignment,
                route: None,
                customer: Some(c),
                magnitude: 1.0,
            });
        }
    }
    if sol.machine_jobs.len() != inst.depot_machines() {
        violations.push(Violation {
            kind: ViolationKind::MachineAssignment,
            route: None,
            customer: None,
            magnitude: sol.machine_jobs.len().abs_diff(inst.depot_machines()) as f64,
        });
    }
    let tl = evaluate_cp(inst, sol).ok();
    capacity_and_duration(inst, &sol.routes, tl.as_ref(), &mut violations);
    FeasibilityReport::from_violations(violations)
}
