//! Insertion machinery shared by construction, repair and fleet sizing.
//!
//! MoP insertions only try in-line production positions: the new job lands
//! on a machine right after that machine's last job delivered earlier on the
//! route. CP insertions place the job in a depot machine schedule, trying
//! only route-group boundaries, and price the effect on every route through
//! its [`DelayProfile`].
//!
//! Ties are broken by the lowest `(route, position, machine, slot)` tuple,
//! where slots follow the order returned by [`cp_candidate_positions`].

use std::cmp::Ordering;

use thiserror::Error;

use crate::delay_profile::{build_profile, DelayProfile, ProfileView};
use crate::model::{
    check_cp_feasibility, check_mop_feasibility, evaluate_cp, evaluate_mop, mop_route_timing,
    CpSolution, FeasibilityReport, Instance, MopSolution, RouteTiming, Timeline, Variant, EPS,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("customer {customer} cannot be served even alone: {reason}")]
    Unroutable { customer: usize, reason: String },
}

/// Where a CP job goes on a depot machine. `position` is a boundary index in
/// the current schedule. With `gather`, the target route's existing jobs on
/// that machine are moved along and finish right before the new job.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductionSlot {
    pub position: usize,
    pub gather: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InsertionCandidate {
    pub customer: usize,
    pub route: usize,
    pub position: usize,
    pub machine: usize,
    /// Index of the new job in the machine's schedule after insertion.
    pub production_position: usize,
    /// Depot schedule move (CP only).
    pub slot: Option<ProductionSlot>,
    pub delta_travel: f64,
    pub delta_delay: f64,
    pub delta_total: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    FeasibleOnly,
    /// Accept everything, rank by (violation, cost).
    MinViolation,
}

#[derive(Clone)]
struct Best {
    cand: Option<InsertionCandidate>,
    violation: f64,
}

impl Best {
    fn new() -> Self {
        Best {
            cand: None,
            violation: f64::INFINITY,
        }
    }

    /// Keeps the first of equal keys, so iteration order is the tie-break.
    fn offer(&mut self, violation: f64, cost: f64, make: impl FnOnce() -> InsertionCandidate) {
        let better = match &self.cand {
            None => true,
            Some(c) => match violation.total_cmp(&self.violation) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => cost < c.delta_total,
            },
        };
        if better {
            self.cand = Some(make());
            self.violation = violation;
        }
    }
}

fn travel_delta(inst: &Instance, route: &[usize], pos: usize, i: usize) -> f64 {
    let prev = if pos == 0 { 0 } else { route[pos - 1] };
    let next = if pos == route.len() { 0 } else { route[pos] };
    inst.c(prev, i) + inst.c(i, next) - inst.c(prev, next)
}

fn with_inserted(route: &[usize], pos: usize, i: usize, buf: &mut Vec<usize>) {
    buf.clear();
    buf.extend_from_slice(&route[..pos]);
    buf.push(i);
    buf.extend_from_slice(&route[pos..]);
}

fn excess(value: f64, limit: f64) -> f64 {
    let e = value - limit;
    if e > EPS {
        e
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------------
// MoP
// ---------------------------------------------------------------------------

fn mop_timing(inst: &Instance, route: &[usize], machine_of: &[Option<usize>], clock: &mut [f64]) -> RouteTiming {
    mop_route_timing(inst, route, |c| machine_of[c].unwrap_or(0), clock)
}

/// Best insertion of `i` into route `r` over positions and machines.
fn mop_scan_route(
    inst: &Instance,
    sol: &MopSolution,
    r: usize,
    i: usize,
    mode: Mode,
    best: &mut Best,
) {
    let route = &sol.routes[r];
    let m = inst.machines_per_vehicle;
    let mut clock = vec![0.0; m];
    let old = mop_timing(inst, route, &sol.machine_of, &mut clock);
    let cap_excess = excess(inst.route_load(route) + inst.customer(i).demand, inst.capacity);
    if mode == Mode::FeasibleOnly && cap_excess > 0.0 {
        return;
    }
    let old_excess = excess(old.return_time, inst.max_duration);
    let mut used = vec![false; m];
    for &c in route {
        if let Some(l) = sol.machine_of[c] {
            used[l] = true;
        }
    }
    let mut machine_of = sol.machine_of.clone();
    let mut buf = Vec::with_capacity(route.len() + 1);
    // jobs_before[l]: customers of machine l strictly before the position
    let mut jobs_before = vec![0usize; m];
    for pos in 0..=route.len() {
        if pos > 0 {
            if let Some(l) = sol.machine_of[route[pos - 1]] {
                jobs_before[l] += 1;
            }
        }
        let d_travel = travel_delta(inst, route, pos, i);
        with_inserted(route, pos, i, &mut buf);
        let mut tried_idle = false;
        for l in 0..m {
            // idle machines are interchangeable; the first one stands for all
            if !used[l] {
                if tried_idle {
                    continue;
                }
                tried_idle = true;
            }
            machine_of[i] = Some(l);
            let new = mop_timing(inst, &buf, &machine_of, &mut clock);
            let dur = excess(new.return_time, inst.max_duration);
            if mode == Mode::FeasibleOnly && dur > 0.0 {
                continue;
            }
            let violation = cap_excess + (dur - old_excess).max(0.0);
            let d_delay = new.delay - old.delay;
            let total = inst.objective(d_travel, d_delay);
            best.offer(violation, total, || InsertionCandidate {
                customer: i,
                route: r,
                position: pos,
                machine: l,
                production_position: jobs_before[l],
                slot: None,
                delta_travel: d_travel,
                delta_delay: d_delay,
                delta_total: total,
            });
        }
    }
}

/// Best feasible insertion of customer `i` (not yet routed) into a MoP
/// solution, or `None` when no feasible slot exists.
pub fn mop_best_insertion(inst: &Instance, sol: &MopSolution, i: usize) -> Option<InsertionCandidate> {
    let mut best = Best::new();
    for r in 0..sol.routes.len() {
        mop_scan_route(inst, sol, r, i, Mode::FeasibleOnly, &mut best);
    }
    best.cand
}

/// Best feasible candidate per route, sorted by cost (ties by route).
pub fn mop_route_candidates(inst: &Instance, sol: &MopSolution, i: usize) -> Vec<InsertionCandidate> {
    let mut out: Vec<InsertionCandidate> = (0..sol.routes.len())
        .filter_map(|r| mop_route_candidate(inst, sol, r, i))
        .collect();
    out.sort_by(|a, b| a.delta_total.total_cmp(&b.delta_total));
    out
}

pub fn mop_route_candidate(inst: &Instance, sol: &MopSolution, r: usize, i: usize) -> Option<InsertionCandidate> {
    let mut best = Best::new();
    mop_scan_route(inst, sol, r, i, Mode::FeasibleOnly, &mut best);
    best.cand
}

/// Travel and delay a solution saves when one customer is taken out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RemovalSaving {
    pub customer: usize,
    pub travel: f64,
    pub delay: f64,
}

/// Savings of removing each routed customer on its own. Only the
/// customer's route changes, so only that route is re-timed.
pub fn mop_removal_savings(inst: &Instance, sol: &MopSolution) -> Vec<RemovalSaving> {
    let mut clock = vec![0.0; inst.machines_per_vehicle];
    let mut buf = Vec::new();
    let mut out = Vec::new();
    for route in &sol.routes {
        let old = mop_timing(inst, route, &sol.machine_of, &mut clock);
        for (pos, &i) in route.iter().enumerate() {
            buf.clear();
            buf.extend(route.iter().copied().filter(|&c| c != i));
            let new = mop_timing(inst, &buf, &sol.machine_of, &mut clock);
            out.push(RemovalSaving {
                customer: i,
                travel: travel_delta(inst, &buf, pos, i),
                delay: old.delay - new.delay,
            });
        }
    }
    out
}

/// Least-violating insertion, used when nothing feasible exists.
pub fn mop_forced_insertion(inst: &Instance, sol: &MopSolution, i: usize) -> InsertionCandidate {
    let mut best = Best::new();
    for r in 0..sol.routes.len() {
        mop_scan_route(inst, sol, r, i, Mode::MinViolation, &mut best);
    }
    best.cand.expect("a solution always has at least one route")
}

pub fn apply_mop(sol: &mut MopSolution, cand: &InsertionCandidate) {
    sol.routes[cand.route].insert(cand.position, cand.customer);
    if sol.machine_of.len() <= cand.customer {
        sol.machine_of.resize(cand.customer + 1, None);
    }
    sol.machine_of[cand.customer] = Some(cand.machine);
}

pub fn remove_mop(sol: &mut MopSolution, c: usize) {
    for route in &mut sol.routes {
        route.retain(|&x| x != c);
    }
    if let Some(slot) = sol.machine_of.get_mut(c) {
        *slot = None;
    }
}

// ---------------------------------------------------------------------------
// CP
// ---------------------------------------------------------------------------

/// Candidate production slots for a job of route `target` on a machine whose
/// current jobs belong to routes `tags` (in schedule order).
///
/// Without jobs of `target` on the machine, only the starts of route groups
/// and the end are tried. Otherwise the start of the target's group is tried,
/// plus every later group boundary, each both as a plain insertion and with
/// the target's group gathered there (gather first).
pub fn cp_candidate_positions(tags: &[usize], target: usize) -> Vec<ProductionSlot> {
    let plain = |position| ProductionSlot { position, gather: false };
    if tags.is_empty() {
        return vec![plain(0)];
    }
    let mut starts = vec![0];
    starts.extend((1..tags.len()).filter(|&k| tags[k] != tags[k - 1]));
    let first = tags.iter().position(|&t| t == target);
    match first {
        None => {
            let mut out: Vec<ProductionSlot> = starts.into_iter().map(plain).collect();
            out.push(plain(tags.len()));
            out
        }
        Some(first) => {
            let last = tags.iter().rposition(|&t| t == target).unwrap();
            let mut out = vec![plain(first)];
            let later = starts
                .into_iter()
                .filter(|&s| s > last + 1)
                .chain(std::iter::once(tags.len()));
            for b in later {
                out.push(ProductionSlot { position: b, gather: true });
                out.push(plain(b));
            }
            out
        }
    }
}

/// New schedule of a machine after placing `job` of route `target` in `slot`.
pub fn schedule_with_slot(
    jobs: &[usize],
    route_of: impl Fn(usize) -> usize,
    job: usize,
    target: usize,
    slot: ProductionSlot,
    buf: &mut Vec<usize>,
) {
    buf.clear();
    let b = slot.position;
    if slot.gather {
        buf.extend(jobs[..b].iter().copied().filter(|&c| route_of(c) != target));
        buf.extend(jobs[..b].iter().copied().filter(|&c| route_of(c) == target));
    } else {
        buf.extend_from_slice(&jobs[..b]);
    }
    buf.push(job);
    buf.extend_from_slice(&jobs[b..]);
}

/// Precomputed state of a CP solution for pricing insertions. Valid until
/// the solution changes.
#[derive(Clone, Debug)]
pub struct CpContext {
    route_of: Vec<usize>,
    profiles: Vec<DelayProfile>,
    departures: Vec<f64>,
    returns: Vec<f64>,
    loads: Vec<f64>,
    /// `ready_without[l][q]`: latest completion among route `q`'s jobs on
    /// machines other than `l`.
    ready_without: Vec<Vec<f64>>,
}

const UNROUTED: usize = usize::MAX;

impl CpContext {
    pub fn new(inst: &Instance, sol: &CpSolution) -> Self {
        let n = inst.num_customers();
        let routes = sol.routes.len();
        let mut route_of = vec![UNROUTED; n + 1];
        for (r, route) in sol.routes.iter().enumerate() {
            for &c in route {
                route_of[c] = r;
            }
        }
        let machines = sol.machine_jobs.len();
        let mut ready = vec![vec![f64::NEG_INFINITY; routes]; machines];
        for (l, jobs) in sol.machine_jobs.iter().enumerate() {
            let mut clock = -inst.early_production;
            for &c in jobs {
                clock += inst.customer(c).production_time;
                ready[l][route_of[c]] = clock;
            }
        }
        // top two machines per route
        let mut top = vec![(f64::NEG_INFINITY, usize::MAX, f64::NEG_INFINITY); routes];
        for (l, row) in ready.iter().enumerate() {
            for (q, &v) in row.iter().enumerate() {
                let t = &mut top[q];
                if v > t.0 {
                    *t = (v, l, t.0);
                } else if v > t.2 {
                    t.2 = v;
                }
            }
        }
        let ready_without = (0..machines)
            .map(|l| {
                top.iter()
                    .map(|&(best, arg, second)| if arg == l { second } else { best })
                    .collect()
            })
            .collect();
        let profiles: Vec<DelayProfile> = sol.routes.iter().map(|r| build_profile(inst, r)).collect();
        let departures: Vec<f64> = top.iter().map(|t| t.0.max(0.0)).collect();
        let returns = profiles
            .iter()
            .zip(&departures)
            .map(|(p, &d)| p.return_at(d))
            .collect();
        let loads = sol.routes.iter().map(|r| inst.route_load(r)).collect();
        CpContext {
            route_of,
            profiles,
            departures,
            returns,
            loads,
            ready_without,
        }
    }

    pub fn departures(&self) -> &[f64] {
        &self.departures
    }

    pub fn profiles(&self) -> &[DelayProfile] {
        &self.profiles
    }

    /// Delay change and violation of placing job `i` (route `target`) in
    /// `slot` on machine `l`, with `view` holding the target's tentative profile.
    #[allow(clippy::too_many_arguments)]
    fn price_slot(
        &self,
        inst: &Instance,
        sol: &CpSolution,
        view: ProfileView<'_>,
        i: usize,
        target: usize,
        l: usize,
        slot: ProductionSlot,
        scratch: &mut CpScratch,
    ) -> (f64, f64) {
        let route_of = |c: usize| if c == i { target } else { self.route_of[c] };
        schedule_with_slot(&sol.machine_jobs[l], route_of, i, target, slot, &mut scratch.schedule);
        self.price_schedule(inst, view, l, target, route_of, scratch)
    }

    /// Delay change and violation when machine `l` runs `scratch.schedule`
    /// instead of its current jobs. `target` is always re-priced, since
    /// `view` may hold a different profile for it.
    fn price_schedule(
        &self,
        inst: &Instance,
        view: ProfileView<'_>,
        l: usize,
        target: usize,
        route_of: impl Fn(usize) -> usize,
        scratch: &mut CpScratch,
    ) -> (f64, f64) {
        scratch.touched.clear();
        scratch.touched.push(target);
        scratch.ready[target] = f64::NEG_INFINITY;
        let mut clock = -inst.early_production;
        for &c in &scratch.schedule {
            clock += inst.customer(c).production_time;
            let q = route_of(c);
            if scratch.ready[q].is_nan() {
                scratch.touched.push(q);
            }
            scratch.ready[q] = clock;
        }
        let mut delta = 0.0;
        let mut violation = 0.0;
        for &q in &scratch.touched {
            let dep = self.ready_without[l][q].max(scratch.ready[q]).max(0.0);
            scratch.ready[q] = f64::NAN;
            let profile = view.get(q);
            delta += profile.delay_at(dep) - self.profiles[q].delay_at(self.departures[q]);
            let ret = profile.return_at(dep);
            if q == target {
                violation += excess(ret, inst.max_duration);
            } else {
                violation += excess(ret, inst.max_duration.max(self.returns[q]));
            }
        }
        (delta, violation)
    }

    /// `(customer, travel saving, delay saving)` of removing each routed
    /// customer on its own.
    pub fn removal_savings(&self, inst: &Instance, sol: &CpSolution) -> Vec<RemovalSaving> {
        let mut out = Vec::new();
        let mut scratch = CpScratch::new(sol.routes.len());
        let mut machine_of = vec![UNROUTED; inst.num_customers() + 1];
        for (l, jobs) in sol.machine_jobs.iter().enumerate() {
            for &c in jobs {
                machine_of[c] = l;
            }
        }
        let mut buf = Vec::new();
        for (r, route) in sol.routes.iter().enumerate() {
            for (pos, &i) in route.iter().enumerate() {
                buf.clear();
                buf.extend(route.iter().copied().filter(|&c| c != i));
                let profile = build_profile(inst, &buf);
                let view = ProfileView::with_overlay(&self.profiles, r, &profile);
                let l = machine_of[i];
                scratch.schedule.clear();
                scratch.schedule.extend(sol.machine_jobs[l].iter().copied().filter(|&c| c != i));
                let (delta, _) = self.price_schedule(inst, view, l, r, |c| self.route_of[c], &mut scratch);
                out.push(RemovalSaving {
                    customer: i,
                    travel: travel_delta(inst, &buf, pos, i),
                    delay: -delta,
                });
            }
        }
        out
    }

    /// Scans machines and slots for a fixed route position.
    #[allow(clippy::too_many_arguments)]
    fn scan_production(
        &self,
        inst: &Instance,
        sol: &CpSolution,
        i: usize,
        r: usize,
        pos: usize,
        profile: &DelayProfile,
        d_travel: f64,
        cap_excess: f64,
        mode: Mode,
        best: &mut Best,
        scratch: &mut CpScratch,
    ) {
        let view = ProfileView::with_overlay(&self.profiles, r, profile);
        let mut tried_idle = false;
        for (l, jobs) in sol.machine_jobs.iter().enumerate() {
            if jobs.is_empty() {
                if tried_idle {
                    continue;
                }
                tried_idle = true;
            }
            scratch.tags.clear();
            scratch.tags.extend(jobs.iter().map(|&c| self.route_of[c]));
            for slot in cp_candidate_positions(&scratch.tags, r) {
                let (d_delay, dur) = self.price_slot(inst, sol, view, i, r, l, slot, scratch);
                if mode == Mode::FeasibleOnly && dur > 0.0 {
                    continue;
                }
                let total = inst.objective(d_travel, d_delay);
                best.offer(cap_excess + dur, total, || InsertionCandidate {
                    customer: i,
                    route: r,
                    position: pos,
                    machine: l,
                    production_position: slot.position,
                    slot: Some(slot),
                    delta_travel: d_travel,
                    delta_delay: d_delay,
                    delta_total: total,
                });
            }
        }
    }

    fn integrated(&self, inst: &Instance, sol: &CpSolution, i: usize, mode: Mode) -> Option<InsertionCandidate> {
        let mut best = Best::new();
        let mut scratch = CpScratch::new(sol.routes.len());
        let mut buf = Vec::new();
        for (r, route) in sol.routes.iter().enumerate() {
            let cap_excess = excess(self.loads[r] + inst.customer(i).demand, inst.capacity);
            if mode == Mode::FeasibleOnly && cap_excess > 0.0 {
                continue;
            }
            for pos in 0..=route.len() {
                with_inserted(route, pos, i, &mut buf);
                let profile = build_profile(inst, &buf);
                let d_travel = travel_delta(inst, route, pos, i);
                self.scan_production(inst, sol, i, r, pos, &profile, d_travel, cap_excess, mode, &mut best, &mut scratch);
            }
        }
        best.cand
    }

    /// Route positions ranked as if the route's departure stayed put:
    /// `(cost, route, position)` for each route with a feasible position.
    fn phase_one(&self, inst: &Instance, sol: &CpSolution, i: usize) -> Vec<(f64, usize, usize)> {
        let mut out = Vec::with_capacity(sol.routes.len());
        let mut buf = Vec::new();
        for (r, route) in sol.routes.iter().enumerate() {
            if excess(self.loads[r] + inst.customer(i).demand, inst.capacity) > 0.0 {
                continue;
            }
            let dep = self.departures[r];
            let old_delay = self.profiles[r].delay_at(dep);
            let mut best: Option<(f64, usize)> = None;
            for pos in 0..=route.len() {
                with_inserted(route, pos, i, &mut buf);
                let profile = build_profile(inst, &buf);
                if excess(profile.return_at(dep), inst.max_duration) > 0.0 {
                    continue;
                }
                let cost = inst.objective(travel_delta(inst, route, pos, i), profile.delay_at(dep) - old_delay);
                if best.is_none_or(|(c, _)| cost < c) {
                    best = Some((cost, pos));
                }
            }
            if let Some((cost, pos)) = best {
                out.push((cost, r, pos));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    fn complete(&self, inst: &Instance, sol: &CpSolution, i: usize, r: usize, pos: usize) -> Option<InsertionCandidate> {
        let route = &sol.routes[r];
        let mut buf = Vec::new();
        with_inserted(route, pos, i, &mut buf);
        let profile = build_profile(inst, &buf);
        let d_travel = travel_delta(inst, route, pos, i);
        let mut best = Best::new();
        let mut scratch = CpScratch::new(sol.routes.len());
        self.scan_production(inst, sol, i, r, pos, &profile, d_travel, 0.0, Mode::FeasibleOnly, &mut best, &mut scratch);
        best.cand
    }

    /// Up to `k` routes, picked in phase-one order among those with a
    /// feasible production slot, sorted by total cost increment.
    pub fn k_best_routes(&self, inst: &Instance, sol: &CpSolution, i: usize, k: usize) -> Vec<InsertionCandidate> {
        let mut out = Vec::with_capacity(k);
        for (_, r, pos) in self.phase_one(inst, sol, i) {
            if out.len() == k {
                break;
            }
            if let Some(c) = self.complete(inst, sol, i, r, pos) {
                out.push(c);
            }
        }
        out.sort_by(|a, b| a.delta_total.total_cmp(&b.delta_total));
        out
    }

    pub fn integrated_insertion(&self, inst: &Instance, sol: &CpSolution, i: usize) -> Option<InsertionCandidate> {
        self.integrated(inst, sol, i, Mode::FeasibleOnly)
    }

    pub fn decomposed_insertion(&self, inst: &Instance, sol: &CpSolution, i: usize) -> Option<InsertionCandidate> {
        self.k_best_routes(inst, sol, i, 1).pop()
    }

    pub fn forced_insertion(&self, inst: &Instance, sol: &CpSolution, i: usize) -> InsertionCandidate {
        self.integrated(inst, sol, i, Mode::MinViolation)
            .expect("a solution always has at least one route")
    }
}

struct CpScratch {
    schedule: Vec<usize>,
    tags: Vec<usize>,
    /// Per-route ready time on the machine being priced; NaN = untouched.
    ready: Vec<f64>,
    touched: Vec<usize>,
}

impl CpScratch {
    fn new(routes: usize) -> Self {
        CpScratch {
            schedule: Vec::new(),
            tags: Vec::new(),
            ready: vec![f64::NAN; routes],
            touched: Vec::new(),
        }
    }
}

/// Integrated strategy: every route position, machine and candidate slot,
/// priced on the whole solution.
pub fn cp_integrated_insertion(inst: &Instance, sol: &CpSolution, i: usize) -> Option<InsertionCandidate> {
    CpContext::new(inst, sol).integrated_insertion(inst, sol, i)
}

/// Decomposition strategy: fix the route position assuming departures do
/// not move, then pick the best production slot for it.
pub fn cp_decomposed_insertion(inst: &Instance, sol: &CpSolution, i: usize) -> Option<InsertionCandidate> {
    CpContext::new(inst, sol).decomposed_insertion(inst, sol, i)
}

pub fn cp_k_best_routes(inst: &Instance, sol: &CpSolution, i: usize, k: usize) -> Vec<InsertionCandidate> {
    CpContext::new(inst, sol).k_best_routes(inst, sol, i, k)
}

pub fn apply_cp(inst: &Instance, sol: &mut CpSolution, cand: &InsertionCandidate) {
    let slot = cand.slot.expect("CP candidates carry a production slot");
    let route_of = sol.route_of(inst.num_customers());
    let mut buf = Vec::new();
    schedule_with_slot(
        &sol.machine_jobs[cand.machine],
        |c| route_of[c].unwrap_or(usize::MAX),
        cand.customer,
        cand.route,
        slot,
        &mut buf,
    );
    sol.machine_jobs[cand.machine] = buf;
    sol.routes[cand.route].insert(cand.position, cand.customer);
}

pub fn remove_cp(sol: &mut CpSolution, c: usize) {
    for route in &mut sol.routes {
        route.retain(|&x| x != c);
    }
    for jobs in &mut sol.machine_jobs {
        jobs.retain(|&x| x != c);
    }
}

// ---------------------------------------------------------------------------
// Variant-generic plumbing
// ---------------------------------------------------------------------------

/// Operations the search needs from a solution representation.
pub trait Plan: Clone + Send + Sync + std::fmt::Debug {
    const VARIANT: Variant;
    /// Pricing state reused across insertion queries until the next apply.
    type Cache;

    fn empty(inst: &Instance) -> Self;
    fn routes(&self) -> &[Vec<usize>];
    fn evaluate(&self, inst: &Instance) -> Timeline;
    fn feasibility(&self, inst: &Instance) -> FeasibilityReport;
    fn remove(&mut self, c: usize);
    fn new_cache(&self, inst: &Instance) -> Self::Cache;
    /// Up to `k` per-route candidates, sorted by cost.
    fn options(&self, inst: &Instance, cache: &mut Self::Cache, i: usize, k: usize) -> Vec<InsertionCandidate>;
    fn forced(&self, inst: &Instance, cache: &mut Self::Cache, i: usize) -> InsertionCandidate;
    fn apply(&mut self, inst: &Instance, cache: &mut Self::Cache, cand: &InsertionCandidate);
    fn removal_savings(&self, inst: &Instance) -> Vec<RemovalSaving>;

    fn objective(&self, inst: &Instance) -> f64 {
        self.evaluate(inst).objective
    }

    fn routed(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.routes().iter().flatten().copied().collect();
        out.sort_unstable();
        out
    }

    fn vehicles_used(&self) -> usize {
        self.routes().iter().filter(|r| !r.is_empty()).count()
    }
}

/// Per-(customer, route) best MoP candidates; a route's column is dropped
/// whenever that route changes.
#[derive(Debug, Default)]
pub struct MopCache {
    entries: Vec<Vec<Option<Option<InsertionCandidate>>>>,
}

impl Plan for MopSolution {
    const VARIANT: Variant = Variant::Mop;
    type Cache = MopCache;

    fn empty(inst: &Instance) -> Self {
        MopSolution::empty(inst)
    }

    fn routes(&self) -> &[Vec<usize>] {
        &self.routes
    }

    fn evaluate(&self, inst: &Instance) -> Timeline {
        evaluate_mop(inst, self).expect("search keeps MoP solutions structurally valid")
    }

    fn feasibility(&self, inst: &Instance) -> FeasibilityReport {
        check_mop_feasibility(inst, self)
    }

    fn remove(&mut self, c: usize) {
        remove_mop(self, c)
    }

    fn new_cache(&self, inst: &Instance) -> MopCache {
        MopCache {
            entries: vec![vec![None; self.routes.len()]; inst.num_customers() + 1],
        }
    }

    fn options(&self, inst: &Instance, cache: &mut MopCache, i: usize, k: usize) -> Vec<InsertionCandidate> {
        let row = &mut cache.entries[i];
        let mut out: Vec<InsertionCandidate> = (0..self.routes.len())
            .filter_map(|r| {
                row[r]
                    .get_or_insert_with(|| mop_route_candidate(inst, self, r, i))
                    .clone()
            })
            .collect();
        out.sort_by(|a, b| a.delta_total.total_cmp(&b.delta_total));
        out.truncate(k);
        out
    }

    fn forced(&self, inst: &Instance, _: &mut MopCache, i: usize) -> InsertionCandidate {
        mop_forced_insertion(inst, self, i)
    }

    fn removal_savings(&self, inst: &Instance) -> Vec<RemovalSaving> {
        mop_removal_savings(inst, self)
    }

    fn apply(&mut self, _: &Instance, cache: &mut MopCache, cand: &InsertionCandidate) {
        apply_mop(self, cand);
        for row in &mut cache.entries {
            row[cand.route] = None;
        }
    }
}

#[derive(Debug, Default)]
pub struct CpCache {
    ctx: Option<CpContext>,
}

impl CpCache {
    fn get(&mut self, inst: &Instance, sol: &CpSolution) -> &CpContext {
        self.ctx.get_or_insert_with(|| CpContext::new(inst, sol))
    }
}

impl Plan for CpSolution {
    const VARIANT: Variant = Variant::Cp;
    type Cache = CpCache;

    fn empty(inst: &Instance) -> Self {
        CpSolution::empty(inst)
    }

    fn routes(&self) -> &[Vec<usize>] {
        &self.routes
    }

    fn evaluate(&self, inst: &Instance) -> Timeline {
        evaluate_cp(inst, self).expect("search keeps CP solutions structurally valid")
    }

    fn feasibility(&self, inst: &Instance) -> FeasibilityReport {
        check_cp_feasibility(inst, self)
    }

    fn remove(&mut self, c: usize) {
        remove_cp(self, c)
    }

    fn new_cache(&self, _: &Instance) -> CpCache {
        CpCache::default()
    }

    fn options(&self, inst: &Instance, cache: &mut CpCache, i: usize, k: usize) -> Vec<InsertionCandidate> {
        cache.get(inst, self).k_best_routes(inst, self, i, k)
    }

    fn forced(&self, inst: &Instance, cache: &mut CpCache, i: usize) -> InsertionCandidate {
        cache.get(inst, self).forced_insertion(inst, self, i)
    }

    fn removal_savings(&self, inst: &Instance) -> Vec<RemovalSaving> {
        CpContext::new(inst, self).removal_savings(inst, self)
    }

    fn apply(&mut self, inst: &Instance, cache: &mut CpCache, cand: &InsertionCandidate) {
        apply_cp(inst, self, cand);
        cache.ctx = None;
    }
}

/// Cost charged for each missing route in a regret sum.
pub const MISSING_ROUTE_PENALTY: f64 = 1e9;

/// Outcome of inserting a batch of customers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct InsertionReport {
    /// Customers that had no feasible slot and went to the least-violating one.
    pub forced: Vec<usize>,
}

/// Regret-`k` insertion of `pending` into `sol`. Each round, every pending
/// customer gets its `k` best routes; the one with the largest regret is
/// inserted at its best option (ties: lowest best cost, then lowest id).
/// `perturb` maps every option's cost before ranking (noise).
pub fn regret_insert<P: Plan>(
    inst: &Instance,
    sol: &mut P,
    pending: &[usize],
    k: usize,
    mut perturb: impl FnMut(f64) -> f64,
) -> InsertionReport {
    let k = k.max(1);
    let mut pending: Vec<usize> = pending.to_vec();
    pending.sort_unstable();
    let mut cache = sol.new_cache(inst);
    let mut report = InsertionReport::default();
    while !pending.is_empty() {
        // (regret, best cost, index into pending, candidate)
        let mut choice: Option<(f64, f64, usize, InsertionCandidate)> = None;
        for (idx, &i) in pending.iter().enumerate() {
            let mut options = sol.options(inst, &mut cache, i, k);
            if options.is_empty() {
                continue;
            }
            for o in &mut options {
                o.delta_total = perturb(o.delta_total);
            }
            options.sort_by(|a, b| a.delta_total.total_cmp(&b.delta_total));
            let first = options[0].delta_total;
            let regret: f64 = (1..k)
                .map(|h| options.get(h).map_or(MISSING_ROUTE_PENALTY, |o| o.delta_total - first))
                .sum();
            let better = match &choice {
                None => true,
                Some((g, c, _, _)) => regret > *g || (regret == *g && first < *c),
            };
            if better {
                choice = Some((regret, first, idx, options.swap_remove(0)));
            }
        }
        let (idx, cand) = match choice {
            Some((_, _, idx, cand)) => (idx, cand),
            None => {
                let i = pending[0];
                report.forced.push(i);
                (0, sol.forced(inst, &mut cache, i))
            }
        };
        let mut cand = cand;
        cand.delta_total = inst.objective(cand.delta_travel, cand.delta_delay);
        sol.apply(inst, &mut cache, &cand);
        pending.remove(idx);
    }
    report
}

/// Parallel insertion from empty routes: repeatedly insert the customer with
/// the smallest best insertion cost.
pub fn parallel_construct<P: Plan>(inst: &Instance) -> (P, InsertionReport) {
    let mut sol = P::empty(inst);
    let all: Vec<usize> = (1..=inst.num_customers()).collect();
    let report = regret_insert(inst, &mut sol, &all, 1, |c| c);
    (sol, report)
}

/// Number of routes a greedy sequential insertion needs: fill one route at a
/// time (MoP timing, cheapest feasible insertion first) and open a new one
/// when nothing else fits.
pub fn fleet_size(inst: &Instance) -> Result<usize, SearchError> {
    let n = inst.num_customers();
    let mut single = inst.clone();
    single.num_vehicles = 1;
    let mut pending: Vec<usize> = (1..=n).collect();
    let mut routes = 0;
    let mut current = MopSolution::empty(&single);
    while !pending.is_empty() {
        let mut best: Option<(usize, InsertionCandidate)> = None;
        for (idx, &i) in pending.iter().enumerate() {
            if let Some(c) = mop_route_candidate(&single, &current, 0, i) {
                if best.as_ref().is_none_or(|(_, b)| c.delta_total < b.delta_total) {
                    best = Some((idx, c));
                }
            }
        }
        match best {
            Some((idx, cand)) => {
                apply_mop(&mut current, &cand);
                pending.remove(idx);
            }
            None if current.routes[0].is_empty() => {
                let customer = pending[0];
                let cand = mop_forced_insertion(&single, &current, customer);
                let reason = if excess(single.customer(customer).demand, single.capacity) > 0.0 {
                    "demand exceeds vehicle capacity".to_string()
                } else {
                    format!(
                        "an out-and-back trip overruns the duration limit by {}",
                        cand.delta_total.max(0.0).min(f64::MAX)
                    )
                };
                return Err(SearchError::Unroutable { customer, reason });
            }
            None => {
                routes += 1;
                current = MopSolution::empty(&single);
            }
        }
    }
    if !current.routes[0].is_empty() {
        routes += 1;
    }
    Ok(routes.max(1))
}
