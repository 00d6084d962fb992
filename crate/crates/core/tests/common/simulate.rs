//! Discrete-event simulation of a plan: production completions, departures,
//! arrivals, window openings and service ends are processed in time order.
//! Shares no code with the evaluators.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use mopvrp_core::model::Instance;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Event {
    ProductDone(usize),
    Clock,
    Arrive(usize),
    ServiceEnd(usize),
}

struct Queued {
    time: f64,
    seq: usize,
    event: Event,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SimResult {
    pub prod_start: Vec<f64>,
    pub prod_end: Vec<f64>,
    pub arrival: Vec<f64>,
    pub service_start: Vec<f64>,
    pub departure: Vec<f64>,
    pub ret: Vec<f64>,
    pub travel: f64,
    pub delay: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Where {
    /// Waiting at the depot for loading.
    Depot,
    /// Parked at customer index `k` of the route, not yet served.
    At(usize),
    Serving,
    Travelling,
    Home,
}

/// `machines` lists job sequences with their start time; `route_bound` says
/// whether products must be loaded before departure (central production).
fn simulate(inst: &Instance, routes: &[Vec<usize>], machines: &[(f64, Vec<usize>)], central: bool) -> SimResult {
    let n = inst.num_customers();
    let nan = vec![f64::NAN; n + 1];
    let mut res = SimResult {
        prod_start: nan.clone(),
        prod_end: nan.clone(),
        arrival: nan.clone(),
        service_start: nan,
        departure: vec![f64::NAN; routes.len()],
        ret: vec![f64::NAN; routes.len()],
        travel: 0.0,
        delay: 0.0,
    };
    let mut route_of = vec![usize::MAX; n + 1];
    for (r, route) in routes.iter().enumerate() {
        for &c in route {
            route_of[c] = r;
        }
    }
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let mut push = |heap: &mut BinaryHeap<Queued>, time: f64, event: Event| {
        seq += 1;
        heap.push(Queued { time, seq, event });
    };

    let mut next_job = vec![0usize; machines.len()];
    let mut machine_of_job = vec![usize::MAX; n + 1];
    for (l, (start, jobs)) in machines.iter().enumerate() {
        for &c in jobs {
            machine_of_job[c] = l;
        }
        if let Some(&c) = jobs.first() {
            res.prod_start[c] = *start;
            push(&mut heap, start + inst.customer(c).production_time, Event::ProductDone(c));
        }
    }
    push(&mut heap, 0.0, Event::Clock);

    let mut done = vec![false; n + 1];
    let mut missing: Vec<usize> = routes.iter().map(|r| r.len()).collect();
    let mut state = vec![Where::Depot; routes.len()];
    let mut stop = vec![0usize; routes.len()];
    let mut now;
    let mut clock_started = false;

    while let Some(Queued { time, event, .. }) = heap.pop() {
        now = time;
        match event {
            Event::ProductDone(c) => {
                done[c] = true;
                res.prod_end[c] = now;
                let l = machine_of_job[c];
                next_job[l] += 1;
                if let Some(&next) = machines[l].1.get(next_job[l]) {
                    res.prod_start[next] = now;
                    push(&mut heap, now + inst.customer(next).production_time, Event::ProductDone(next));
                }
                if route_of[c] != usize::MAX {
                    missing[route_of[c]] -= 1;
                }
            }
            Event::Clock => clock_started = true,
            Event::Arrive(c) => {
                let r = route_of[c];
                res.arrival[c] = now;
                state[r] = Where::At(stop[r]);
                let a = inst.customer(c).tw_start;
                if a > now {
                    push(&mut heap, a, Event::Clock);
                }
            }
            Event::ServiceEnd(c) => {
                let r = route_of[c];
                let route = &routes[r];
                let prev = c;
                stop[r] += 1;
                match route.get(stop[r]) {
                    Some(&next) => {
                        res.travel += inst.c(prev, next);
                        state[r] = Where::Travelling;
                        push(&mut heap, now + inst.t(prev, next), Event::Arrive(next));
                    }
                    None => {
                        res.travel += inst.c(prev, 0);
                        res.ret[r] = now + inst.t(prev, 0);
                        state[r] = Where::Home;
                    }
                }
            }
        }
        if !clock_started {
            continue;
        }
        // Let every vehicle act whose conditions now hold.
        for r in 0..routes.len() {
            match state[r] {
                Where::Depot => {
                    if central && missing[r] > 0 {
                        continue;
                    }
                    res.departure[r] = now;
                    match routes[r].first() {
                        Some(&first) => {
                            res.travel += inst.c(0, first);
                            state[r] = Where::Travelling;
                            push(&mut heap, now + inst.t(0, first), Event::Arrive(first));
                        }
                        None => {
                            res.ret[r] = now;
                            state[r] = Where::Home;
                        }
                    }
                }
                Where::At(k) => {
                    let c = routes[r][k];
                    let cust = inst.customer(c);
                    if now >= cust.tw_start && done[c] {
                        res.service_start[c] = now;
                        res.delay += (now - cust.tw_end).max(0.0);
                        state[r] = Where::Serving;
                        push(&mut heap, now + cust.service_time, Event::ServiceEnd(c));
                    }
                }
                _ => {}
            }
        }
    }
    res
}

/// On-board production: each vehicle's machines start at zero and produce
/// their customers in delivery order.
pub fn simulate_mop(inst: &Instance, routes: &[Vec<usize>], machine_of: &[Option<usize>]) -> SimResult {
    let m = inst.machines_per_vehicle;
    let mut machines = Vec::new();
    for route in routes {
        for l in 0..m {
            let jobs: Vec<usize> = route.iter().copied().filter(|&c| machine_of[c] == Some(l)).collect();
            machines.push((0.0, jobs));
        }
    }
    simulate(inst, routes, &machines, false)
}

/// Depot production starting at `-H`; vehicles leave once loaded, not before zero.
pub fn simulate_cp(inst: &Instance, routes: &[Vec<usize>], machine_jobs: &[Vec<usize>]) -> SimResult {
    let machines: Vec<(f64, Vec<usize>)> = machine_jobs
        .iter()
        .map(|jobs| (-inst.early_production, jobs.clone()))
        .collect();
    simulate(inst, routes, &machines, true)
}
