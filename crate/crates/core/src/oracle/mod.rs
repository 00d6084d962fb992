//! Exact solvers for tiny instances, plus LP export of the MIP models.
//!
//! The MoP solver enumerates every route (customer sequence with a machine
//! labelling, production in line with the route) once, keeps the cheapest
//! route per customer subset and then combines subsets into at most κ routes.
//! The CP solver enumerates route partitions, job-to-machine assignments and
//! route-group orders per machine; each route is then ordered optimally for
//! the departure those choices imply.

pub mod lp;

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{evaluate_cp, evaluate_mop, CpSolution, Instance, MopSolution, EPS};

pub use lp::{build_mip, cp_assignment, export_mip, mop_assignment, parse_lp, LpModel, LpParseError};

pub const MAX_CUSTOMERS: usize = 9;
pub const MAX_VEHICLES: usize = 3;
pub const MAX_MACHINES: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {what} = {value} exceeds {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("no feasible solution exists")]
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Optimum<S> {
    pub objective: f64,
    pub solution: S,
}

fn guard(inst: &Instance) -> Result<(), OracleError> {
    let checks = [
        ("customers", inst.num_customers(), MAX_CUSTOMERS),
        ("vehicles", inst.num_vehicles, MAX_VEHICLES),
        ("machines per vehicle", inst.machines_per_vehicle, MAX_MACHINES),
    ];
    for (what, value, limit) in checks {
        if value > limit {
            return Err(OracleError::TooLarge { what, value, limit });
        }
    }
    Ok(())
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (1..=n).filter(|&c| mask >> (c - 1) & 1 == 1).collect()
}

/// Cheapest way to cover `full` with at most `k` routes, given the cheapest
/// single route per subset. Returns the cost and the chosen subsets.
fn best_partition(route_cost: &[f64], full: usize, k: usize) -> Option<(f64, Vec<usize>)> {
    let size = route_cost.len();
    // layers[j][mask]: best cost with at most j+1 routes, and first subset used
    let mut layers: Vec<Vec<(f64, usize)>> = Vec::with_capacity(k);
    let mut first = vec![(f64::INFINITY, 0); size];
    first[0] = (0.0, 0);
    for mask in 1..size {
        first[mask] = (route_cost[mask], mask);
    }
    layers.push(first);
    for j in 1..k {
        let prev = &layers[j - 1];
        let mut cur = prev.clone();
        for mask in 1..size {
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let block = sub | low;
                let cost = route_cost[block] + prev[mask ^ block].0;
                if cost < cur[mask].0 {
                    cur[mask] = (cost, block);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        layers.push(cur);
    }
    let (cost, _) = layers[k - 1][full];
    if !cost.is_finite() {
        return None;
    }
    let mut blocks = Vec::new();
    let mut mask = full;
    let mut j = k;
    while mask != 0 {
        let block = layers[j - 1][mask].1;
        blocks.push(block);
        mask ^= block;
        j -= 1;
    }
    Some((cost, blocks))
}

#[derive(Clone)]
struct RouteChoice {
    cost: f64,
    order: Vec<usize>,
    labels: Vec<usize>,
}

struct MopRoutes<'a> {
    inst: &'a Instance,
    best: Vec<Option<RouteChoice>>,
    order: Vec<usize>,
    labels: Vec<usize>,
}

impl MopRoutes<'_> {
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &mut self,
        mask: usize,
        last: usize,
        ready: f64,
        travel: f64,
        delay: f64,
        load: f64,
        clocks: &mut [f64],
        labels_used: usize,
    ) {
        let inst = self.inst;
        if last != 0 {
            let ret = ready + inst.t(last, 0);
            if ret <= inst.max_duration + EPS {
                let cost = inst.objective(travel + inst.c(last, 0), delay);
                if self.best[mask].as_ref().is_none_or(|b| cost < b.cost) {
                    self.best[mask] = Some(RouteChoice {
                        cost,
                        order: self.order.clone(),
                        labels: self.labels.clone(),
                    });
                }
            }
        }
        let n = inst.num_customers();
        for c in 1..=n {
            if mask >> (c - 1) & 1 == 1 {
                continue;
            }
            let cust = inst.customer(c);
            if load + cust.demand > inst.capacity + EPS {
                continue;
            }
            let arrival = ready + inst.t(last, c);
            let label_limit = (labels_used + 1).min(clocks.len());
            for l in 0..label_limit {
                let saved = clocks[l];
                let end = saved + cust.production_time;
                let start = arrival.max(end).max(cust.tw_start);
                let leave = start + cust.service_time;
                if leave > inst.max_duration + EPS {
                    continue;
                }
                clocks[l] = end;
                self.order.push(c);
                self.labels.push(l);
                self.extend(
                    mask | 1 << (c - 1),
                    c,
                    leave,
                    travel + inst.c(last, c),
                    delay + (start - cust.tw_end).max(0.0),
                    load + cust.demand,
                    clocks,
                    labels_used.max(l + 1),
                );
                self.order.pop();
                self.labels.pop();
                clocks[l] = saved;
            }
        }
    }
}

/// Exact MoP optimum. Production is in line with the route order, so a
/// route is fixed by its sequence and a machine label per stop.
pub fn brute_force_mop(inst: &Instance) -> Result<Optimum<MopSolution>, OracleError> {
    guard(inst)?;
    let n = inst.num_customers();
    let mut routes = MopRoutes {
        inst,
        best: vec![None; 1 << n],
        order: Vec::new(),
        labels: Vec::new(),
    };
    let mut clocks = vec![0.0; inst.machines_per_vehicle];
    routes.extend(0, 0, 0.0, 0.0, 0.0, 0.0, &mut clocks, 0);
    let costs: Vec<f64> = routes
        .best
        .iter()
        .map(|b| b.as_ref().map_or(f64::INFINITY, |b| b.cost))
        .collect();
    let (_, blocks) = best_partition(&costs, (1 << n) - 1, inst.num_vehicles).ok_or(OracleError::Infeasible)?;
    let mut sol = MopSolution::empty(inst);
    for (r, block) in blocks.into_iter().enumerate() {
        let choice = routes.best[block].as_ref().expect("chosen blocks have routes");
        sol.routes[r] = choice.order.clone();
        for (&c, &l) in choice.order.iter().zip(&choice.labels) {
            sol.machine_of[c] = Some(l);
        }
    }
    let objective = evaluate_mop(inst, &sol).expect("oracle builds valid solutions").objective;
    Ok(Optimum { objective, solution: sol })
}

/// Best order of the customers in `mask` for a route leaving at `departure`.
struct CpRouteCache<'a> {
    inst: &'a Instance,
    memo: HashMap<(usize, u64), Option<(f64, Vec<usize>)>>,
}

impl CpRouteCache<'_> {
    fn best(&mut self, mask: usize, departure: f64) -> Option<(f64, Vec<usize>)> {
        if mask == 0 {
            return Some((0.0, Vec::new()));
        }
        let key = (mask, departure.to_bits());
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let inst = self.inst;
        let load: f64 = members(mask, inst.num_customers()).iter().map(|&c| inst.customer(c).demand).sum();
        let result = if load > inst.capacity + EPS {
            None
        } else {
            let mut best = None;
            let mut order = Vec::new();
            order_search(inst, mask, 0, departure, 0.0, 0.0, &mut order, &mut best);
            best
        };
        self.memo.insert(key, result.clone());
        result
    }
}

#[allow(clippy::too_many_arguments)]
fn order_search(
    inst: &Instance,
    remaining: usize,
    last: usize,
    ready: f64,
    travel: f64,
    delay: f64,
    order: &mut Vec<usize>,
    best: &mut Option<(f64, Vec<usize>)>,
) {
    if remaining == 0 {
        if ready + inst.t(last, 0) <= inst.max_duration + EPS {
            let cost = inst.objective(travel + inst.c(last, 0), delay);
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                *best = Some((cost, order.clone()));
            }
        }
        return;
    }
    for c in members(remaining, inst.num_customers()) {
        let cust = inst.customer(c);
        let start = (ready + inst.t(last, c)).max(cust.tw_start);
        let leave = start + cust.service_time;
        if leave > inst.max_duration + EPS {
            continue;
        }
        order.push(c);
        order_search(
            inst,
            remaining & !(1 << (c - 1)),
            c,
            leave,
            travel + inst.c(last, c),
            delay + (start - cust.tw_end).max(0.0),
            order,
            best,
        );
        order.pop();
    }
}

/// Calls `f` with every restricted-growth labelling of `len` items using at
/// most `limit` labels (each labelling up to label renaming).
fn for_each_rgs(len: usize, limit: usize, f: &mut impl FnMut(&[usize])) {
    fn go(labels: &mut Vec<usize>, len: usize, limit: usize, used: usize, f: &mut impl FnMut(&[usize])) {
        if labels.len() == len {
            f(labels);
            return;
        }
        for l in 0..(used + 1).min(limit) {
            labels.push(l);
            go(labels, len, limit, used.max(l + 1), f);
            labels.pop();
        }
    }
    go(&mut Vec::with_capacity(len), len, limit, 0, f);
}

/// Calls `f` with every permutation of `items`.
fn for_each_permutation(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

struct CpBest {
    cost: f64,
    orders: Vec<Vec<usize>>,
    machine_jobs: Vec<Vec<usize>>,
}

/// Exact CP optimum. Uses the single-vehicle decomposition when κ = 1.
pub fn brute_force_cp(inst: &Instance) -> Result<Optimum<CpSolution>, OracleError> {
    guard(inst)?;
    if inst.num_vehicles == 1 {
        return cp_single_vehicle(inst);
    }
    brute_force_cp_enumerate(inst)
}

/// Exact CP optimum by full enumeration of partitions, machine assignments
/// and route-grouped machine schedules.
pub fn brute_force_cp_enumerate(inst: &Instance) -> Result<Optimum<CpSolution>, OracleError> {
    guard(inst)?;
    let n = inst.num_customers();
    let machines = inst.depot_machines();
    let mut cache = CpRouteCache {
        inst,
        memo: HashMap::new(),
    };
    let mut best: Option<CpBest> = None;
    for_each_rgs(n, inst.num_vehicles, &mut |route_labels| {
        let blocks_used = route_labels.iter().max().map_or(0, |&x| x + 1);
        let mut blocks = vec![0usize; blocks_used];
        for (idx, &b) in route_labels.iter().enumerate() {
            blocks[b] |= 1 << idx;
        }
        if blocks.iter().any(|&b| {
            let load: f64 = members(b, n).iter().map(|&c| inst.customer(c).demand).sum();
            load > inst.capacity + EPS
        }) {
            return;
        }
        for_each_rgs(n, machines, &mut |machine_labels| {
            // per machine: total production per route group present
            let used = machine_labels.iter().max().map_or(0, |&x| x + 1);
            let mut groups: Vec<Vec<(usize, f64)>> = vec![Vec::new(); used];
            for (idx, &l) in machine_labels.iter().enumerate() {
                let r = route_labels[idx];
                let p = inst.customer(idx + 1).production_time;
                match groups[l].iter_mut().find(|g| g.0 == r) {
                    Some(g) => g.1 += p,
                    None => groups[l].push((r, p)),
                }
            }
            let mut ready = vec![f64::NEG_INFINITY; blocks_used];
            let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); used];
            schedule_orders(inst, &groups, 0, &mut ready, &mut chosen, &mut |ready, chosen| {
                let mut total = 0.0;
                let mut orders = Vec::with_capacity(blocks_used);
                for (q, &block) in blocks.iter().enumerate() {
                    let dep = ready[q].max(0.0);
                    match cache.best(block, dep) {
                        Some((cost, order)) => {
                            total += cost;
                            orders.push(order);
                        }
                        None => return,
                    }
                }
                if best.as_ref().is_none_or(|b| total < b.cost) {
                    let mut machine_jobs = vec![Vec::new(); machines];
                    for (l, order) in chosen.iter().enumerate() {
                        for &r in order {
                            machine_jobs[l].extend(
                                (1..=n).filter(|&c| machine_labels[c - 1] == l && route_labels[c - 1] == r),
                            );
                        }
                    }
                    best = Some(CpBest {
                        cost: total,
                        orders,
                        machine_jobs,
                    });
                }
            });
        });
    });
    let best = best.ok_or(OracleError::Infeasible)?;
    Ok(finish_cp(inst, best))
}

/// Enumerates route-group orders machine by machine, tracking each route's
/// latest completion.
fn schedule_orders(
    inst: &Instance,
    groups: &[Vec<(usize, f64)>],
    l: usize,
    ready: &mut Vec<f64>,
    chosen: &mut Vec<Vec<usize>>,
    f: &mut impl FnMut(&[f64], &[Vec<usize>]),
) {
    if l == groups.len() {
        f(ready, chosen);
        return;
    }
    let mut idx: Vec<usize> = (0..groups[l].len()).collect();
    for_each_permutation(&mut idx, 0, &mut |perm| {
        let saved = ready.clone();
        let mut clock = -inst.early_production;
        chosen[l].clear();
        for &g in perm {
            let (r, p) = groups[l][g];
            clock += p;
            ready[r] = ready[r].max(clock);
            chosen[l].push(r);
        }
        schedule_orders(inst, groups, l + 1, ready, chosen, f);
        *ready = saved;
    });
}

fn finish_cp(inst: &Instance, best: CpBest) -> Optimum<CpSolution> {
    let mut sol = CpSolution::empty(inst);
    for (r, order) in best.orders.into_iter().enumerate() {
        sol.routes[r] = order;
    }
    sol.machine_jobs = best.machine_jobs;
    let objective = evaluate_cp(inst, &sol).expect("oracle builds valid solutions").objective;
    Optimum { objective, solution: sol }
}

/// Single vehicle: leave as early as possible, i.e. minimize the production
/// makespan over the depot machines, then order the route for that departure.
pub fn cp_single_vehicle(inst: &Instance) -> Result<Optimum<CpSolution>, OracleError> {
    guard(inst)?;
    let n = inst.num_customers();
    let machines = inst.depot_machines();
    let mut best_span = f64::INFINITY;
    let mut best_labels = vec![0; n];
    for_each_rgs(n, machines, &mut |labels| {
        let mut load = vec![0.0; machines];
        for (idx, &l) in labels.iter().enumerate() {
            load[l] += inst.customer(idx + 1).production_time;
        }
        let span = load.iter().copied().fold(0.0, f64::max);
        if span < best_span {
            best_span = span;
            best_labels = labels.to_vec();
        }
    });
    let departure = if n == 0 { 0.0 } else { (best_span - inst.early_production).max(0.0) };
    let mut cache = CpRouteCache {
        inst,
        memo: HashMap::new(),
    };
    let full = (1usize << n) - 1;
    let (cost, order) = cache.best(full, departure).ok_or(OracleError::Infeasible)?;
    let mut machine_jobs = vec![Vec::new(); machines];
    for c in 1..=n {
        machine_jobs[best_labels[c - 1]].push(c);
    }
    Ok(finish_cp(
        inst,
        CpBest {
            cost,
            orders: vec![order],
            machine_jobs,
        },
    ))
}

/// Relative gap `(value - reference) / reference * 100`.
pub fn gap_percent(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (value - reference) / reference * 100.0
    }
}
