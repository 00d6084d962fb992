//! Exhaustive reference solvers that make no structural assumptions about
//! production schedules. Timing is recomputed here from first principles.

use std::collections::{HashMap, HashSet};

use mopvrp_core::model::{evaluate_cp, evaluate_mop, CpSolution, Instance, MopSolution, EPS};

/// (travel, delay, return) of a route leaving at `departure`.
pub fn time_route(inst: &Instance, route: &[usize], departure: f64, ready: impl Fn(usize) -> f64) -> (f64, f64, f64) {
    if route.is_empty() {
        return (0.0, 0.0, departure);
    }
    let mut t = departure;
    let mut at = 0;
    let mut travel = 0.0;
    let mut delay = 0.0;
    for &c in route {
        let cust = inst.customer(c);
        travel += inst.dist[at][c];
        let s = (t + inst.time[at][c]).max(ready(c)).max(cust.tw_start);
        delay += (s - cust.tw_end).max(0.0);
        t = s + cust.service_time;
        at = c;
    }
    travel += inst.dist[at][0];
    (travel, delay, t + inst.time[at][0])
}

pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (k, &first) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(k);
        for mut tail in permutations(&rest) {
            tail.insert(0, first);
            out.push(tail);
        }
    }
    out
}

/// Every way to spread `items` over `machines` ordered job lists.
pub fn schedules(items: &[usize], machines: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![vec![Vec::new(); machines]];
    for &c in items {
        let mut next = Vec::new();
        for s in &out {
            for l in 0..machines {
                for pos in 0..=s[l].len() {
                    let mut t = s.clone();
                    t[l].insert(pos, c);
                    next.push(t);
                }
            }
        }
        out = next;
    }
    out
}

fn members(mask: usize, n: usize) -> Vec<usize> {
    (1..=n).filter(|&c| mask & (1 << (c - 1)) != 0).collect()
}

/// Every labelling of customers `1..=n` with route indices `0..k`.
fn labellings(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|l: Vec<usize>| {
                (0..k).map(move |r| {
                    let mut l = l.clone();
                    l.push(r);
                    l
                })
            })
            .collect();
    }
    out
}

fn masks_of(label: &[usize], k: usize) -> Vec<usize> {
    let mut masks = vec![0usize; k];
    for (idx, &r) in label.iter().enumerate() {
        masks[r] |= 1 << idx;
    }
    masks
}

/// MoP optimum over every route order, machine assignment and production
/// order on every machine, in-line or not. `None` when infeasible.
pub fn unpruned_mop(inst: &Instance) -> Option<f64> {
    let n = inst.num_customers();
    let w = inst.weights;
    let mut best_of = vec![f64::INFINITY; 1 << n];
    best_of[0] = 0.0;
    for mask in 1..1usize << n {
        let set = members(mask, n);
        let load: f64 = set.iter().map(|&c| inst.customer(c).demand).sum();
        if load > inst.capacity + EPS {
            continue;
        }
        let scheds = schedules(&set, inst.machines_per_vehicle);
        let mut ends: Vec<Vec<f64>> = Vec::with_capacity(scheds.len());
        for s in &scheds {
            let mut end = vec![0.0; n + 1];
            for jobs in s {
                let mut clock = 0.0;
                for &c in jobs {
                    clock += inst.customer(c).production_time;
                    end[c] = clock;
                }
            }
            ends.push(end);
        }
        for order in permutations(&set) {
            for end in &ends {
                let (travel, delay, ret) = time_route(inst, &order, 0.0, |c| end[c]);
                if ret <= inst.max_duration + EPS {
                    best_of[mask] = best_of[mask].min(w.travel * travel + w.delay * delay);
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    for label in labellings(n, inst.num_vehicles) {
        let total: f64 = masks_of(&label, inst.num_vehicles).iter().map(|&m| best_of[m]).sum();
        best = best.min(total);
    }
    best.is_finite().then_some(best)
}

/// CP optimum over every route partition, route order, and every job order
/// on every depot machine (schedules need not group routes).
pub fn ungrouped_cp(inst: &Instance) -> Option<f64> {
    let n = inst.num_customers();
    let w = inst.weights;
    let all: Vec<usize> = (1..=n).collect();
    let mut ends: Vec<Vec<f64>> = Vec::new();
    for s in schedules(&all, inst.depot_machines()) {
        let mut end = vec![0.0; n + 1];
        for jobs in &s {
            let mut clock = -inst.early_production;
            for &c in jobs {
                clock += inst.customer(c).production_time;
                end[c] = clock;
            }
        }
        ends.push(end);
    }
    let mut orders: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
    let mut memo: HashMap<(usize, u64), f64> = HashMap::new();
    let mut route_best = |mask: usize, dep: f64| -> f64 {
        if mask == 0 {
            return 0.0;
        }
        *memo.entry((mask, dep.to_bits())).or_insert_with(|| {
            let set = members(mask, n);
            let load: f64 = set.iter().map(|&c| inst.customer(c).demand).sum();
            if load > inst.capacity + EPS {
                return f64::INFINITY;
            }
            let perms = orders.entry(mask).or_insert_with(|| permutations(&set));
            perms
                .iter()
                .filter_map(|order| {
                    let (travel, delay, ret) = time_route(inst, order, dep, |_| f64::NEG_INFINITY);
                    (ret <= inst.max_duration + EPS).then_some(w.travel * travel + w.delay * delay)
                })
                .fold(f64::INFINITY, f64::min)
        })
    };
    let mut best = f64::INFINITY;
    for label in labellings(n, inst.num_vehicles) {
        let masks = masks_of(&label, inst.num_vehicles);
        let groups: Vec<Vec<usize>> = masks.iter().map(|&m| members(m, n)).collect();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        for end in &ends {
            let deps: Vec<f64> = groups
                .iter()
                .map(|g| g.iter().map(|&c| end[c]).fold(0.0, f64::max))
                .collect();
            if !seen.insert(deps.iter().map(|d| d.to_bits()).collect()) {
                continue;
            }
            let total: f64 = masks.iter().zip(&deps).map(|(&m, &d)| route_best(m, d)).sum();
            best = best.min(total);
        }
    }
    best.is_finite().then_some(best)
}

/// Cheapest feasible MoP insertion of `i` over every route, position and
/// machine, costed by full re-evaluation.
pub fn exhaustive_mop_insertion(inst: &Instance, sol: &MopSolution, i: usize) -> Option<f64> {
    let base = evaluate_mop(inst, sol).unwrap().objective;
    let mut best: Option<f64> = None;
    for r in 0..sol.routes.len() {
        if inst.route_load(&sol.routes[r]) + inst.customer(i).demand > inst.capacity + EPS {
            continue;
        }
        for pos in 0..=sol.routes[r].len() {
            for l in 0..inst.machines_per_vehicle {
                let mut s = sol.clone();
                s.routes[r].insert(pos, i);
                s.machine_of[i] = Some(l);
                let tl = evaluate_mop(inst, &s).unwrap();
                if tl.route_return[r] > inst.max_duration + EPS {
                    continue;
                }
                let d = tl.objective - base;
                if best.is_none_or(|b| d < b) {
                    best = Some(d);
                }
            }
        }
    }
    best
}

/// Cheapest feasible CP insertion of `i` over every route position, machine
/// and job position, plus every move of the target route's earlier jobs on
/// that machine to just before the new job. Costed with `evaluate_cp`.
pub fn exhaustive_cp_insertion(inst: &Instance, sol: &CpSolution, i: usize) -> Option<f64> {
    let before = evaluate_cp(inst, sol).unwrap();
    let route_of = sol.route_of(inst.num_customers());
    let mut best: Option<f64> = None;
    for r in 0..sol.routes.len() {
        if inst.route_load(&sol.routes[r]) + inst.customer(i).demand > inst.capacity + EPS {
            continue;
        }
        for rho in 0..=sol.routes[r].len() {
            for l in 0..sol.machine_jobs.len() {
                let jobs = &sol.machine_jobs[l];
                let last_own = jobs.iter().rposition(|&c| route_of[c] == Some(r));
                for nu in 0..=jobs.len() {
                    let mut variants = vec![false];
                    if last_own.is_some_and(|k| nu > k) {
                        variants.push(true);
                    }
                    for gather in variants {
                        let mut sched: Vec<usize> = Vec::new();
                        if gather {
                            sched.extend(jobs[..nu].iter().filter(|&&c| route_of[c] != Some(r)));
                            sched.extend(jobs[..nu].iter().filter(|&&c| route_of[c] == Some(r)));
                        } else {
                            sched.extend_from_slice(&jobs[..nu]);
                        }
                        sched.push(i);
                        sched.extend_from_slice(&jobs[nu..]);
                        let mut s = sol.clone();
                        s.routes[r].insert(rho, i);
                        s.machine_jobs[l] = sched;
                        let tl = evaluate_cp(inst, &s).unwrap();
                        let feasible = (0..s.routes.len()).all(|q| {
                            let ret = tl.route_return[q];
                            if q == r {
                                ret <= inst.max_duration + EPS
                            } else {
                                ret <= inst.max_duration + EPS || ret <= before.route_return[q] + EPS
                            }
                        });
                        if !feasible {
                            continue;
                        }
                        let d = tl.objective - before.objective;
                        if best.is_none_or(|b| d < b) {
                            best = Some(d);
                        }
                    }
                }
            }
        }
    }
    best
}
