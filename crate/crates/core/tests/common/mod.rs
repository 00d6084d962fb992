#![allow(dead_code)]

pub mod enumerators;
pub mod simulate;

use mopvrp_core::model::{CpSolution, Customer, Instance, MopSolution, Weights};
use rand::seq::SliceRandom;
use rand::Rng;

/// Shape of a random test instance.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub n: usize,
    pub vehicles: usize,
    pub machines: usize,
    /// Round every number to an integer so sums are exact.
    pub integer: bool,
    /// Upper end of the window start draw; larger spreads windows out.
    pub horizon: f64,
}

impl Shape {
    pub fn new(n: usize, vehicles: usize, machines: usize) -> Self {
        Shape {
            n,
            vehicles,
            machines,
            integer: false,
            horizon: 60.0,
        }
    }

    pub fn integer(mut self) -> Self {
        self.integer = true;
        self
    }
}

fn draw(rng: &mut impl Rng, lo: f64, hi: f64, integer: bool) -> f64 {
    if integer {
        rng.random_range(lo as i64..=hi as i64) as f64
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Random Euclidean instance. Capacity and duration are loose enough for
/// every customer to be served alone but sometimes bind for longer routes.
pub fn random_instance(rng: &mut impl Rng, shape: Shape) -> Instance {
    let n = shape.n;
    let int = shape.integer;
    let pts: Vec<(f64, f64)> = (0..=n)
        .map(|_| (draw(rng, 0.0, 40.0, int), draw(rng, 0.0, 40.0, int)))
        .collect();
    let dist: Vec<Vec<f64>> = pts
        .iter()
        .map(|a| {
            pts.iter()
                .map(|b| {
                    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
                    if int {
                        d.round()
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect();
    let customers: Vec<Customer> = (1..=n)
        .map(|id| {
            let a = draw(rng, 0.0, shape.horizon, int);
            let len = draw(rng, 0.0, 40.0, int);
            Customer {
                id,
                demand: draw(rng, 1.0, 5.0, int),
                production_time: draw(rng, 0.0, 25.0, int),
                tw_start: a,
                tw_end: a + len,
                service_time: draw(rng, 0.0, 5.0, int),
            }
        })
        .collect();
    let total_demand: f64 = customers.iter().map(|c| c.demand).sum();
    let capacity = if rng.random_bool(0.5) {
        total_demand
    } else {
        (total_demand / shape.vehicles as f64).ceil().max(5.0)
    };
    let max_duration = if rng.random_bool(0.7) { 1000.0 } else { 250.0 };
    Instance {
        id: "random".into(),
        customers,
        time: dist.clone(),
        dist,
        num_vehicles: shape.vehicles,
        capacity,
        max_duration,
        machines_per_vehicle: shape.machines,
        early_production: if rng.random_bool(0.5) { 0.0 } else { draw(rng, 0.0, 30.0, int) },
        weights: Weights::default(),
    }
}

/// Splits all customers over the vehicles at random (routes may be empty).
pub fn random_routes(rng: &mut impl Rng, inst: &Instance) -> Vec<Vec<usize>> {
    let mut ids: Vec<usize> = (1..=inst.num_customers()).collect();
    ids.shuffle(rng);
    let mut routes = vec![Vec::new(); inst.num_vehicles];
    for c in ids {
        let r = rng.random_range(0..inst.num_vehicles);
        routes[r].push(c);
    }
    routes
}

pub fn random_mop(rng: &mut impl Rng, inst: &Instance) -> MopSolution {
    let routes = random_routes(rng, inst);
    let mut machine_of = vec![None; inst.num_customers() + 1];
    for &c in routes.iter().flatten() {
        machine_of[c] = Some(rng.random_range(0..inst.machines_per_vehicle));
    }
    MopSolution { routes, machine_of }
}

/// Random CP solution with arbitrary (not necessarily grouped) schedules.
pub fn random_cp(rng: &mut impl Rng, inst: &Instance) -> CpSolution {
    let routes = random_routes(rng, inst);
    let mut jobs: Vec<usize> = routes.iter().flatten().copied().collect();
    jobs.shuffle(rng);
    let mut machine_jobs = vec![Vec::new(); inst.depot_machines()];
    for c in jobs {
        let l = rng.random_range(0..machine_jobs.len());
        machine_jobs[l].push(c);
    }
    CpSolution { routes, machine_jobs }
}

/// Removes `count` random customers from a solution's routes (and machines).
pub fn drop_customers(rng: &mut impl Rng, routes: &mut [Vec<usize>], count: usize) -> Vec<usize> {
    let mut all: Vec<usize> = routes.iter().flatten().copied().collect();
    all.shuffle(rng);
    all.truncate(count);
    for route in routes.iter_mut() {
        route.retain(|c| !all.contains(c));
    }
    all
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
        "{what}: {a} vs {b}"
    );
}
