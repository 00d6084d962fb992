//! Instance acquisition: Solomon-format parsing, benchmark derivation and
//! the synthetic "realistic" scenario generator.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{Customer, Instance, Variant, Weights};
use crate::search::{fleet_size, SearchError};

/// Share of the average per-machine production load produced before time 0.
pub const EARLY_PRODUCTION_EPSILON: f64 = 0.75;
/// CP routes may last this many times the MoP duration limit.
pub const CP_DURATION_FACTOR: f64 = 10.0;

/// Road distance over straight-line distance for generated instances.
pub const CIRCUITY: f64 = 1.3;
pub const SPEED_KMH: f64 = 50.0;
pub const HORIZON_MINUTES: f64 = 600.0;
pub const AREA_KM: (f64, f64) = (20.0, 30.0);
pub const REALISTIC_POINTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Fleet(#[from] SearchError),
    #[error("invalid scenario: {0}")]
    Scenario(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        message: message.into(),
    }
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn numbers(line: &str, lineno: usize) -> Result<Vec<f64>, InstanceError> {
    line.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(lineno, format!("not a number: {t:?}"))))
        .collect()
}

/// Parses Solomon / Gehring-Homberger text. Travel time equals Euclidean
/// distance, the duration limit is the depot's due date, production times
/// are zero and one machine per vehicle is assumed.
pub fn parse_solomon(text: &str) -> Result<Instance, InstanceError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, name) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let name = name.to_string();

    let mut fleet: Option<(usize, f64)> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut in_customers = false;
    let mut expect_fleet = false;
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if upper.starts_with("VEHICLE") || upper.starts_with("CUSTOMER") {
            in_customers = upper.starts_with("CUSTOMER");
            continue;
        }
        if upper.starts_with("NUMBER") {
            expect_fleet = true;
            continue;
        }
        if upper.starts_with("CUST") {
            continue;
        }
        if expect_fleet {
            let v = numbers(line, lineno)?;
            if v.len() != 2 {
                return Err(parse_err(lineno, "expected vehicle number and capacity"));
            }
            fleet = Some((v[0] as usize, v[1]));
            expect_fleet = false;
            continue;
        }
        if !in_customers {
            return Err(parse_err(lineno, format!("unexpected line {line:?}")));
        }
        let v = numbers(line, lineno)?;
        if v.len() != 7 {
            return Err(parse_err(lineno, format!("expected 7 columns, found {}", v.len())));
        }
        rows.push((lineno, v));
    }
    let (vehicles, capacity) = fleet.ok_or_else(|| parse_err(0, "missing VEHICLE section"))?;
    if rows.is_empty() {
        return Err(parse_err(0, "missing depot row"));
    }
    for (k, (lineno, row)) in rows.iter().enumerate() {
        if row[0] as usize != k {
            return Err(parse_err(*lineno, format!("expected node {k}, found {}", row[0])));
        }
    }
    let coords: Vec<(f64, f64)> = rows.iter().map(|(_, r)| (r[1], r[2])).collect();
    let dist: Vec<Vec<f64>> = coords.iter().map(|&a| coords.iter().map(|&b| euclid(a, b)).collect()).collect();
    let customers = rows[1..]
        .iter()
        .enumerate()
        .map(|(k, (_, r))| Customer {
            id: k + 1,
            demand: r[3],
            production_time: 0.0,
            tw_start: r[4],
            tw_end: r[5],
            service_time: r[6],
        })
        .collect();
    Ok(Instance {
        id: name,
        customers,
        time: dist.clone(),
        dist,
        num_vehicles: vehicles.max(1),
        capacity,
        max_duration: rows[0].1[5],
        machines_per_vehicle: 1,
        early_production: 0.0,
        weights: Weights::default(),
    })
}

/// CP version of a MoP instance: production may start
/// `epsilon * P / (m * κ)` before time zero and routes may last
/// [`CP_DURATION_FACTOR`] times longer.
pub fn to_cp(inst: &Instance, epsilon: f64) -> Instance {
    let mut cp = inst.clone();
    cp.early_production = early_production(inst, epsilon);
    cp.max_duration = inst.max_duration * CP_DURATION_FACTOR;
    cp
}

pub fn early_production(inst: &Instance, epsilon: f64) -> f64 {
    epsilon * inst.total_production() / (inst.machines_per_vehicle * inst.num_vehicles) as f64
}

/// Benchmark instance: `p_i = mu * d_i`, `m` machines per vehicle and the
/// fleet sized by greedy sequential insertion.
pub fn derive_benchmark(base: &Instance, mu: f64, machines: usize, variant: Variant) -> Result<Instance, InstanceError> {
    let mut inst = base.clone();
    for c in &mut inst.customers {
        c.production_time = mu * c.demand;
    }
    inst.machines_per_vehicle = machines;
    inst.early_production = 0.0;
    inst.num_vehicles = fleet_size(&inst)?;
    inst.id = format!("{}_mu{}_m{}", base.id, mu, machines);
    Ok(match variant {
        Variant::Mop => inst,
        Variant::Cp => to_cp(&inst, EARLY_PRODUCTION_EPSILON),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProductionClass {
    Short,
    Medium,
    Long,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowClass {
    Wide,
    Tight,
}

impl ProductionClass {
    pub fn range(self) -> (f64, f64) {
        match self {
            ProductionClass::Short => (20.0, 30.0),
            ProductionClass::Medium => (30.0, 40.0),
            ProductionClass::Long => (30.0, 60.0),
        }
    }
}

impl WindowClass {
    pub fn range(self) -> (f64, f64) {
        match self {
            WindowClass::Wide => (30.0, 60.0),
            WindowClass::Tight => (10.0, 30.0),
        }
    }
}

/// One of the six scenarios `S_W`, `S_T`, `M_W`, `M_T`, `H_W`, `H_T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub production: ProductionClass,
    pub window: WindowClass,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.production {
            ProductionClass::Short => 'S',
            ProductionClass::Medium => 'M',
            ProductionClass::Long => 'H',
        };
        let w = match self.window {
            WindowClass::Wide => 'W',
            WindowClass::Tight => 'T',
        };
        write!(f, "{p}_{w}")
    }
}

impl FromStr for Scenario {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InstanceError::Scenario(format!("unknown scenario {s:?}, expected one of S_W S_T M_W M_T H_W H_T"));
        let (p, w) = s.split_once('_').ok_or_else(bad)?;
        let production = match p {
            "S" => ProductionClass::Short,
            "M" => ProductionClass::Medium,
            "H" => ProductionClass::Long,
            _ => return Err(bad()),
        };
        let window = match w {
            "W" => WindowClass::Wide,
            "T" => WindowClass::Tight,
            _ => return Err(bad()),
        };
        Ok(Scenario { production, window })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScenarioSpec {
    pub scenario: Scenario,
    /// Customers kept out of the 99 generated ones.
    pub n: usize,
    pub seed: u64,
}

impl ScenarioSpec {
    /// `<scenario>_<n>_<seed>`.
    pub fn name(&self) -> String {
        format!("{}_{}_{}", self.scenario, self.n, self.seed)
    }
}

/// Minutes per kilometre of road.
pub fn minutes_per_km() -> f64 {
    60.0 / SPEED_KMH
}

/// Generates a realistic-style instance: 100 random points (depot first) in
/// a 20 x 30 km box, road distance = Euclidean x circuity, 50 km/h, a
/// 600-minute horizon, unit demands and capacity `n`. Each window start is
/// drawn so the window ends inside the horizon and a direct trip out and
/// back still fits.
pub fn gen_realistic(spec: &ScenarioSpec, machines: usize) -> Result<Instance, InstanceError> {
    let customers_total = REALISTIC_POINTS - 1;
    if spec.n == 0 || spec.n > customers_total {
        return Err(InstanceError::Scenario(format!("n must lie in 1..={customers_total}, got {}", spec.n)));
    }
    if machines == 0 {
        return Err(InstanceError::Scenario("machines must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points: Vec<(f64, f64)> = (0..REALISTIC_POINTS)
        .map(|_| (rng.random_range(0.0..=AREA_KM.0), rng.random_range(0.0..=AREA_KM.1)))
        .collect();
    let (p_lo, p_hi) = spec.scenario.production.range();
    let (w_lo, w_hi) = spec.scenario.window.range();
    let mut drawn = Vec::with_capacity(customers_total);
    for k in 1..REALISTIC_POINTS {
        let service: f64 = f64::from(rng.random_range(1u32..=5));
        let production = rng.random_range(p_lo..=p_hi);
        let length = rng.random_range(w_lo..=w_hi);
        let back = euclid(points[k], points[0]) * CIRCUITY * minutes_per_km();
        let latest = HORIZON_MINUTES - length.max(service + back);
        let start = rng.random_range(0.0..=latest.max(0.0));
        drawn.push((k, service, production, start, length));
    }
    let mut keep: Vec<usize> = sample(&mut rng, customers_total, spec.n).into_vec();
    keep.sort_unstable();
    let mut nodes = vec![0];
    nodes.extend(keep.iter().map(|&i| drawn[i].0));
    let dist: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&a| nodes.iter().map(|&b| euclid(points[a], points[b]) * CIRCUITY).collect())
        .collect();
    let time = dist
        .iter()
        .map(|row| row.iter().map(|d| d * minutes_per_km()).collect())
        .collect();
    let customers = keep
        .iter()
        .enumerate()
        .map(|(idx, &i)| {
            let (_, service, production, start, length) = drawn[i];
            Customer {
                id: idx + 1,
                demand: 1.0,
                production_time: production,
                tw_start: start,
                tw_end: start + length,
                service_time: service,
            }
        })
        .collect();
    let mut inst = Instance {
        id: spec.name(),
        customers,
        dist,
        time,
        num_vehicles: 1,
        capacity: spec.n as f64,
        max_duration: HORIZON_MINUTES,
        machines_per_vehicle: machines,
        early_production: 0.0,
        weights: Weights::default(),
    };
    inst.num_vehicles = fleet_size(&inst)?;
    Ok(inst)
}
