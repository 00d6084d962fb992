//! Canonical JSON for instances and solutions.
//!
//! Every file carries `"format": 1`; unknown fields are rejected. Customer
//! ids are 1-based with the depot at matrix index 0; routes, vehicles and
//! machines are numbered from 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{CpSolution, Customer, Instance, ModelError, MopSolution, Variant, Weights};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("unsupported format version {found}, expected {FORMAT_VERSION}")]
    Version { found: u32 },
    #[error("schema violation: {0}")]
    Schema(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("solution file: {0}")]
    Solution(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format: u32,
    id: String,
    depot_index: usize,
    customers: Vec<Customer>,
    dist: Vec<Vec<f64>>,
    time: Vec<Vec<f64>>,
    num_vehicles: usize,
    capacity: f64,
    max_duration: f64,
    machines_per_vehicle: usize,
    early_production: f64,
    #[serde(default)]
    weights: Weights,
}

#[derive(Deserialize)]
struct VersionProbe {
    format: u32,
}

fn check_version(text: &str) -> Result<(), IoError> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.format != FORMAT_VERSION {
        return Err(IoError::Version { found: probe.format });
    }
    Ok(())
}

pub fn write_instance(inst: &Instance) -> String {
    let file = InstanceFile {
        format: FORMAT_VERSION,
        id: inst.id.clone(),
        depot_index: 0,
        customers: inst.customers.clone(),
        dist: inst.dist.clone(),
        time: inst.time.clone(),
        num_vehicles: inst.num_vehicles,
        capacity: inst.capacity,
        max_duration: inst.max_duration,
        machines_per_vehicle: inst.machines_per_vehicle,
        early_production: inst.early_production,
        weights: inst.weights,
    };
    serde_json::to_string_pretty(&file).expect("instances serialize") + "\n"
}

/// Reads and validates an instance.
pub fn read_instance(text: &str) -> Result<Instance, IoError> {
    check_version(text)?;
    let f: InstanceFile = serde_json::from_str(text)?;
    if f.depot_index != 0 {
        return Err(IoError::Model(ModelError::InvalidInstance("depot_index must be 0".into())));
    }
    let inst = Instance {
        id: f.id,
        customers: f.customers,
        dist: f.dist,
        time: f.time,
        num_vehicles: f.num_vehicles,
        capacity: f.capacity,
        max_duration: f.max_duration,
        machines_per_vehicle: f.machines_per_vehicle,
        early_production: f.early_production,
        weights: f.weights,
    };
    inst.validate()?;
    Ok(inst)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    Mop(MopSolution),
    Cp(CpSolution),
}

impl Solution {
    pub fn variant(&self) -> Variant {
        match self {
            Solution::Mop(_) => Variant::Mop,
            Solution::Cp(_) => Variant::Cp,
        }
    }

    pub fn routes(&self) -> &[Vec<usize>] {
        match self {
            Solution::Mop(s) => &s.routes,
            Solution::Cp(s) => &s.routes,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionFile {
    format: u32,
    instance: String,
    variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    routes: Vec<Vec<usize>>,
    /// MoP: customer id -> machine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    machine_of: Option<BTreeMap<usize, usize>>,
    /// CP: job sequence per depot machine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    machine_jobs: Option<Vec<Vec<usize>>>,
}

/// Serializes a solution; `objective` is informational only.
pub fn write_solution(instance_id: &str, sol: &Solution, objective: Option<f64>) -> String {
    let (machine_of, machine_jobs) = match sol {
        Solution::Mop(s) => {
            let map = s
                .machine_of
                .iter()
                .enumerate()
                .filter_map(|(c, l)| l.map(|l| (c, l)))
                .collect();
            (Some(map), None)
        }
        Solution::Cp(s) => (None, Some(s.machine_jobs.clone())),
    };
    let file = SolutionFile {
        format: FORMAT_VERSION,
        instance: instance_id.to_string(),
        variant: sol.variant(),
        objective,
        routes: sol.routes().to_vec(),
        machine_of,
        machine_jobs,
    };
    serde_json::to_string_pretty(&file).expect("solutions serialize") + "\n"
}

/// Reads a solution and its instance id. Structural checks against an
/// instance happen at evaluation time.
pub fn read_solution(text: &str) -> Result<(String, Solution), IoError> {
    check_version(text)?;
    let f: SolutionFile = serde_json::from_str(text)?;
    let sol = match (f.variant, f.machine_of, f.machine_jobs) {
        (Variant::Mop, Some(map), None) => {
            let size = f.routes.iter().flatten().chain(map.keys()).copied().max().unwrap_or(0) + 1;
            let mut machine_of = vec![None; size];
            for (c, l) in map {
                machine_of[c] = Some(l);
            }
            Solution::Mop(MopSolution {
                routes: f.routes,
                machine_of,
            })
        }
        (Variant::Cp, None, Some(machine_jobs)) => Solution::Cp(CpSolution {
            routes: f.routes,
            machine_jobs,
        }),
        (Variant::Mop, _, _) => return Err(IoError::Solution("mop solutions need machine_of and no machine_jobs".into())),
        (Variant::Cp, _, _) => return Err(IoError::Solution("cp solutions need machine_jobs and no machine_of".into())),
    };
    Ok((f.instance, sol))
}
