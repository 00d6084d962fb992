//! Adaptive large neighbourhood search with threshold acceptance.
//!
//! Each iteration draws a noise flag, a destroy operator and a regret-k
//! repair operator by roulette wheel, rebuilds the current solution and
//! accepts the result if it lies within a relative threshold of the best
//! solution found. The threshold shrinks linearly to zero over the budget.
//! Operator weights are refreshed every segment from the scores they earned.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Variant, EPS};
use crate::search::{parallel_construct, regret_insert, InsertionReport, Plan};

/// Weights never drop below this, so every operator keeps being drawn.
pub const MIN_WEIGHT: f64 = 1e-3;

/// Added to the objective per unit of capacity or duration excess.
pub const INFEASIBILITY_PENALTY: f64 = 1e6;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scores {
    pub best: f64,
    pub better: f64,
    pub accepted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlnsConfig {
    pub n_max: usize,
    pub t_initial: f64,
    pub removal_range: (f64, f64),
    pub segment_length: usize,
    pub scores: Scores,
    pub reaction: f64,
    /// Noise amplitude as a fraction of the largest distance.
    pub noise_level: f64,
    pub u_worst: f64,
    pub u_related: f64,
    pub rng_seed: u64,
}

impl AlnsConfig {
    pub fn for_variant(variant: Variant) -> Self {
        let (t_initial, removal_range) = match variant {
            Variant::Mop => (0.10, (0.10, 0.40)),
            Variant::Cp => (0.175, (0.05, 0.50)),
        };
        AlnsConfig {
            n_max: 25_000,
            t_initial,
            removal_range,
            segment_length: 100,
            scores: Scores {
                best: 33.0,
                better: 9.0,
                accepted: 13.0,
            },
            reaction: 0.1,
            noise_level: 0.025,
            u_worst: 3.0,
            u_related: 6.0,
            rng_seed: 0,
        }
    }

    /// Reads a JSON object whose fields override the variant defaults.
    pub fn from_json(text: &str, variant: Variant) -> Result<Self, ConfigError> {
        let overrides: serde_json::Value = serde_json::from_str(text)?;
        let serde_json::Value::Object(overrides) = overrides else {
            return Err(ConfigError::Invalid("expected a JSON object".into()));
        };
        let mut merged = serde_json::to_value(Self::for_variant(variant))?;
        let fields = merged.as_object_mut().expect("config serializes to an object");
        for (key, value) in overrides {
            fields.insert(key, value);
        }
        let config: AlnsConfig = serde_json::from_value(merged)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let (l1, l2) = self.removal_range;
        let bad = |msg: &str| Err(ConfigError::Invalid(msg.into()));
        if !(0.0 < l1 && l1 <= l2 && l2 < 1.0) {
            return bad("removal_range must satisfy 0 < lambda1 <= lambda2 < 1");
        }
        if !(self.t_initial > 0.0) {
            return bad("t_initial must be positive");
        }
        if self.segment_length == 0 {
            return bad("segment_length must be at least 1");
        }
        if !(self.reaction > 0.0 && self.reaction <= 1.0) {
            return bad("reaction must lie in (0, 1]");
        }
        if !(self.noise_level >= 0.0) || !(self.u_worst >= 0.0) || !(self.u_related >= 0.0) {
            return bad("noise_level and randomization exponents must be nonnegative");
        }
        let s = self.scores;
        if !(s.best >= 0.0 && s.better >= 0.0 && s.accepted >= 0.0) {
            return bad("scores must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DestroyOp {
    Random,
    Worst,
    WorstDelay,
    WorstDist,
    Geo,
    Demand,
}

impl DestroyOp {
    pub const ALL: [DestroyOp; 6] = [
        DestroyOp::Random,
        DestroyOp::Worst,
        DestroyOp::WorstDelay,
        DestroyOp::WorstDist,
        DestroyOp::Geo,
        DestroyOp::Demand,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DestroyOp::Random => "random",
            DestroyOp::Worst => "worst",
            DestroyOp::WorstDelay => "worst_delay",
            DestroyOp::WorstDist => "worst_dist",
            DestroyOp::Geo => "geo",
            DestroyOp::Demand => "demand",
        }
    }
}

/// Largest regret order among the repair operators.
pub const MAX_REGRET: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorWeight {
    pub weight: f64,
    pub score: f64,
    pub uses: u64,
}

impl Default for OperatorWeight {
    fn default() -> Self {
        OperatorWeight {
            weight: 1.0,
            score: 0.0,
            uses: 0,
        }
    }
}

/// Roulette-wheel weights for destroy operators, regret-1..4 repair and the
/// noise off/on pair.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OperatorBank {
    pub destroy: [OperatorWeight; 6],
    pub repair: [OperatorWeight; MAX_REGRET],
    /// Index 0: noise off, 1: noise on.
    pub noise: [OperatorWeight; 2],
}

fn roulette(ops: &[OperatorWeight], rng: &mut impl Rng) -> usize {
    let total: f64 = ops.iter().map(|o| o.weight).sum();
    let mut x = rng.random::<f64>() * total;
    for (k, o) in ops.iter().enumerate() {
        if x < o.weight {
            return k;
        }
        x -= o.weight;
    }
    ops.len() - 1
}

fn refresh(ops: &mut [OperatorWeight], reaction: f64) {
    for o in ops {
        if o.uses > 0 {
            let mean = o.score / o.uses as f64;
            o.weight = (o.weight * (1.0 - reaction) + reaction * mean).max(MIN_WEIGHT);
        }
        o.score = 0.0;
        o.uses = 0;
    }
}

/// End-of-segment update: `w <- w(1-r) + r * score/uses` for every operator
/// used in the segment, then the segment counters are reset.
pub fn update_weights(bank: &mut OperatorBank, reaction: f64) {
    refresh(&mut bank.destroy, reaction);
    refresh(&mut bank.repair, reaction);
    refresh(&mut bank.noise, reaction);
}

/// Number of customers to remove: uniform in `[floor(l1 n), floor(l2 n)]`,
/// clamped to `[1, n]`.
pub fn draw_removal_count(config: &AlnsConfig, n: usize, rng: &mut impl Rng) -> usize {
    let (l1, l2) = config.removal_range;
    let clamp = |x: f64| (x.floor() as usize).clamp(1, n.max(1));
    let lo = clamp(l1 * n as f64);
    let hi = clamp(l2 * n as f64).max(lo);
    rng.random_range(lo..=hi)
}

fn biased_index(len: usize, u: f64, rng: &mut impl Rng) -> usize {
    let sigma: f64 = rng.random();
    ((sigma.powf(u) * len as f64) as usize).min(len - 1)
}

/// Removes `phi` uniformly chosen customers; returns them in removal order.
pub fn random_removal<P: Plan>(sol: &mut P, phi: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut routed = sol.routed();
    let mut removed = Vec::with_capacity(phi);
    for _ in 0..phi.min(routed.len()) {
        let c = routed.swap_remove(rng.random_range(0..routed.len()));
        sol.remove(c);
        removed.push(c);
    }
    removed
}

/// Which saving a worst-type removal ranks by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SavingKind {
    Total,
    Delay,
    Distance,
}

/// Removes `phi` customers one at a time, each drawn near the top of the
/// list sorted by descending saving; savings are recomputed after each removal.
pub fn worst_removal<P: Plan>(
    inst: &Instance,
    sol: &mut P,
    phi: usize,
    u: f64,
    kind: SavingKind,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut removed = Vec::with_capacity(phi);
    for _ in 0..phi {
        let mut list: Vec<(f64, usize)> = sol
            .removal_savings(inst)
            .into_iter()
            .map(|s| {
                let xi = match kind {
                    SavingKind::Total => inst.objective(s.travel, s.delay),
                    SavingKind::Delay => s.delay,
                    SavingKind::Distance => s.travel,
                };
                (xi, s.customer)
            })
            .collect();
        if list.is_empty() {
            break;
        }
        list.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let c = list[biased_index(list.len(), u, rng)].1;
        sol.remove(c);
        removed.push(c);
    }
    removed
}

/// Removes a random seed customer, then `phi - 1` customers drawn near the
/// top of the list sorted by ascending `relatedness(seed, customer)`.
pub fn related_removal<P: Plan>(
    sol: &mut P,
    phi: usize,
    u: f64,
    relatedness: impl Fn(usize, usize) -> f64,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let mut routed = sol.routed();
    if routed.is_empty() || phi == 0 {
        return Vec::new();
    }
    let seed = routed.swap_remove(rng.random_range(0..routed.len()));
    sol.remove(seed);
    let mut removed = vec![seed];
    let mut list: Vec<(f64, usize)> = routed.into_iter().map(|c| (relatedness(seed, c), c)).collect();
    list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for _ in 1..phi {
        if list.is_empty() {
            break;
        }
        let (_, c) = list.remove(biased_index(list.len(), u, rng));
        sol.remove(c);
        removed.push(c);
    }
    removed
}

pub fn geo_removal<P: Plan>(inst: &Instance, sol: &mut P, phi: usize, u: f64, rng: &mut impl Rng) -> Vec<usize> {
    related_removal(sol, phi, u, |q, i| inst.c(q, i), rng)
}

pub fn demand_removal<P: Plan>(inst: &Instance, sol: &mut P, phi: usize, u: f64, rng: &mut impl Rng) -> Vec<usize> {
    related_removal(
        sol,
        phi,
        u,
        |q, i| (inst.customer(q).demand - inst.customer(i).demand).abs(),
        rng,
    )
}

pub fn destroy<P: Plan>(
    inst: &Instance,
    sol: &mut P,
    op: DestroyOp,
    phi: usize,
    config: &AlnsConfig,
    rng: &mut impl Rng,
) -> Vec<usize> {
    match op {
        DestroyOp::Random => random_removal(sol, phi, rng),
        DestroyOp::Worst => worst_removal(inst, sol, phi, config.u_worst, SavingKind::Total, rng),
        DestroyOp::WorstDelay => worst_removal(inst, sol, phi, config.u_worst, SavingKind::Delay, rng),
        DestroyOp::WorstDist => worst_removal(inst, sol, phi, config.u_worst, SavingKind::Distance, rng),
        DestroyOp::Geo => geo_removal(inst, sol, phi, config.u_related, rng),
        DestroyOp::Demand => demand_removal(inst, sol, phi, config.u_related, rng),
    }
}

/// Regret-`k` reinsertion of `removed`. With `noise`, every candidate cost
/// is shifted by `U[-a, a]`, `a = noise * max distance`, and floored at 0.
pub fn regret_k_repair<P: Plan>(
    inst: &Instance,
    sol: &mut P,
    removed: &[usize],
    k: usize,
    noise: Option<f64>,
    rng: &mut impl Rng,
) -> InsertionReport {
    match noise {
        Some(level) if level > 0.0 => {
            let amp = level * inst.max_dist();
            regret_insert(inst, sol, removed, k, |c| (c + rng.random_range(-amp..=amp)).max(0.0))
        }
        _ => regret_insert(inst, sol, removed, k, |c| c),
    }
}

/// Objective plus a penalty on capacity and duration excess.
pub fn fitness<P: Plan>(inst: &Instance, sol: &P) -> (f64, f64) {
    let tl = sol.evaluate(inst);
    let mut violation = 0.0;
    for (r, route) in sol.routes().iter().enumerate() {
        violation += (inst.route_load(route) - inst.capacity - EPS).max(0.0);
        violation += (tl.route_return[r] - inst.max_duration - EPS).max(0.0);
    }
    (tl.objective, violation)
}

fn penalized(inst: &Instance, sol: &impl Plan) -> f64 {
    let (objective, violation) = fitness(inst, sol);
    objective + INFEASIBILITY_PENALTY * violation
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub current: f64,
    pub best: f64,
    pub operator: String,
    pub accepted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub initial_objective: f64,
    pub records: Vec<IterationRecord>,
    /// Final weights plus lifetime usage counts per operator.
    pub bank: OperatorBank,
    pub destroy_uses: [u64; 6],
    pub repair_uses: [u64; MAX_REGRET],
    pub noise_uses: [u64; 2],
    pub new_bests: u64,
    pub forced_insertions: u64,
    pub wall_seconds: f64,
}

impl RunStats {
    pub fn best_trace(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.best).collect()
    }

    /// `iteration,current,best,operator,accepted` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,current,best,operator,accepted\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.iteration, r.current, r.best, r.operator, r.accepted
            ));
        }
        out
    }
}

/// Runs the search from a parallel-insertion start and returns the best
/// solution found (penalized objective) with its statistics.
pub fn run<P: Plan>(inst: &Instance, config: &AlnsConfig) -> (P, RunStats) {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut stats = RunStats::default();
    let (initial, report) = parallel_construct::<P>(inst);
    stats.forced_insertions += report.forced.len() as u64;
    let mut current = initial;
    let mut f_current = penalized(inst, &current);
    let mut best = current.clone();
    let mut f_best = f_current;
    stats.initial_objective = f_current;

    let n = inst.num_customers();
    let mut bank = OperatorBank::default();
    let mut threshold = config.t_initial;
    let step = if config.n_max > 0 { config.t_initial / config.n_max as f64 } else { 0.0 };
    if n > 0 {
        for iteration in 1..=config.n_max {
            let noise = roulette(&bank.noise, &mut rng);
            let d = roulette(&bank.destroy, &mut rng);
            let r = roulette(&bank.repair, &mut rng);
            let op = DestroyOp::ALL[d];

            let mut candidate = current.clone();
            let phi = draw_removal_count(config, n, &mut rng);
            let removed = destroy(inst, &mut candidate, op, phi, config, &mut rng);
            let level = (noise == 1).then_some(config.noise_level);
            let report = regret_k_repair(inst, &mut candidate, &removed, r + 1, level, &mut rng);
            stats.forced_insertions += report.forced.len() as u64;
            let f = penalized(inst, &candidate);

            let accepted = if f_best > 0.0 {
                (f - f_best) / f_best < threshold
            } else {
                f < f_current
            };
            let score = if f < f_best {
                stats.new_bests += 1;
                config.scores.best
            } else if accepted && f < f_current {
                config.scores.better
            } else if accepted {
                config.scores.accepted
            } else {
                0.0
            };
            for w in [&mut bank.destroy[d], &mut bank.repair[r], &mut bank.noise[noise]] {
                w.score += score;
                w.uses += 1;
            }
            stats.destroy_uses[d] += 1;
            stats.repair_uses[r] += 1;
            stats.noise_uses[noise] += 1;

            if f < f_best {
                best = candidate.clone();
                f_best = f;
            }
            if accepted {
                current = candidate;
                f_current = f;
            }
            stats.records.push(IterationRecord {
                iteration,
                current: f_current,
                best: f_best,
                operator: format!("{}/regret-{}{}", op.name(), r + 1, if noise == 1 { "+noise" } else { "" }),
                accepted,
            });
            if iteration % config.segment_length == 0 {
                update_weights(&mut bank, config.reaction);
            }
            threshold -= step;
        }
    }
    stats.bank = bank;
    stats.wall_seconds = started.elapsed().as_secs_f64();
    (best, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn removal_count_bounds() {
        let cfg = AlnsConfig::for_variant(Variant::Mop);
        let mut rng = rng();
        for _ in 0..1000 {
            let phi = draw_removal_count(&cfg, 100, &mut rng);
            assert!((10..=40).contains(&phi));
        }
        assert_eq!(draw_removal_count(&cfg, 1, &mut rng), 1);
    }

    #[test]
    fn unused_operators_keep_weight() {
        let mut bank = OperatorBank::default();
        bank.destroy[0].weight = 2.5;
        bank.repair[1] = OperatorWeight {
            weight: 1.0,
            score: 30.0,
            uses: 3,
        };
        update_weights(&mut bank, 1.0);
        assert_eq!(bank.destroy[0].weight, 2.5);
        assert_eq!(bank.repair[1].weight, 10.0);
        assert_eq!(bank.repair[1].uses, 0);
    }

    #[test]
    fn config_overrides_merge_with_defaults() {
        let cfg = AlnsConfig::from_json(r#"{"n_max": 50, "rng_seed": 9}"#, Variant::Cp).unwrap();
        assert_eq!(cfg.n_max, 50);
        assert_eq!(cfg.t_initial, 0.175);
        assert_eq!(cfg.removal_range, (0.05, 0.50));
        assert!(AlnsConfig::from_json(r#"{"bogus": 1}"#, Variant::Cp).is_err());
        assert!(AlnsConfig::from_json(r#"{"removal_range": [0.5, 0.2]}"#, Variant::Cp).is_err());
    }

    #[test]
    fn roulette_respects_zero_mass_tail() {
        let ops = [
            OperatorWeight { weight: 1.0, ..Default::default() },
            OperatorWeight { weight: MIN_WEIGHT, ..Default::default() },
        ];
        let mut rng = rng();
        let hits = (0..10_000).filter(|_| roulette(&ops, &mut rng) == 1).count();
        assert!(hits < 100);
    }
}
