mod common;

use common::enumerators::time_route;
use common::{random_instance, Shape};
use mopvrp_core::delay_profile::{build_profile, ProfileError};
use mopvrp_core::model::Instance;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn random_route(rng: &mut ChaCha8Rng) -> (Instance, Vec<usize>) {
    let n = rng.random_range(1..=10);
    let mut shape = Shape::new(n, 1, 1);
    shape.horizon = rng.random_range(0.0..200.0);
    shape.integer = rng.random_bool(0.3);
    let inst = random_instance(rng, shape);
    let mut route: Vec<usize> = (1..=n).collect();
    route.shuffle(rng);
    route.truncate(rng.random_range(1..=n));
    (inst, route)
}

#[test]
fn queries_equal_route_retiming() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (inst, route) = random_route(&mut rng);
        let profile = build_profile(&inst, &route);
        let (_, delay0, _) = time_route(&inst, &route, 0.0, |_| f64::NEG_INFINITY);
        assert!((profile.base_value() - delay0).abs() <= TOL);
        let cap = if profile.max_departure() > 0.0 { profile.max_departure() } else { 300.0 };
        for _ in 0..50 {
            let psi = rng.random_range(0.0..=cap);
            let (_, delay, ret) = time_route(&inst, &route, psi, |_| f64::NEG_INFINITY);
            assert!((profile.delay_at(psi) - delay).abs() <= TOL, "{psi}");
            assert!((profile.return_at(psi) - ret).abs() <= TOL);
            if psi <= profile.max_departure() {
                assert!((profile.query(psi).unwrap() - delay).abs() <= TOL);
                assert!(ret <= inst.max_duration + TOL);
            }
        }
    }
}

#[test]
fn max_departure_is_the_latest_feasible_departure() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    for _ in 0..1000 {
        let (inst, route) = random_route(&mut rng);
        let profile = build_profile(&inst, &route);
        let md = profile.max_departure();
        if md < 0.0 {
            let (_, _, ret) = time_route(&inst, &route, 0.0, |_| f64::NEG_INFINITY);
            assert!(ret > inst.max_duration);
            continue;
        }
        let (_, _, at) = time_route(&inst, &route, md, |_| f64::NEG_INFINITY);
        let (_, _, past) = time_route(&inst, &route, md + 1e-6, |_| f64::NEG_INFINITY);
        assert!(at <= inst.max_duration + TOL);
        assert!(past > inst.max_duration);
        assert!(matches!(profile.query(md + 1e-3), Err(ProfileError::InfeasibleDeparture { .. })));
        checked += 1;
    }
    assert!(checked > 100);
}

#[test]
fn profile_is_monotone_over_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let profiles: Vec<_> = (0..100)
        .map(|_| {
            let (inst, route) = random_route(&mut rng);
            build_profile(&inst, &route)
        })
        .collect();
    for _ in 0..100_000 {
        let p = &profiles[rng.random_range(0..profiles.len())];
        let a = rng.random_range(0.0..400.0);
        let b = rng.random_range(0.0..400.0);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        assert!(p.delay_at(lo) <= p.delay_at(hi) + TOL);
    }
}

#[test]
fn slopes_are_nondecreasing_and_finite_differences_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..500 {
        let (inst, route) = random_route(&mut rng);
        let p = build_profile(&inst, &route);
        assert!(p.slopes().windows(2).all(|w| w[0] <= w[1]));
        assert!(p.breakpoints().windows(2).all(|w| w[0] < w[1]));
        let h = 0.5;
        let mut last = f64::NEG_INFINITY;
        let mut psi = 0.0;
        while psi < 300.0 {
            let slope = (p.delay_at(psi + h) - p.delay_at(psi)) / h;
            assert!(slope >= last - 1e-6);
            last = slope;
            psi += h;
        }
    }
}

#[test]
fn repeated_queries_match_a_fresh_build() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..100 {
        let (inst, route) = random_route(&mut rng);
        let p = build_profile(&inst, &route);
        let psis: Vec<f64> = (0..200).map(|_| rng.random_range(0.0..300.0)).collect();
        let first: Vec<f64> = psis.iter().map(|&x| p.delay_at(x)).collect();
        for _ in 0..3 {
            let again: Vec<f64> = psis.iter().map(|&x| p.delay_at(x)).collect();
            assert_eq!(again, first);
        }
        let fresh = build_profile(&inst, &route);
        assert_eq!(fresh, p);
        let rebuilt: Vec<f64> = psis.iter().map(|&x| fresh.delay_at(x)).collect();
        assert_eq!(rebuilt, first);
    }
}

proptest! {
    #[test]
    fn negative_departures_are_rejected(seed in any::<u64>(), psi in -1000.0..-1e-6f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inst, route) = random_route(&mut rng);
        let p = build_profile(&inst, &route);
        prop_assert!(matches!(p.query(psi), Err(ProfileError::NegativeDeparture(_))));
    }

    #[test]
    fn base_value_is_the_query_at_zero(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inst, route) = random_route(&mut rng);
        let p = build_profile(&inst, &route);
        prop_assert_eq!(p.delay_at(0.0), p.base_value());
    }
}
