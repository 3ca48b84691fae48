use edge_embed::splitter::{bisection_oracle, optimal_split, SplitProblem};
use proptest::collection::vec;
use proptest::prelude::*;

/// Seconds per bit, log-uniform over [1e-9, 10].
fn coefficient() -> impl Strategy<Value = f64> {
    (-9.0f64..=1.0).prop_map(|e| 10f64.powf(e))
}

fn problem() -> impl Strategy<Value = SplitProblem> {
    (vec(coefficient(), 1..=50), 1.0f64..=1e8).prop_map(|(a, s)| SplitProblem::new(a, s).unwrap())
}

fn branch_times(p: &SplitProblem, z: &[f64]) -> Vec<f64> {
    p.coefficients().iter().zip(z).map(|(a, z)| a * z).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_matches_bisection(p in problem()) {
        let tau = optimal_split(&p).bottleneck_time;
        let oracle = bisection_oracle(&p, tau * f64::EPSILON);
        prop_assert!((tau - oracle).abs() <= 1e-9 * tau, "{} vs {}", tau, oracle);
    }

    #[test]
    fn allocations_cover_the_stream(p in problem()) {
        let sol = optimal_split(&p);
        let total: f64 = sol.allocations.iter().sum();
        prop_assert!((total - p.stream_size()).abs() <= 1e-9 * p.stream_size());
        prop_assert!(sol.allocations.iter().all(|&z| z > 0.0));
    }

    #[test]
    fn branches_finish_together(p in problem()) {
        let sol = optimal_split(&p);
        let times = branch_times(&p, &sol.allocations);
        let hi = times.iter().copied().fold(f64::MIN, f64::max);
        let lo = times.iter().copied().fold(f64::MAX, f64::min);
        prop_assert!(hi - lo <= 1e-9 * sol.bottleneck_time);
    }

    #[test]
    fn never_worse_than_best_single_path(p in problem()) {
        let tau = optimal_split(&p).bottleneck_time;
        let best = p.coefficients().iter().map(|a| a * p.stream_size()).fold(f64::INFINITY, f64::min);
        prop_assert!(tau <= best * (1.0 + 1e-12));
        if p.coefficients().len() >= 2 {
            prop_assert!(tau < best);
        }
    }

    #[test]
    fn another_path_always_helps(p in problem(), extra in coefficient()) {
        let mut more = p.coefficients().to_vec();
        more.push(extra);
        let bigger = SplitProblem::new(more, p.stream_size()).unwrap();
        prop_assert!(optimal_split(&bigger).bottleneck_time < optimal_split(&p).bottleneck_time);
    }

    #[test]
    fn scaling_the_stream_scales_the_solution(p in problem(), lambda in 1e-3f64..1e3, shift in -8i32..8) {
        let base = optimal_split(&p);
        let scaled = optimal_split(&SplitProblem::new(p.coefficients().to_vec(), p.stream_size() * lambda).unwrap());
        prop_assert!((scaled.bottleneck_time - lambda * base.bottleneck_time).abs() <= 1e-12 * scaled.bottleneck_time);
        for (z, w) in base.allocations.iter().zip(&scaled.allocations) {
            prop_assert!((w - lambda * z).abs() <= 1e-12 * w);
        }
        // powers of two scale without rounding
        let two = 2f64.powi(shift);
        let exact = optimal_split(&SplitProblem::new(p.coefficients().to_vec(), p.stream_size() * two).unwrap());
        prop_assert_eq!(exact.bottleneck_time, two * base.bottleneck_time);
        for (z, w) in base.allocations.iter().zip(&exact.allocations) {
            prop_assert_eq!(*w, two * z);
        }
    }
}
