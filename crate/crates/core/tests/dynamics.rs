mod common;

use proptest::prelude::*;
use rand::Rng;

use stoqdyn::dynamics::{decomposable_by_points, divisibility_system, DivisibilityStatus, ProbabilityDynamics};
use stoqdyn::implementation::{
    implements, is_transition_constant, markov_implementation, non_markov_construction, transition_constant_family,
};
use stoqdyn::lp::is_farkas_certificate;
use stoqdyn::report::dynamics_report;
use stoqdyn::{ProbVector, Scalar, TimeGrid, VectorTrajectory};

fn seeded() -> impl Strategy<Value = rand_chacha::ChaCha8Rng> {
    any::<u64>().prop_map(|s| {
        use rand::SeedableRng;
        rand_chacha::ChaCha8Rng::seed_from_u64(s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn divisible_implies_decomposable(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let fam = common::random_family(n, tau, &mut rng);
        let d = ProbabilityDynamics::from_matrices(fam);
        if d.divisibility().unwrap().is_divisible() {
            prop_assert!(d.is_decomposable().unwrap().holds());
        }
    }

    #[test]
    fn divisibility_outcomes_carry_valid_evidence(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let fam = common::random_family(n, tau, &mut rng);
        let report = ProbabilityDynamics::from_matrices(fam.clone()).divisibility().unwrap();
        for pair in &report.pairs {
            let (late, early) = (fam.at(pair.t).unwrap(), fam.at(pair.t_prime).unwrap());
            match &pair.status {
                DivisibilityStatus::Divisible { factor } => prop_assert_eq!(&factor.mul(early).unwrap(), late),
                DivisibilityStatus::NotDivisible { certificate } => {
                    let (a, b) = divisibility_system(late, early);
                    prop_assert!(is_farkas_certificate(&a, &b, certificate));
                }
                DivisibilityStatus::NotApplicable => prop_assert!(false, "matrix family pair not applicable"),
            }
        }
    }

    #[test]
    fn kernel_and_pointwise_tests_agree(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=2) {
        let d = ProbabilityDynamics::from_matrices(common::random_family(n, tau, &mut rng));
        prop_assert_eq!(d.is_decomposable().unwrap().holds(), decomposable_by_points(&d, 6).unwrap().holds());
    }

    #[test]
    fn matrix_dynamics_are_linear(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=2) {
        let fam = common::random_family(n, tau, &mut rng);
        let points = common::grid_points(n, 3);
        let table = points.iter().map(|p| {
            let traj = fam.matrices().iter().map(|m| m.apply(p).unwrap()).collect();
            (p.clone(), traj)
        }).collect();
        let tabulated = ProbabilityDynamics::tabulated(TimeGrid::contiguous(tau), n, table).unwrap();
        prop_assert!(tabulated.is_linear().unwrap().holds());
    }

    #[test]
    fn markov_implementation_matches_marginals(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let points: Vec<ProbVector> = (0..=tau).map(|_| common::random_vector(n, 4, &mut rng)).collect();
        let traj = VectorTrajectory::new(TimeGrid::contiguous(tau), points).unwrap();
        let mu = markov_implementation(&traj).unwrap();
        prop_assert!(implements(&mu, &traj).unwrap());
        prop_assert!(mu.is_markovian().unwrap().holds());
        let total = mu.support().into_iter().fold(Scalar::zero(), |acc, (_, w)| acc + w);
        prop_assert!(total.is_one());
    }

    #[test]
    fn non_markov_construction_exactly_when_non_degenerate(mut rng in seeded(), n in 2usize..=3, tau in 2u32..=3) {
        let points: Vec<ProbVector> = (0..=tau).map(|_| common::random_vector(n, 3, &mut rng)).collect();
        let traj = VectorTrajectory::new(TimeGrid::contiguous(tau), points).unwrap();
        match non_markov_construction(&traj) {
            Ok(c) => {
                prop_assert!(traj.is_non_degenerate());
                prop_assert!(implements(&c.measure, &traj).unwrap());
                prop_assert!(!c.measure.is_markovian().unwrap().holds());
            }
            Err(_) => prop_assert!(!traj.is_non_degenerate()),
        }
    }

    #[test]
    fn transition_constant_members_share_matrices(mut rng in seeded(), tau in 1u32..=2) {
        let n = rng.gen_range(2..=3);
        let fam = common::random_family(n, tau, &mut rng);
        let members = transition_constant_family(&fam).unwrap();
        prop_assert_eq!(is_transition_constant(&members).unwrap().common_family(fam.grid()), Some(fam));
    }

    #[test]
    fn reports_are_deterministic(mut rng in seeded()) {
        let d = ProbabilityDynamics::from_matrices(common::random_family(2, 2, &mut rng));
        prop_assert_eq!(dynamics_report(&d).unwrap().to_string(), dynamics_report(&d).unwrap().to_string());
    }
}
