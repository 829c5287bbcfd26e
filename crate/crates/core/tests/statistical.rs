mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stoqdyn::dynamics::ProbabilityDynamics;
use stoqdyn::implementation::{family_implements, markov_family, transition_constant_family};
use stoqdyn::statistical::{
    derive_stochastic_from_ancilla, deterministic_family, is_decomposable_deterministic, realize_family_as_ancilla,
    realize_linear_as_stochastic, realize_stochastic_as_ancilla, stochastic_family, DeterministicSystem,
};
use stoqdyn::{ProbVector, TimeGrid};

fn seeded() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn deterministic_verdicts_agree(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let d = common::random_deterministic(n, tau, &mut rng);
        let table = is_decomposable_deterministic(&d).holds();
        let fam = deterministic_family(&d).unwrap();
        let members = fam.members().values().all(|mu| mu.is_markovian().unwrap().holds());
        let induced = ProbabilityDynamics::from_matrices(d.matrices());
        prop_assert_eq!(table, members);
        prop_assert_eq!(table, induced.is_decomposable().unwrap().holds());
        prop_assert_eq!(table, induced.divisibility().unwrap().is_divisible());
        prop_assert!(family_implements(&fam, &induced).unwrap());
    }

    #[test]
    fn deterministic_members_at_vertices_are_dirac(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let d = common::random_deterministic(n, tau, &mut rng);
        let fam = deterministic_family(&d).unwrap();
        for i in 0..n {
            let mu = fam.member(&ProbVector::vertex(n, i)).unwrap();
            prop_assert_eq!(mu.support().len(), 1);
            prop_assert_eq!(&mu.support()[0].0, &d.trajectory(i));
        }
    }

    #[test]
    fn ancilla_realization_reproduces_families(mut rng in seeded(), tau in 1u32..=2) {
        let fam = common::random_family(2, tau, &mut rng);
        let markov = markov_family(&ProbabilityDynamics::from_matrices(fam.clone())).unwrap();
        prop_assert!(realize_family_as_ancilla(&markov).unwrap().reproduces(&markov).unwrap());
        let constant = transition_constant_family(&fam).unwrap();
        prop_assert!(realize_family_as_ancilla(&constant).unwrap().reproduces(&constant).unwrap());
    }

    #[test]
    fn stochastic_realizations_round_trip(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=2) {
        let fam = common::random_family(n, tau, &mut rng);
        let s = realize_linear_as_stochastic(&fam).unwrap();
        prop_assert_eq!(s.matrices(), fam);
        if n == 2 {
            let (sa, lambda) = realize_stochastic_as_ancilla(&s).unwrap();
            prop_assert_eq!(derive_stochastic_from_ancilla(&sa, &lambda).unwrap(), s.clone());
            let members = stochastic_family(&s).unwrap();
            prop_assert!(realize_family_as_ancilla(&members).unwrap().reproduces(&members).unwrap());
        }
    }
}

#[test]
fn identity_system_is_decomposable() {
    let d = DeterministicSystem::from_fn(TimeGrid::contiguous(3), 3, |_, i| i).unwrap();
    assert!(is_decomposable_deterministic(&d).holds());
}
