use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stoqdyn::quantum::{
    born_standard, density_from_tomographic, interference_discrepancy, is_unitary, quantum_decomposition_check, random_state,
    random_unitary, random_unitary_family, tomographic_vector, unistochastic_of, DensityMatrix, TOLERANCE,
};
use stoqdyn::TimeGrid;

fn seeded() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_draws_are_unitary(mut rng in seeded(), d in 1usize..=4) {
        prop_assert!(is_unitary(&random_unitary(d, &mut rng)));
    }

    #[test]
    fn unistochastic_matrices_are_doubly_stochastic(mut rng in seeded(), d in 1usize..=4) {
        let p = unistochastic_of(&random_unitary(d, &mut rng)).unwrap();
        for k in 0..d {
            prop_assert!((p.row(k).sum() - 1.0).abs() <= TOLERANCE);
            prop_assert!((p.column(k).sum() - 1.0).abs() <= TOLERANCE);
        }
    }

    #[test]
    fn born_probabilities_sum_to_one(mut rng in seeded(), d in 1usize..=4) {
        let psi = random_state(d, &mut rng);
        prop_assert!((born_standard(&psi).iter().sum::<f64>() - 1.0).abs() <= TOLERANCE);
    }

    #[test]
    fn tomography_inverts(mut rng in seeded()) {
        let rho = DensityMatrix::pure(&random_state(2, &mut rng));
        let back = density_from_tomographic(&tomographic_vector(&rho).unwrap()).unwrap();
        prop_assert!((back.matrix() - rho.matrix()).iter().all(|z| z.norm() <= 1e-12));
    }

    #[test]
    fn discrepancy_equals_cross_terms(mut rng in seeded(), d in 2usize..=3) {
        let u = random_unitary_family(TimeGrid::contiguous(2), d, &mut rng);
        for (t, tp) in [(1, 0), (2, 0), (2, 1), (2, 2)] {
            let r = interference_discrepancy(&u, t, tp).unwrap();
            prop_assert!(r.identity_holds);
            prop_assert!((&r.discrepancy - &r.cross_terms).amax() <= 1e-9);
        }
    }

    #[test]
    fn born_dynamics_decompose(mut rng in seeded(), d in 2usize..=3) {
        let u = random_unitary_family(TimeGrid::contiguous(2), d, &mut rng);
        let psi = random_state(d, &mut rng);
        prop_assert!(quantum_decomposition_check(&u, &psi, 2, 1).unwrap());
    }
}

#[test]
fn reversed_times_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_unitary_family(TimeGrid::contiguous(2), 2, &mut rng);
    assert!(interference_discrepancy(&u, 1, 2).is_err());
}
