mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stoqdyn::dynamics::ProbabilityDynamics;
use stoqdyn::implementation::markov_family;
use stoqdyn::io::{emit_schema, parse_json, to_pretty, DetSystemFile, DynamicsFile, FamilyFile, MeasureFile, UnitaryFile};
use stoqdyn::quantum::random_unitary_family;
use stoqdyn::statistical::deterministic_measure;
use stoqdyn::{Error, Scalar, TimeGrid};

fn seeded() -> impl Strategy<Value = ChaCha8Rng> {
    any::<u64>().prop_map(ChaCha8Rng::seed_from_u64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scalars_round_trip(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
        let x = Scalar::ratio(a, b) + Scalar::ratio(c, d) * Scalar::sqrt2();
        let back: Scalar = parse_json(&serde_json::to_string(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn dynamics_files_round_trip(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let fam = common::random_family(n, tau, &mut rng);
        let file = DynamicsFile::from_family(&fam);
        let parsed: DynamicsFile = parse_json(&to_pretty(&file)).unwrap();
        let back = parsed.to_dynamics().unwrap();
        prop_assert_eq!(back.matrix_family(), Some(&fam));
    }

    #[test]
    fn measure_and_family_files_round_trip(mut rng in seeded(), tau in 1u32..=2) {
        let fam = common::random_family(2, tau, &mut rng);
        let members = markov_family(&ProbabilityDynamics::from_matrices(fam)).unwrap();
        let parsed: FamilyFile = parse_json(&to_pretty(&FamilyFile::from_family(&members))).unwrap();
        let back = parsed.to_family().unwrap();
        prop_assert_eq!(back.members(), members.members());
        for mu in members.members().values() {
            let parsed: MeasureFile = parse_json(&to_pretty(&MeasureFile::from_measure(mu))).unwrap();
            prop_assert_eq!(&parsed.to_measure().unwrap(), mu);
        }
    }

    #[test]
    fn deterministic_files_round_trip(mut rng in seeded(), n in 2usize..=3, tau in 1u32..=3) {
        let d = common::random_deterministic(n, tau, &mut rng);
        let parsed: DetSystemFile = parse_json(&to_pretty(&DetSystemFile::from_system(&d))).unwrap();
        let back = parsed.to_system().unwrap();
        prop_assert_eq!(back.table(), d.table());
        let p0 = common::random_vector(n, 4, &mut rng);
        prop_assert_eq!(deterministic_measure(&back, &p0).unwrap(), deterministic_measure(&d, &p0).unwrap());
    }

    #[test]
    fn unitary_files_round_trip(mut rng in seeded(), d in 2usize..=3) {
        let u = random_unitary_family(TimeGrid::contiguous(2), d, &mut rng);
        let parsed: UnitaryFile = parse_json(&to_pretty(&UnitaryFile::from_family(&u))).unwrap();
        let back = parsed.to_family().unwrap();
        for (a, b) in back.matrices().iter().zip(u.matrices()) {
            prop_assert!((a - b).iter().all(|z| z.norm() <= 1e-12));
        }
    }
}

#[test]
fn schemas_cover_every_format() {
    for name in ["dynamics", "measure", "family", "detsystem", "ancilla", "unitary"] {
        assert!(emit_schema(name).unwrap().is_object(), "{name}");
    }
    assert!(matches!(emit_schema("bogus"), Err(Error::UnknownSchema(_))));
}

#[test]
fn garbage_is_a_parse_error() {
    assert!(matches!(parse_json::<MeasureFile>("{"), Err(Error::Parse(_))));
}
