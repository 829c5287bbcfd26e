//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;

use stoqdyn::dynamics::{
    decomposable_by_kernel, decomposing_map_matrix, DecompositionMatrix, LinearityVerdict, MatrixFamily, ProbabilityDynamics,
};
use stoqdyn::fixtures::{
    biased_coin_ensemble, coin_dynamics, flip_process_family, nondivisible_family, rotation_family, rotation_unitaries,
    two_valued_ancilla, two_valued_stochastic,
};
use stoqdyn::implementation::{
    implements, is_transition_constant, markov_family, markov_implementation, non_markov_implementation,
    transition_constant_family, ProcessFamily, TransitionConstancy,
};
use stoqdyn::quantum::{
    interference_discrepancy, quantum_decomposition_check, quantum_linearity_violation, random_state, random_unitary_family,
    tomographic_vector, DensityMatrix, PureState, UnitaryFamily,
};
use stoqdyn::scalar::q;
use stoqdyn::statistical::{
    ancilla_transition_matrices, derive_stochastic_from_ancilla, deterministic_family, is_decomposable_deterministic,
    realize_family_as_ancilla, realize_linear_as_stochastic, realize_stochastic_as_ancilla, stochastic_family,
};
use stoqdyn::{Error, EventSpec, Matrix, ProbVector, Scalar, TimeGrid, TrajectoryMeasure, VectorTrajectory};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn lib<T>(r: stoqdyn::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(limit: Duration, start: Instant) -> Outcome {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn nondivisible_example() -> Outcome {
    let start = Instant::now();
    let fam = nondivisible_family();
    let dynamics = ProbabilityDynamics::from_matrices(fam.clone());
    ensure(lib(dynamics.is_decomposable())?.holds(), || "not decomposable".into())?;
    ensure(!lib(dynamics.divisibility())?.is_divisible(), || "divisible".into())?;
    let expected = lib(Matrix::from_ratio_rows(&[&[(1, 2), (3, 2)], &[(1, 2), (-1, 2)]]))?;
    match lib(decomposing_map_matrix(&fam, 2, 1))? {
        DecompositionMatrix::Matrix(m) => ensure(m == expected, || format!("candidate {m:?}"))?,
        DecompositionMatrix::NoMatrixForm(_) => return Err("no matrix form".into()),
    }
    within(Duration::from_secs(1), start)
}

fn rotation_example() -> Outcome {
    let start = Instant::now();
    let fam = rotation_family();
    let swap = lib(Matrix::from_ratio_rows(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]))?;
    match lib(decomposing_map_matrix(&fam, 2, 1))? {
        DecompositionMatrix::Matrix(m) => ensure(m == swap, || format!("P(2)P(1)^-1 = {m:?}"))?,
        DecompositionMatrix::NoMatrixForm(_) => return Err("no matrix form".into()),
    }
    ensure(lib(ProbabilityDynamics::from_matrices(fam).divisibility())?.is_divisible(), || "not divisible".into())?;

    let u = rotation_unitaries();
    let d = lib(interference_discrepancy(&u, 2, 1))?;
    ensure(d.relative_square.iter().all(|x| (x - 0.5).abs() <= 1e-9), || format!("SH square {}", d.relative_square))?;
    let d11 = (PI / 8.0).sin().powi(2) - 0.5;
    ensure((d.discrepancy[(0, 0)] - d11).abs() <= 1e-9, || format!("D11 = {}", d.discrepancy[(0, 0)]))?;

    // Recompute both sides from the unitaries alone.
    let u1 = lib(u.at(1))?.clone();
    let u2 = lib(u.at(2))?.clone();
    let r = &u2 * u1.adjoint();
    let sq = |m: &DMatrix<Complex64>| m.map(|z| z.norm_sqr());
    let lhs = sq(&u2) - sq(&r) * sq(&u1);
    let mut cross = DMatrix::<f64>::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..2 {
                for l in 0..2 {
                    if k != l {
                        s += (r[(i, k)] * u1[(k, j)]).conj() * r[(i, l)] * u1[(l, j)];
                    }
                }
            }
            cross[(i, j)] = s.re;
        }
    }
    ensure((&lhs - &cross).amax() <= 1e-9, || format!("discrepancy {lhs} vs cross terms {cross}"))?;
    ensure((&lhs - &d.discrepancy).amax() <= 1e-9, || "library discrepancy differs".into())?;
    ensure((&cross - &d.cross_terms).amax() <= 1e-9, || "library cross terms differ".into())?;
    within(Duration::from_secs(1), start)
}

fn intro_nonlinearity() -> Outcome {
    match lib(coin_dynamics(true).is_linear())? {
        LinearityVerdict::NotLinear(w) => {
            ensure(w.t == 1, || format!("witness time {}", w.t))?;
            ensure(w.point == ProbVector::uniform(2), || "witness point".into())?;
            ensure(w.lhs == lib(ProbVector::from_ratios(&[(1, 4), (3, 4)]))?, || format!("lhs {:?}", w.lhs))?;
            ensure(w.rhs == ProbVector::uniform(2), || format!("rhs {:?}", w.rhs))?;
        }
        LinearityVerdict::Linear { .. } => return Err("f(r) = r^2 judged linear".into()),
    }
    ensure(lib(coin_dynamics(false).is_linear())?.holds(), || "f(r) = r judged nonlinear".into())
}

fn constructor_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(4);
    let (mut nondegenerate, mut degenerate) = (0, 0);
    for k in 0..200 {
        let n = 2 + k % 2;
        let tau = 1 + (k / 2) as u32 % 4;
        let points: Vec<ProbVector> = (0..=tau).map(|_| common::random_vector(n, 4, &mut rng)).collect();
        let traj = lib(VectorTrajectory::new(TimeGrid::contiguous(tau), points))?;
        let mu = lib(markov_implementation(&traj))?;
        ensure(lib(implements(&mu, &traj))? && lib(mu.is_markovian())?.holds(), || format!("markov implementation #{k}"))?;
        match non_markov_implementation(&traj) {
            Ok(nu) => {
                ensure(traj.is_non_degenerate(), || format!("#{k}: degenerate trajectory accepted"))?;
                ensure(lib(implements(&nu, &traj))?, || format!("#{k}: does not implement"))?;
                ensure(!lib(nu.is_markovian())?.holds(), || format!("#{k}: Markovian"))?;
                nondegenerate += 1;
            }
            Err(Error::DegenerateTrajectory) => {
                ensure(!traj.is_non_degenerate(), || format!("#{k}: non-degenerate trajectory rejected"))?;
                degenerate += 1;
            }
            Err(e) => return Err(format!("#{k}: {e}")),
        }
    }
    ensure(nondegenerate > 0 && degenerate > 0, || format!("coverage {nondegenerate}/{degenerate}"))?;
    within(Duration::from_secs(30), start)
}

fn transition_constant_round_trip() -> Outcome {
    let mut rng = common::rng(5);
    for k in 0..100 {
        let fam = common::random_family(2 + k % 2, 1 + (k / 2) as u32 % 3, &mut rng);
        let members = lib(transition_constant_family(&fam))?;
        match lib(is_transition_constant(&members))? {
            TransitionConstancy::Constant { .. } => {}
            other => return Err(format!("#{k}: {other:?}")),
        }
        let common = lib(is_transition_constant(&members))?.common_family(fam.grid());
        ensure(common.as_ref() == Some(&fam), || format!("#{k}: common M(t) differs from P(t)"))?;
        ensure(lib(lib(members.induced_dynamics())?.is_linear())?.holds(), || format!("#{k}: induced dynamics not linear"))?;
    }
    Ok(())
}

fn two_valued_end_to_end() -> Outcome {
    let sa = two_valued_ancilla();
    let lambda = ProbVector::uniform(2);
    let p = nondivisible_family();
    ensure(lib(ancilla_transition_matrices(&sa, &lambda))? == p, || "M^SA != P".into())?;
    let s = lib(derive_stochastic_from_ancilla(&sa, &lambda))?;
    ensure(s.matrices() == p, || "M^S != P".into())?;
    let fam = lib(stochastic_family(&s))?;
    let induced = lib(fam.induced_dynamics())?;
    ensure(lib(induced.is_decomposable())?.holds(), || "induced not decomposable".into())?;
    ensure(!lib(induced.divisibility())?.is_divisible(), || "induced divisible".into())?;
    let (e11, e12) = (EventSpec::at(1, 0).and(0, 0), EventSpec::at(1, 0).and(0, 1));
    for (p0, mu) in fam.members().iter().filter(|(p, _)| !p.is_vertex()) {
        ensure(!lib(mu.is_markovian())?.holds(), || format!("Markovian at {p0:?}"))?;
        ensure(lib(mu.conditional(&EventSpec::at(2, 0), &e11))? == Some(q(1, 2)), || format!("first conditional at {p0:?}"))?;
        ensure(lib(mu.conditional(&EventSpec::at(2, 0), &e12))? == Some(Scalar::one()), || {
            format!("second conditional at {p0:?}")
        })?;
    }
    Ok(())
}

fn deterministic_equivalence() -> Outcome {
    let mut rng = common::rng(7);
    let mut both = [0usize; 2];
    for k in 0..100 {
        let d = common::random_deterministic(2 + k % 2, 1 + (k / 2) as u32 % 3, &mut rng);
        let by_table = is_decomposable_deterministic(&d).holds();
        let fam = lib(deterministic_family(&d))?;
        let mut all_markov = true;
        for mu in fam.members().values() {
            all_markov &= lib(mu.is_markovian())?.holds();
        }
        let induced = ProbabilityDynamics::from_matrices(d.matrices());
        let by_dynamics = lib(induced.is_decomposable())?.holds();
        let divisible = lib(induced.divisibility())?.is_divisible();
        ensure(by_table == all_markov && all_markov == by_dynamics, || {
            format!("#{k}: table {by_table}, members {all_markov}, dynamics {by_dynamics}")
        })?;
        ensure(by_dynamics == divisible, || format!("#{k}: decomposable {by_dynamics}, divisible {divisible}"))?;
        both[by_table as usize] += 1;
    }
    ensure(both[0] > 0 && both[1] > 0, || format!("coverage {both:?}"))
}

fn realization_round_trips() -> Outcome {
    let families: Vec<(&str, ProcessFamily)> = vec![
        ("intro", lib(markov_family(&coin_dynamics(true)))?),
        ("flip", lib(flip_process_family())?),
        ("nondivisible", lib(transition_constant_family(&nondivisible_family()))?),
        ("rotation", lib(transition_constant_family(&rotation_family()))?),
        ("two-valued", lib(stochastic_family(&two_valued_stochastic()))?),
        ("mixing", lib(deterministic_family(&biased_coin_ensemble()))?),
    ];
    for (name, fam) in &families {
        let realization = lib(realize_family_as_ancilla(fam))?;
        let rebuilt = lib(realization.reconstruct())?;
        let same = rebuilt.len() == fam.members().len() && rebuilt.iter().all(|(p0, mu)| fam.members().get(p0) == Some(mu));
        ensure(same, || format!("{name}: ancilla reconstruction differs"))?;
    }
    let matrices: [(&str, MatrixFamily); 2] = [("nondivisible", nondivisible_family()), ("rotation", rotation_family())];
    for (name, p) in &matrices {
        let s = lib(realize_linear_as_stochastic(p))?;
        ensure(s.matrices() == *p, || format!("{name}: stochastic realization changes P"))?;
    }

    // μ_i = Σ_α λ_α δ_{trajectory(i, α)} on the worked stochastic system.
    let s = two_valued_stochastic();
    let (sa, lambda) = lib(realize_stochastic_as_ancilla(&s))?;
    for (i, mu) in s.processes().iter().enumerate() {
        let diracs: Vec<TrajectoryMeasure> = (0..sa.m())
            .map(|a| TrajectoryMeasure::dirac(sa.grid().clone(), 2, &sa.trajectory(i, a)))
            .collect::<stoqdyn::Result<_>>()
            .map_err(|e| e.to_string())?;
        let parts: Vec<(Scalar, &TrajectoryMeasure)> =
            diracs.iter().enumerate().map(|(a, m)| (lambda.get(a).clone(), m)).collect();
        ensure(lib(TrajectoryMeasure::mixture(&parts))? == *mu, || format!("property (i) fails for i = {}", i + 1))?;
    }
    ensure(lib(derive_stochastic_from_ancilla(&sa, &lambda))? == s, || "derived system differs".into())
}

fn kernel_oracle() -> Outcome {
    let mut rng = common::rng(9);
    let grids = [common::grid_points(2, 6), common::grid_points(3, 6)];
    let mut verdicts = [0usize; 2];
    for k in 0..500 {
        let n = 2 + k % 2;
        let fam = common::random_family(n, 1 + (k / 2) as u32 % 3, &mut rng);
        let kernel = lib(decomposable_by_kernel(&fam))?.holds();
        let points = &grids[n - 2];
        let mut brute = true;
        'pairs: for (a, &t) in fam.grid().times().iter().enumerate() {
            for &tp in &fam.grid().times()[..=a] {
                let (pt, ptp) = (lib(fam.at(t))?, lib(fam.at(tp))?);
                let images: Vec<(ProbVector, ProbVector)> = points
                    .iter()
                    .map(|p| Ok((ptp.apply(p)?, pt.apply(p)?)))
                    .collect::<stoqdyn::Result<_>>()
                    .map_err(|e| e.to_string())?;
                for (x, (a1, b1)) in images.iter().enumerate() {
                    for (a2, b2) in &images[x + 1..] {
                        if a1 == a2 && b1 != b2 {
                            brute = false;
                            break 'pairs;
                        }
                    }
                }
            }
        }
        ensure(kernel == brute, || format!("#{k}: kernel {kernel}, grid {brute}"))?;
        verdicts[kernel as usize] += 1;
    }
    ensure(verdicts[0] > 0 && verdicts[1] > 0, || format!("coverage {verdicts:?}"))
}

fn quantum_suite() -> Outcome {
    let one = PureState::basis(2, 0);
    let two = PureState::basis(2, 1);
    let psi = PureState::plus();
    let cases =
        [(&one, [1.0, 0.0, 0.5, 0.5, 0.5, 0.5]), (&two, [0.0, 1.0, 0.5, 0.5, 0.5, 0.5]), (&psi, [0.5, 0.5, 1.0, 0.0, 0.5, 0.5])];
    for (state, expected) in cases {
        let v = lib(tomographic_vector(&DensityMatrix::pure(state)))?;
        let gap = v.entries().iter().zip(expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        ensure(gap <= 1e-12, || format!("tomographic vector {:?} vs {expected:?}", v.entries()))?;
    }
    let u = lib(UnitaryFamily::rotations(&[PI / 4.0]))?;
    let v = lib(quantum_linearity_violation(&u, 0.5, &one, &two, &psi))?;
    ensure((v[1].magnitude - 0.5).abs() <= 1e-9, || format!("violation {}", v[1].magnitude))?;

    let mut rng = common::rng(10);
    for k in 0..100 {
        let d = 2 + k % 2;
        let tau = 1 + (k / 2) as u32 % 3;
        let u = random_unitary_family(TimeGrid::contiguous(tau), d, &mut rng);
        let psi = random_state(d, &mut rng);
        for t in 0..=tau {
            for tp in 0..=t {
                ensure(lib(quantum_decomposition_check(&u, &psi, t, tp))?, || format!("family #{k} at ({t}, {tp})"))?;
            }
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 nondivisible example", nondivisible_example),
        ("2 rotation example", rotation_example),
        ("3 coin nonlinearity", intro_nonlinearity),
        ("4 Markov and non-Markov constructors", constructor_suite),
        ("5 transition-constant round trip", transition_constant_round_trip),
        ("6 two-valued ancilla example", two_valued_end_to_end),
        ("7 deterministic decomposability equivalence", deterministic_equivalence),
        ("8 realization round trips", realization_round_trips),
        ("9 kernel test against grid oracle", kernel_oracle),
        ("10 quantum suite", quantum_suite),
    ];
    println!("acceptance (seed {})", common::seed());
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS  {name}  ({:.2?})", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
