#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stoqdyn::dynamics::MatrixFamily;
use stoqdyn::statistical::DeterministicSystem;
use stoqdyn::{ProbVector, Scalar, StochasticMatrix, TimeGrid};

/// Base seed, overridable through `STOQDYN_SEED`.
pub fn seed() -> u64 {
    std::env::var("STOQDYN_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(20_240_501)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

/// A random point of the simplex with denominator in `1..=max_den`; denominator 1 gives a vertex.
pub fn random_vector<R: Rng>(n: usize, max_den: i64, rng: &mut R) -> ProbVector {
    let den = rng.gen_range(1..=max_den);
    let mut counts = vec![0i64; n];
    for _ in 0..den {
        counts[rng.gen_range(0..n)] += 1;
    }
    ProbVector::new(counts.into_iter().map(|c| Scalar::ratio(c, den)).collect()).expect("counts sum to den")
}

/// Columns are drawn from a small pool so that singular matrices are common.
pub fn random_stochastic<R: Rng>(n: usize, rng: &mut R) -> StochasticMatrix {
    let pool: Vec<ProbVector> = (0..n + 1).map(|_| random_vector(n, 4, rng)).collect();
    let cols: Vec<ProbVector> = (0..n).map(|_| pool.choose(rng).expect("non-empty").clone()).collect();
    StochasticMatrix::from_prob_columns(&cols).expect("columns are distributions")
}

pub fn random_family<R: Rng>(n: usize, tau: u32, rng: &mut R) -> MatrixFamily {
    let mut matrices = vec![StochasticMatrix::identity(n)];
    matrices.extend((0..tau).map(|_| random_stochastic(n, rng)));
    MatrixFamily::new(TimeGrid::contiguous(tau), matrices).expect("identity at 0")
}

pub fn random_deterministic<R: Rng>(n: usize, tau: u32, rng: &mut R) -> DeterministicSystem {
    let table = (0..=tau as usize).map(|pos| (0..n).map(|i| if pos == 0 { i } else { rng.gen_range(0..n) }).collect()).collect();
    DeterministicSystem::new(TimeGrid::contiguous(tau), n, table).expect("starts fixed")
}

/// Every point of the simplex whose entries have denominator at most `g`.
pub fn grid_points(n: usize, g: i64) -> Vec<ProbVector> {
    let mut out: Vec<ProbVector> = Vec::new();
    for den in 1..=g {
        let mut counts = vec![0i64; n];
        compositions(den, 0, &mut counts, &mut |c| {
            let p = ProbVector::new(c.iter().map(|&k| Scalar::ratio(k, den)).collect()).expect("composition");
            if !out.contains(&p) {
                out.push(p);
            }
        });
    }
    out
}

fn compositions(left: i64, k: usize, counts: &mut Vec<i64>, emit: &mut dyn FnMut(&[i64])) {
    if k + 1 == counts.len() {
        counts[k] = left;
        emit(counts);
        return;
    }
    for c in 0..=left {
        counts[k] = c;
        compositions(left - c, k + 1, counts, emit);
    }
}
