//! Canonical stochastic processes on a finite time grid.
//!
//! A [`TrajectoryMeasure`] stores one exact weight per trajectory
//! `ω ∈ C^{|T|}`. Trajectories are indexed base-`n`, big-endian over grid
//! positions, so position 0 (time 0) is the most significant digit.
//! Configurations are 0-based throughout the API.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::{PartialStochasticMatrix, ProbVector};

pub type Time = u32;

/// Largest dense table accepted.
pub const MAX_TABLE_ENTRIES: usize = 1 << 21;
/// Largest configuration count accepted by any trajectory enumeration.
pub const MAX_CONFIGS: usize = 8;
/// Exhaustive Markov checks are limited to `N <= 4` and `|T| <= 7`.
pub const MARKOV_MAX_CONFIGS: usize = 4;
pub const MARKOV_MAX_POSITIONS: usize = 7;

/// Strictly increasing times starting at 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimeGrid(Vec<Time>);

impl TimeGrid {
    pub fn new(times: Vec<Time>) -> Result<Self> {
        if times.first() != Some(&0) {
            return Err(Error::Schema("time grid must start at 0".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Schema("time grid must be strictly increasing".into()));
        }
        Ok(TimeGrid(times))
    }

    /// `{0, 1, …, tau}`.
    pub fn contiguous(tau: Time) -> Self {
        TimeGrid((0..=tau).collect())
    }

    pub fn times(&self) -> &[Time] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Time {
        *self.0.last().expect("grid contains 0")
    }

    pub fn position(&self, t: Time) -> Option<usize> {
        self.0.binary_search(&t).ok()
    }

    pub fn require(&self, t: Time) -> Result<usize> {
        self.position(t).ok_or(Error::InvalidTime(t))
    }

    pub fn contains(&self, t: Time) -> bool {
        self.position(t).is_some()
    }

    /// First pair `t' <= t` whose difference is missing from the grid.
    pub fn difference_gap(&self) -> Option<(Time, Time)> {
        for (a, &tp) in self.0.iter().enumerate() {
            for &t in &self.0[a..] {
                if !self.contains(t - tp) {
                    return Some((t, tp));
                }
            }
        }
        None
    }

    /// Ordered pairs `(t, t')` with `t' <= t`, by `t'` and then `t`.
    pub fn ordered_pairs(&self) -> Vec<(Time, Time)> {
        let mut out = Vec::new();
        for (a, &tp) in self.0.iter().enumerate() {
            for &t in &self.0[a..] {
                out.push((t, tp));
            }
        }
        out
    }
}

/// Number of trajectories, or `CapExceeded` when above the dense cap.
pub fn table_size(n: usize, positions: usize) -> Result<usize> {
    if n == 0 || n > MAX_CONFIGS {
        return Err(Error::CapExceeded { what: "configurations", size: n as u128, cap: MAX_CONFIGS as u128 });
    }
    let size = (n as u128).pow(positions as u32);
    if size > MAX_TABLE_ENTRIES as u128 {
        return Err(Error::CapExceeded { what: "trajectory table", size, cap: MAX_TABLE_ENTRIES as u128 });
    }
    Ok(size as usize)
}

fn decode(mut index: usize, n: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// Table index of `traj` among `n^len` trajectories.
pub fn trajectory_index(n: usize, len: usize, traj: &[usize]) -> Result<usize> {
    check_trajectory(traj, n, len)?;
    Ok(encode(traj, n))
}

fn encode(traj: &[usize], n: usize) -> usize {
    traj.iter().fold(0, |acc, &c| acc * n + c)
}

/// Iterates all assignments of `len` digits base `n` in lexicographic order.
pub fn assignments(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |k| decode(k, n, len))
}

/// Exact probability measure on `C^{|T|}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrajectoryMeasure {
    grid: TimeGrid,
    n: usize,
    table: Vec<Scalar>,
}

impl TrajectoryMeasure {
    /// Dense table in trajectory-index order.
    pub fn from_dense(grid: TimeGrid, n: usize, table: Vec<Scalar>) -> Result<Self> {
        let size = table_size(n, grid.len())?;
        if table.len() != size {
            return Err(Error::DimensionMismatch { expected: size, found: table.len() });
        }
        for (index, w) in table.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::OutOfRange { index, value: w.to_string() });
            }
        }
        let sum: Scalar = table.iter().sum();
        if !sum.is_one() {
            return Err(Error::NotNormalized { sum: sum.to_string() });
        }
        Ok(TrajectoryMeasure { grid, n, table })
    }

    /// Sparse construction; missing trajectories weigh 0 and repeats add up.
    pub fn from_entries<I>(grid: TimeGrid, n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        let size = table_size(n, grid.len())?;
        let mut table = vec![Scalar::zero(); size];
        for (traj, w) in entries {
            check_trajectory(&traj, n, grid.len())?;
            table[encode(&traj, n)] += w;
        }
        TrajectoryMeasure::from_dense(grid, n, table)
    }

    /// Weight of each trajectory given by `f`.
    pub fn from_fn(grid: TimeGrid, n: usize, f: impl Fn(&[usize]) -> Scalar) -> Result<Self> {
        let size = table_size(n, grid.len())?;
        let len = grid.len();
        let table = (0..size).map(|k| f(&decode(k, n, len))).collect();
        TrajectoryMeasure::from_dense(grid, n, table)
    }

    /// Point mass on one trajectory.
    pub fn dirac(grid: TimeGrid, n: usize, traj: &[usize]) -> Result<Self> {
        TrajectoryMeasure::from_entries(grid, n, [(traj.to_vec(), Scalar::one())])
    }

    /// `Σ w_k μ_k` over measures sharing grid and `n`.
    pub fn mixture(parts: &[(Scalar, &TrajectoryMeasure)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::BadWeights);
        };
        let mut table = vec![Scalar::zero(); first.table.len()];
        for (w, mu) in parts {
            if mu.grid != first.grid || mu.n != first.n {
                return Err(Error::GridMismatch("mixture components differ in grid or n".into()));
            }
            if w.is_negative() {
                return Err(Error::BadWeights);
            }
            if w.is_zero() {
                continue;
            }
            for (acc, x) in table.iter_mut().zip(&mu.table) {
                if !x.is_zero() {
                    *acc += w * x;
                }
            }
        }
        TrajectoryMeasure::from_dense(first.grid.clone(), first.n, table)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_configs(&self) -> usize {
        self.n
    }

    pub fn dense(&self) -> &[Scalar] {
        &self.table
    }

    pub fn weight(&self, traj: &[usize]) -> Result<&Scalar> {
        check_trajectory(traj, self.n, self.grid.len())?;
        Ok(&self.table[encode(traj, self.n)])
    }

    /// Table index of a trajectory.
    pub fn index_of(&self, traj: &[usize]) -> Result<usize> {
        trajectory_index(self.n, self.grid.len(), traj)
    }

    pub fn trajectory_at(&self, index: usize) -> Vec<usize> {
        decode(index, self.n, self.grid.len())
    }

    /// Trajectories with nonzero weight, in index order.
    pub fn support(&self) -> Vec<(Vec<usize>, Scalar)> {
        self.table.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(|(k, w)| (self.trajectory_at(k), w.clone())).collect()
    }

    /// Joint table over the given grid positions, big-endian in their order.
    pub fn marginal_table(&self, positions: &[usize]) -> Vec<Scalar> {
        let len = self.grid.len();
        let mut out = vec![Scalar::zero(); self.n.pow(positions.len() as u32)];
        let strides: Vec<usize> = positions.iter().map(|&p| self.n.pow((len - 1 - p) as u32)).collect();
        for (k, w) in self.table.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let idx = strides.iter().fold(0, |acc, &s| acc * self.n + (k / s) % self.n);
            out[idx] += w;
        }
        out
    }

    fn resolve(&self, e: &EventSpec) -> Result<Option<Vec<(usize, usize)>>> {
        let mut by_pos: BTreeMap<usize, usize> = BTreeMap::new();
        let mut contradictory = false;
        for &(t, c) in &e.constraints {
            let pos = self.grid.position(t).ok_or_else(|| Error::InvalidEvent(format!("time {t} not on grid")))?;
            if c >= self.n {
                return Err(Error::InvalidEvent(format!("configuration {} outside 1..={}", c + 1, self.n)));
            }
            if let Some(&prev) = by_pos.get(&pos) {
                contradictory |= prev != c;
            }
            by_pos.insert(pos, c);
        }
        Ok(if contradictory { None } else { Some(by_pos.into_iter().collect()) })
    }

    /// Probability of a conjunction of events; the empty event has probability 1.
    pub fn joint_probability(&self, e: &EventSpec) -> Result<Scalar> {
        let Some(cons) = self.resolve(e)? else {
            return Ok(Scalar::zero());
        };
        if cons.is_empty() {
            return Ok(Scalar::one());
        }
        let positions: Vec<usize> = cons.iter().map(|c| c.0).collect();
        let configs: Vec<usize> = cons.iter().map(|c| c.1).collect();
        let table = self.marginal_table(&positions);
        Ok(table[encode(&configs, self.n)].clone())
    }

    /// One-time marginal `(μ(E_1(t)), …, μ(E_N(t)))`.
    pub fn marginal_vector(&self, t: Time) -> Result<ProbVector> {
        let pos = self.grid.require(t)?;
        ProbVector::new(self.marginal_table(&[pos]))
    }

    /// All one-time marginals in grid order.
    pub fn marginal_trajectory(&self) -> VectorTrajectory {
        let points = (0..self.grid.len()).map(|p| ProbVector::new(self.marginal_table(&[p])).expect("marginal")).collect();
        VectorTrajectory { grid: self.grid.clone(), n: self.n, points }
    }

    /// `μ(target | given)`, `None` when the condition has probability 0.
    pub fn conditional(&self, target: &EventSpec, given: &EventSpec) -> Result<Option<Scalar>> {
        self.resolve(target)?;
        let denom = self.joint_probability(given)?;
        if denom.is_zero() {
            return Ok(None);
        }
        let both = EventSpec { constraints: given.constraints.iter().chain(&target.constraints).copied().collect() };
        Ok(Some(self.joint_probability(&both)? / denom))
    }

    /// `M(t←t')_{ij} = μ(E_i(t) | E_j(t'))`.
    pub fn transition_matrix(&self, t: Time, t_prime: Time) -> Result<PartialStochasticMatrix> {
        let pt = self.grid.require(t)?;
        let pp = self.grid.require(t_prime)?;
        let n = self.n;
        let pair = self.marginal_table(&[pp, pt]);
        let mut entries = vec![None; n * n];
        for j in 0..n {
            let denom: Scalar = pair[j * n..(j + 1) * n].iter().sum();
            if denom.is_zero() {
                continue;
            }
            for i in 0..n {
                entries[i * n + j] = Some(&pair[j * n + i] / &denom);
            }
        }
        PartialStochasticMatrix::new(n, entries)
    }

    /// Exhaustive check of the Markov property over every increasing chain of
    /// at least three grid times.
    pub fn is_markovian(&self) -> Result<MarkovVerdict> {
        let n = self.n;
        let len = self.grid.len();
        if n > MARKOV_MAX_CONFIGS {
            return Err(Error::CapExceeded {
                what: "configurations for Markov check",
                size: n as u128,
                cap: MARKOV_MAX_CONFIGS as u128,
            });
        }
        if len > MARKOV_MAX_POSITIONS {
            return Err(Error::CapExceeded {
                what: "grid times for Markov check",
                size: len as u128,
                cap: MARKOV_MAX_POSITIONS as u128,
            });
        }
        for k in 3..=len {
            for subset in combinations(len, k) {
                let joint = self.marginal_table(&subset);
                let history_len = k - 1;
                // history[h] = μ(history h), summing out the final time.
                let history: Vec<Scalar> =
                    (0..n.pow(history_len as u32)).map(|h| joint[h * n..(h + 1) * n].iter().sum()).collect();
                let pair = self.marginal_table(&subset[k - 2..]);
                let single: Vec<Scalar> = (0..n).map(|a| pair[a * n..(a + 1) * n].iter().sum()).collect();
                for h in 0..history.len() {
                    if history[h].is_zero() {
                        continue;
                    }
                    let last = h % n;
                    if single[last].is_zero() {
                        continue;
                    }
                    for x in 0..n {
                        let full = &joint[h * n + x] / &history[h];
                        let one_step = &pair[last * n + x] / &single[last];
                        if full != one_step {
                            let mut configs = decode(h, n, history_len);
                            configs.push(x);
                            let times = subset.iter().map(|&p| self.grid.times()[p]).collect();
                            return Ok(MarkovVerdict::NotMarkovian(MarkovWitness {
                                times,
                                configs,
                                full_history: full,
                                last_step: one_step,
                            }));
                        }
                    }
                }
            }
        }
        Ok(MarkovVerdict::Markovian)
    }

    /// `μ(E_i(t)|E_j(t')) = μ(E_i(t−t')|E_j(0))` wherever both sides are defined.
    pub fn is_time_homogeneous(&self) -> Result<HomogeneityVerdict> {
        if !self.is_markovian()?.holds() {
            return Err(Error::NotMarkovian);
        }
        if let Some((t, t_prime)) = self.grid.difference_gap() {
            return Err(Error::GridNotDifferenceClosed { t, t_prime });
        }
        for (t, tp) in self.grid.ordered_pairs() {
            if tp == 0 {
                continue;
            }
            let shifted = self.transition_matrix(t, tp)?;
            let base = self.transition_matrix(t - tp, 0)?;
            for j in 0..self.n {
                for i in 0..self.n {
                    if let (Some(a), Some(b)) = (shifted.get(i, j), base.get(i, j)) {
                        if a != b {
                            return Ok(HomogeneityVerdict::NotHomogeneous {
                                t,
                                t_prime: tp,
                                i,
                                j,
                                shifted: a.clone(),
                                base: b.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(HomogeneityVerdict::Homogeneous)
    }

    /// `M(t←0) = M(t←t')·M(t'←0)` on every entry defined on both sides.
    pub fn check_chapman_kolmogorov(&self, t: Time, t_prime: Time) -> Result<ChapmanKolmogorov> {
        self.grid.require(t)?;
        self.grid.require(t_prime)?;
        if t_prime > t {
            return Err(Error::PreconditionFailed(format!("t' = {t_prime} exceeds t = {t}")));
        }
        let direct = self.transition_matrix(t, 0)?;
        let late = self.transition_matrix(t, t_prime)?;
        let early = self.transition_matrix(t_prime, 0)?;
        let n = self.n;
        for j in 0..n {
            let Some(col) = early.defined_column(j) else {
                continue;
            };
            for i in 0..n {
                let mut acc = Scalar::zero();
                let mut defined = true;
                for (k, w) in col.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    match late.get(i, k) {
                        Some(v) => acc += v * w,
                        None => defined = false,
                    }
                }
                let Some(lhs) = direct.get(i, j) else {
                    continue;
                };
                if defined && *lhs != acc {
                    return Ok(ChapmanKolmogorov { holds: false, mismatch: Some((i, j, lhs.clone(), acc)) });
                }
            }
        }
        Ok(ChapmanKolmogorov { holds: true, mismatch: None })
    }
}

fn check_trajectory(traj: &[usize], n: usize, len: usize) -> Result<()> {
    if traj.len() != len {
        return Err(Error::LengthMismatch { expected: len, found: traj.len() });
    }
    if let Some(&c) = traj.iter().find(|&&c| c >= n) {
        return Err(Error::BadConfig { config: c + 1, n });
    }
    Ok(())
}

/// Increasing `k`-subsets of `0..len` in lexicographic order.
pub fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    rec(0, len, k, &mut cur, &mut out);
    out
}

/// Conjunction of `X_t = c` constraints; configurations 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventSpec {
    pub constraints: Vec<(Time, usize)>,
}

impl EventSpec {
    pub fn empty() -> Self {
        EventSpec::default()
    }

    pub fn at(t: Time, config: usize) -> Self {
        EventSpec { constraints: vec![(t, config)] }
    }

    pub fn and(mut self, t: Time, config: usize) -> Self {
        self.constraints.push((t, config));
        self
    }
}

/// Violating chain: `full_history = μ(x_last | x_1..x_{m})`, `last_step = μ(x_last | x_m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovWitness {
    pub times: Vec<Time>,
    pub configs: Vec<usize>,
    pub full_history: Scalar,
    pub last_step: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarkovVerdict {
    Markovian,
    NotMarkovian(MarkovWitness),
}

impl MarkovVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, MarkovVerdict::Markovian)
    }

    pub fn witness(&self) -> Option<&MarkovWitness> {
        match self {
            MarkovVerdict::Markovian => None,
            MarkovVerdict::NotMarkovian(w) => Some(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomogeneityVerdict {
    Homogeneous,
    NotHomogeneous { t: Time, t_prime: Time, i: usize, j: usize, shifted: Scalar, base: Scalar },
}

impl HomogeneityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, HomogeneityVerdict::Homogeneous)
    }
}

/// Outcome of the Chapman–Kolmogorov comparison; `mismatch` is `(i, j, M(t←0)_{ij}, product_{ij})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChapmanKolmogorov {
    pub holds: bool,
    pub mismatch: Option<(usize, usize, Scalar, Scalar)>,
}

/// One probability vector per grid time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorTrajectory {
    grid: TimeGrid,
    n: usize,
    points: Vec<ProbVector>,
}

impl VectorTrajectory {
    pub fn new(grid: TimeGrid, points: Vec<ProbVector>) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: points.len() });
        }
        let n = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        Ok(VectorTrajectory { grid, n, points })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[ProbVector] {
        &self.points
    }

    pub fn at_position(&self, pos: usize) -> &ProbVector {
        &self.points[pos]
    }

    pub fn at(&self, t: Time) -> Result<&ProbVector> {
        Ok(&self.points[self.grid.require(t)?])
    }

    /// Positions holding an entry strictly inside `(0, 1)`.
    pub fn interior_positions(&self) -> Vec<usize> {
        (0..self.points.len()).filter(|&p| !self.points[p].interior_indices().is_empty()).collect()
    }

    /// Interior entries at two times with a third time strictly between them.
    pub fn is_non_degenerate(&self) -> bool {
        let interior = self.interior_positions();
        match (interior.first(), interior.last()) {
            (Some(&f), Some(&l)) => l >= f + 2,
            _ => false,
        }
    }
}

/// Free-function form of [`VectorTrajectory::is_non_degenerate`] that also
/// checks the vector count against the grid.
pub fn is_non_degenerate(grid: &TimeGrid, points: &[ProbVector]) -> Result<bool> {
    Ok(VectorTrajectory::new(grid.clone(), points.to_vec())?.is_non_degenerate())
}
