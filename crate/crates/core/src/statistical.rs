//! Statistical dynamics: ensembles of independently evolving systems, with or
//! without a hidden ancilla, and the realizations that embed process families
//! into them.

use crate::dynamics::{MatrixFamily, DEFAULT_GRID_DENOMINATOR};
use crate::error::{Error, Result};
use crate::implementation::{markov_implementation, FamilyGenerator, GeneratorKind, ProcessFamily};
use crate::scalar::Scalar;
use crate::simplex::{Matrix, ProbVector, StochasticMatrix};
use crate::trajectory::{Time, TimeGrid, TrajectoryMeasure, VectorTrajectory};

/// Largest ancilla accepted when realizing a process family.
pub const MAX_FAMILY_ANCILLA: u128 = 4096;
/// Largest ancilla accepted when realizing a stochastic system.
pub const MAX_SYSTEM_ANCILLA: u128 = 65536;

fn indicator_matrix(n: usize, image: impl Fn(usize) -> usize) -> StochasticMatrix {
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        m.set(image(j), j, Scalar::one());
    }
    StochasticMatrix::new(m).expect("0/1 columns with one unit entry")
}

/// `D: T × C → C` with `D(0, i) = i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicSystem {
    grid: TimeGrid,
    n: usize,
    /// `table[pos][i]`.
    table: Vec<Vec<usize>>,
}

impl DeterministicSystem {
    pub fn new(grid: TimeGrid, n: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        if table.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: table.len() });
        }
        for row in &table {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            if let Some(&c) = row.iter().find(|&&c| c >= n) {
                return Err(Error::BadConfig { config: c + 1, n });
            }
        }
        if table[0].iter().enumerate().any(|(i, &c)| c != i) {
            return Err(Error::Schema("D(0, i) must equal i".into()));
        }
        Ok(DeterministicSystem { grid, n, table })
    }

    /// Table from `f(position, i)` for positions after 0.
    pub fn from_fn(grid: TimeGrid, n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let table = (0..grid.len()).map(|p| (0..n).map(|i| if p == 0 { i } else { f(p, i) }).collect()).collect();
        DeterministicSystem::new(grid, n, table)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn value(&self, t: Time, i: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::BadConfig { config: i + 1, n: self.n });
        }
        Ok(self.table[self.grid.require(t)?][i])
    }

    /// `t ↦ D(t, i)`.
    pub fn trajectory(&self, i: usize) -> Vec<usize> {
        self.table.iter().map(|row| row[i]).collect()
    }

    /// `M^D(t)_{ij} = 1` iff `D(t, j) = i`.
    pub fn matrices(&self) -> MatrixFamily {
        let ms = self.table.iter().map(|row| indicator_matrix(self.n, |j| row[j])).collect();
        MatrixFamily::new(self.grid.clone(), ms).expect("identity row at 0")
    }
}

/// Point mass on `t ↦ D(t, i)`.
pub fn dirac_process(d: &DeterministicSystem, i: usize) -> Result<TrajectoryMeasure> {
    if i >= d.n {
        return Err(Error::BadConfig { config: i + 1, n: d.n });
    }
    TrajectoryMeasure::dirac(d.grid.clone(), d.n, &d.trajectory(i))
}

/// `Σ_i p0_i · δ_{D(·, i)}`.
pub fn deterministic_measure(d: &DeterministicSystem, p0: &ProbVector) -> Result<TrajectoryMeasure> {
    if p0.len() != d.n {
        return Err(Error::DimensionMismatch { expected: d.n, found: p0.len() });
    }
    TrajectoryMeasure::from_entries(d.grid.clone(), d.n, (0..d.n).map(|i| (d.trajectory(i), p0.get(i).clone())))
}

pub fn deterministic_family(d: &DeterministicSystem) -> Result<ProcessFamily> {
    let owned = d.clone();
    let generator = FamilyGenerator::new(GeneratorKind::Deterministic, move |p0| deterministic_measure(&owned, p0));
    ProcessFamily::tabulate(d.grid.clone(), d.n, generator, DEFAULT_GRID_DENOMINATOR)
}

/// `D_{t←t'}` as `(D(t', i), D(t, i))` pairs over the range of `D_{t'}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicMap {
    pub t: Time,
    pub t_prime: Time,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeterministicDecomposability {
    Decomposable {
        maps: Vec<DeterministicMap>,
    },
    /// `D(t', i) = D(t', j)` but `D(t, i) ≠ D(t, j)`.
    NotDecomposable {
        t: Time,
        t_prime: Time,
        i: usize,
        j: usize,
    },
}

impl DeterministicDecomposability {
    pub fn holds(&self) -> bool {
        matches!(self, DeterministicDecomposability::Decomposable { .. })
    }
}

/// Trajectories that meet must stay together afterwards.
pub fn is_decomposable_deterministic(d: &DeterministicSystem) -> DeterministicDecomposability {
    let times = d.grid.times();
    let mut maps = Vec::new();
    for a in 0..times.len() {
        for b in a + 1..times.len() {
            for i in 0..d.n {
                for j in i + 1..d.n {
                    if d.table[a][i] == d.table[a][j] && d.table[b][i] != d.table[b][j] {
                        return DeterministicDecomposability::NotDecomposable { t: times[b], t_prime: times[a], i, j };
                    }
                }
            }
            let mut pairs: Vec<(usize, usize)> = (0..d.n).map(|i| (d.table[a][i], d.table[b][i])).collect();
            pairs.sort_unstable();
            pairs.dedup();
            maps.push(DeterministicMap { t: times[b], t_prime: times[a], pairs });
        }
    }
    DeterministicDecomposability::Decomposable { maps }
}

/// `SA: T × C × Λ → C` with `SA(0, i, α) = i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SystemAncilla {
    grid: TimeGrid,
    n: usize,
    m: usize,
    /// `table[pos][i][α]`.
    table: Vec<Vec<Vec<usize>>>,
}

impl SystemAncilla {
    pub fn new(grid: TimeGrid, n: usize, m: usize, table: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if table.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: table.len() });
        }
        for slice in &table {
            if slice.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: slice.len() });
            }
            for row in slice {
                if row.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, found: row.len() });
                }
                if let Some(&c) = row.iter().find(|&&c| c >= n) {
                    return Err(Error::BadConfig { config: c + 1, n });
                }
            }
        }
        if table[0].iter().enumerate().any(|(i, row)| row.iter().any(|&c| c != i)) {
            return Err(Error::Schema("SA(0, i, α) must equal i".into()));
        }
        Ok(SystemAncilla { grid, n, m, table })
    }

    /// Table from `f(position, i, α)` for positions after 0.
    pub fn from_fn(grid: TimeGrid, n: usize, m: usize, f: impl Fn(usize, usize, usize) -> usize) -> Result<Self> {
        let table = (0..grid.len())
            .map(|p| (0..n).map(|i| (0..m).map(|a| if p == 0 { i } else { f(p, i, a) }).collect()).collect())
            .collect();
        SystemAncilla::new(grid, n, m, table)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn table(&self) -> &[Vec<Vec<usize>>] {
        &self.table
    }

    pub fn value(&self, t: Time, i: usize, alpha: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::BadConfig { config: i + 1, n: self.n });
        }
        if alpha >= self.m {
            return Err(Error::BadConfig { config: alpha + 1, n: self.m });
        }
        Ok(self.table[self.grid.require(t)?][i][alpha])
    }

    pub fn trajectory(&self, i: usize, alpha: usize) -> Vec<usize> {
        self.table.iter().map(|slice| slice[i][alpha]).collect()
    }

    /// The deterministic system obtained by pinning the ancilla at `alpha`.
    pub fn pinned(&self, alpha: usize) -> DeterministicSystem {
        let table = self.table.iter().map(|slice| slice.iter().map(|row| row[alpha]).collect()).collect();
        DeterministicSystem::new(self.grid.clone(), self.n, table).expect("slice of a valid table")
    }
}

/// Distribution `π` over `C × Λ`, entry `(i, α)` at index `i·m + α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JointInitial {
    n: usize,
    m: usize,
    entries: ProbVector,
}

impl JointInitial {
    pub fn new(n: usize, m: usize, entries: ProbVector) -> Result<Self> {
        if entries.len() != n * m {
            return Err(Error::DimensionMismatch { expected: n * m, found: entries.len() });
        }
        Ok(JointInitial { n, m, entries })
    }

    /// `π_{i,α} = p0_i λ0_α`.
    pub fn independent(p0: &ProbVector, lambda0: &ProbVector) -> Self {
        let entries = p0.entries().iter().flat_map(|a| lambda0.entries().iter().map(move |b| a * b)).collect();
        JointInitial { n: p0.len(), m: lambda0.len(), entries: ProbVector::new(entries).expect("product of distributions") }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &ProbVector {
        &self.entries
    }

    pub fn get(&self, i: usize, alpha: usize) -> &Scalar {
        self.entries.get(i * self.m + alpha)
    }

    /// `p0_i = Σ_α π_{i,α}`.
    pub fn system_marginal(&self) -> ProbVector {
        let v = (0..self.n).map(|i| (0..self.m).map(|a| self.get(i, a)).sum()).collect();
        ProbVector::new(v).expect("marginal of a distribution")
    }

    pub fn ancilla_marginal(&self) -> ProbVector {
        let v = (0..self.m).map(|a| (0..self.n).map(|i| self.get(i, a)).sum()).collect();
        ProbVector::new(v).expect("marginal of a distribution")
    }
}

/// `Σ_{i,α} π_{i,α} δ_{SA(·, i, α)}`.
pub fn ancilla_process(sa: &SystemAncilla, pi: &JointInitial) -> Result<TrajectoryMeasure> {
    if pi.n != sa.n || pi.m != sa.m {
        return Err(Error::DimensionMismatch { expected: sa.n * sa.m, found: pi.n * pi.m });
    }
    let mut entries = Vec::new();
    for i in 0..sa.n {
        for a in 0..sa.m {
            let w = pi.get(i, a);
            if !w.is_zero() {
                entries.push((sa.trajectory(i, a), w.clone()));
            }
        }
    }
    TrajectoryMeasure::from_entries(sa.grid.clone(), sa.n, entries)
}

fn check_lambda(sa: &SystemAncilla, lambda0: &ProbVector) -> Result<()> {
    if lambda0.len() != sa.m {
        return Err(Error::DimensionMismatch { expected: sa.m, found: lambda0.len() });
    }
    Ok(())
}

/// Members use the uncorrelated initial law `π = p0 ⊗ λ0`.
pub fn ancilla_family_independent(sa: &SystemAncilla, lambda0: &ProbVector) -> Result<ProcessFamily> {
    check_lambda(sa, lambda0)?;
    let (owned, lambda) = (sa.clone(), lambda0.clone());
    let generator = FamilyGenerator::new(GeneratorKind::AncillaIndependent, move |p0| {
        if p0.len() != owned.n {
            return Err(Error::DimensionMismatch { expected: owned.n, found: p0.len() });
        }
        ancilla_process(&owned, &JointInitial::independent(p0, &lambda))
    });
    ProcessFamily::tabulate(sa.grid.clone(), sa.n, generator, DEFAULT_GRID_DENOMINATOR)
}

/// `M^SA(t)_{ij} = Σ_α λ0_α [SA(t, j, α) = i]`.
pub fn ancilla_transition_matrices(sa: &SystemAncilla, lambda0: &ProbVector) -> Result<MatrixFamily> {
    check_lambda(sa, lambda0)?;
    let ms = sa
        .table
        .iter()
        .map(|slice| {
            let mut m = Matrix::zeros(sa.n, sa.n);
            for (j, row) in slice.iter().enumerate() {
                for (a, &i) in row.iter().enumerate() {
                    let v = m.get(i, j) + lambda0.get(a);
                    m.set(i, j, v);
                }
            }
            StochasticMatrix::new(m)
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixFamily::new(sa.grid.clone(), ms)
}

/// `S = (μ_1, …, μ_N)` with `μ_i(E_j(0)) = δ_{ij}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StochasticSystem {
    grid: TimeGrid,
    n: usize,
    processes: Vec<TrajectoryMeasure>,
}

impl StochasticSystem {
    pub fn new(processes: Vec<TrajectoryMeasure>) -> Result<Self> {
        let Some(first) = processes.first() else {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        };
        let (grid, n) = (first.grid().clone(), first.n_configs());
        if processes.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: processes.len() });
        }
        for (i, mu) in processes.iter().enumerate() {
            if mu.grid() != &grid || mu.n_configs() != n {
                return Err(Error::GridMismatch(format!("process {} differs in grid or n", i + 1)));
            }
            if mu.marginal_vector(0)? != ProbVector::vertex(n, i) {
                return Err(Error::Schema(format!("process {} must start in configuration {}", i + 1, i + 1)));
            }
        }
        Ok(StochasticSystem { grid, n, processes })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn processes(&self) -> &[TrajectoryMeasure] {
        &self.processes
    }

    /// `M^S(t)` with column `j` the marginal of `μ_j` at `t`.
    pub fn matrices(&self) -> MatrixFamily {
        let ms = (0..self.grid.len())
            .map(|p| {
                let cols: Vec<ProbVector> =
                    self.processes.iter().map(|mu| mu.marginal_trajectory().at_position(p).clone()).collect();
                StochasticMatrix::from_prob_columns(&cols).expect("marginals are distributions")
            })
            .collect();
        MatrixFamily::new(self.grid.clone(), ms).expect("processes start at their own configuration")
    }
}

/// `Σ_i p0_i μ_i`.
pub fn stochastic_measure(s: &StochasticSystem, p0: &ProbVector) -> Result<TrajectoryMeasure> {
    if p0.len() != s.n {
        return Err(Error::DimensionMismatch { expected: s.n, found: p0.len() });
    }
    let parts: Vec<(Scalar, &TrajectoryMeasure)> = p0.entries().iter().cloned().zip(&s.processes).collect();
    TrajectoryMeasure::mixture(&parts)
}

pub fn stochastic_family(s: &StochasticSystem) -> Result<ProcessFamily> {
    let owned = s.clone();
    let generator = FamilyGenerator::new(GeneratorKind::Stochastic, move |p0| stochastic_measure(&owned, p0));
    ProcessFamily::tabulate(s.grid.clone(), s.n, generator, DEFAULT_GRID_DENOMINATOR)
}

/// `μ_i = Σ_α λ0_α δ_{SA(·, i, α)}`.
pub fn derive_stochastic_from_ancilla(sa: &SystemAncilla, lambda0: &ProbVector) -> Result<StochasticSystem> {
    check_lambda(sa, lambda0)?;
    let processes = (0..sa.n)
        .map(|i| ancilla_process(sa, &JointInitial::independent(&ProbVector::vertex(sa.n, i), lambda0)))
        .collect::<Result<Vec<_>>>()?;
    StochasticSystem::new(processes)
}

fn checked_power(base: u128, exp: u32, cap: u128) -> Result<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc > cap {
            return Err(Error::GridTooLarge { size: acc, cap });
        }
    }
    Ok(acc)
}

/// An ancilla system together with one initial law per family member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncillaRealization {
    pub system: SystemAncilla,
    pub initials: Vec<(ProbVector, JointInitial)>,
}

impl AncillaRealization {
    /// Rebuilds each member from the system and its initial law.
    pub fn reconstruct(&self) -> Result<Vec<(ProbVector, TrajectoryMeasure)>> {
        self.initials.iter().map(|(p0, pi)| Ok((p0.clone(), ancilla_process(&self.system, pi)?))).collect()
    }

    /// The rebuilt members equal `fam`'s members table for table.
    pub fn reproduces(&self, fam: &ProcessFamily) -> Result<bool> {
        let rebuilt = self.reconstruct()?;
        Ok(rebuilt.len() == fam.members().len() && rebuilt.iter().all(|(p0, mu)| fam.members().get(p0) == Some(mu)))
    }
}

/// Ancilla value `α` encodes the tail `(ω(t_1), …, ω(t_τ))` base `N`,
/// big-endian, so `π(i, α)` is the member's weight on `(i, tail(α))`.
pub fn realize_family_as_ancilla(fam: &ProcessFamily) -> Result<AncillaRealization> {
    let n = fam.n();
    let tail_len = fam.grid().len() - 1;
    let m = checked_power(n as u128, tail_len as u32, MAX_FAMILY_ANCILLA)? as usize;
    let system = SystemAncilla::from_fn(fam.grid().clone(), n, m, |p, _, a| tail_digit(a, n, tail_len, p - 1))?;
    let initials = fam
        .members()
        .iter()
        .map(|(p0, mu)| Ok((p0.clone(), JointInitial::new(n, m, ProbVector::new(mu.dense().to_vec())?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AncillaRealization { system, initials })
}

/// Digit `k` (0 = most significant) of `value` written with `len` digits base `n`.
fn tail_digit(value: usize, n: usize, len: usize, k: usize) -> usize {
    (value / n.pow((len - 1 - k) as u32)) % n
}

/// Ancilla `α = (α^(1), …, α^(N))` with one tail index per starting
/// configuration; `λ0_α = Π_r μ_r(r, tail(α^(r)))`.
pub fn realize_stochastic_as_ancilla(s: &StochasticSystem) -> Result<(SystemAncilla, ProbVector)> {
    let n = s.n;
    let tail_len = s.grid.len() - 1;
    let block = checked_power(n as u128, tail_len as u32, MAX_SYSTEM_ANCILLA)?;
    let m = checked_power(block, n as u32, MAX_SYSTEM_ANCILLA)? as usize;
    let block = block as usize;
    let system = SystemAncilla::from_fn(s.grid.clone(), n, m, |p, i, a| {
        let beta = tail_digit(a, block, n, i);
        tail_digit(beta, n, tail_len, p - 1)
    })?;
    let lambda = (0..m)
        .map(|a| {
            let mut acc = Scalar::one();
            for r in 0..n {
                let beta = tail_digit(a, block, n, r);
                let w = &s.processes[r].dense()[r * block + beta];
                if w.is_zero() {
                    return Scalar::zero();
                }
                acc = &acc * w;
            }
            acc
        })
        .collect();
    Ok((system, ProbVector::new(lambda)?))
}

/// `μ_i = Σ_α λ0_α δ_{SA(·, i, α)}` for every `i`.
pub fn reproduces_stochastic(sa: &SystemAncilla, lambda0: &ProbVector, s: &StochasticSystem) -> Result<bool> {
    Ok(derive_stochastic_from_ancilla(sa, lambda0)?.processes == s.processes)
}

/// `μ_i` is the product measure of `t ↦ P(t) e_i`.
pub fn realize_linear_as_stochastic(fam: &MatrixFamily) -> Result<StochasticSystem> {
    let processes = (0..fam.n())
        .map(|i| {
            let points = fam.matrices().iter().map(|m| m.column(i)).collect();
            markov_implementation(&VectorTrajectory::new(fam.grid().clone(), points)?)
        })
        .collect::<Result<Vec<_>>>()?;
    StochasticSystem::new(processes)
}
