//! Probability dynamics `P: T × S_N → S_N` and their decision procedures.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lp::{self, Feasibility};
use crate::scalar::Scalar;
use crate::simplex::{simplest_first, simplex_grid, Matrix, ProbVector, StochasticMatrix};
use crate::trajectory::{Time, TimeGrid};

/// Denominator bound of the rational evaluation grid.
pub const DEFAULT_GRID_DENOMINATOR: usize = 6;

/// `{P(t)}` with `P(0) = I`, one matrix per grid time.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixFamily {
    grid: TimeGrid,
    n: usize,
    matrices: Vec<StochasticMatrix>,
}

impl MatrixFamily {
    pub fn new(grid: TimeGrid, matrices: Vec<StochasticMatrix>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: matrices.len() });
        }
        let n = matrices[0].dim();
        if let Some(m) = matrices.iter().find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
        if !matrices[0].matrix().is_identity() {
            return Err(Error::InvalidFamily("P(0) must be the identity".into()));
        }
        Ok(MatrixFamily { grid, n, matrices })
    }

    /// `P(t) = M^t` on `{0, …, tau}`.
    pub fn powers(m: &StochasticMatrix, tau: Time) -> Self {
        let grid = TimeGrid::contiguous(tau);
        let matrices = (0..=tau).map(|t| m.pow(t)).collect();
        MatrixFamily { grid, n: m.dim(), matrices }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn at(&self, t: Time) -> Result<&StochasticMatrix> {
        Ok(&self.matrices[self.grid.require(t)?])
    }

    pub fn matrices(&self) -> &[StochasticMatrix] {
        &self.matrices
    }
}

/// Trajectory values on a finite set of initial vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulatedMap {
    entries: BTreeMap<ProbVector, Vec<ProbVector>>,
}

impl TabulatedMap {
    pub fn entries(&self) -> &BTreeMap<ProbVector, Vec<ProbVector>> {
        &self.entries
    }
}

type Evaluator = dyn Fn(Time, &ProbVector) -> Result<ProbVector> + Send + Sync;

/// Closure-backed dynamics, queried only at grid times.
#[derive(Clone)]
pub struct BlackBox(Arc<Evaluator>);

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BlackBox(..)")
    }
}

#[derive(Clone, Debug)]
pub enum DynamicsRepr {
    Matrix(MatrixFamily),
    Tabulated(TabulatedMap),
    BlackBox(BlackBox),
}

#[derive(Clone, Debug)]
pub struct ProbabilityDynamics {
    grid: TimeGrid,
    n: usize,
    repr: DynamicsRepr,
}

impl ProbabilityDynamics {
    pub fn from_matrices(fam: MatrixFamily) -> Self {
        ProbabilityDynamics { grid: fam.grid.clone(), n: fam.n, repr: DynamicsRepr::Matrix(fam) }
    }

    /// Table of `p0 ↦ (P(t, p0))_t`; must contain every vertex and satisfy `P(0, p0) = p0`.
    pub fn tabulated(grid: TimeGrid, n: usize, entries: BTreeMap<ProbVector, Vec<ProbVector>>) -> Result<Self> {
        for (p0, traj) in &entries {
            if p0.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p0.len() });
            }
            if traj.len() != grid.len() {
                return Err(Error::LengthMismatch { expected: grid.len(), found: traj.len() });
            }
            if let Some(p) = traj.iter().find(|p| p.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, found: p.len() });
            }
            if traj[0] != *p0 {
                return Err(Error::Schema(format!("P(0, {p0}) must equal {p0}")));
            }
        }
        for j in 0..n {
            let e = ProbVector::vertex(n, j);
            if !entries.contains_key(&e) {
                return Err(Error::Schema(format!("tabulated dynamics must include vertex {e}")));
            }
        }
        Ok(ProbabilityDynamics { grid, n, repr: DynamicsRepr::Tabulated(TabulatedMap { entries }) })
    }

    /// Dynamics given by a closure; time 0 is always the identity.
    pub fn black_box<F>(grid: TimeGrid, n: usize, f: F) -> Self
    where
        F: Fn(Time, &ProbVector) -> Result<ProbVector> + Send + Sync + 'static,
    {
        ProbabilityDynamics { grid, n, repr: DynamicsRepr::BlackBox(BlackBox(Arc::new(f))) }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn repr(&self) -> &DynamicsRepr {
        &self.repr
    }

    pub fn matrix_family(&self) -> Option<&MatrixFamily> {
        match &self.repr {
            DynamicsRepr::Matrix(f) => Some(f),
            _ => None,
        }
    }

    /// `P(t, p0)`.
    pub fn evaluate(&self, t: Time, p0: &ProbVector) -> Result<ProbVector> {
        let pos = self.grid.require(t)?;
        if p0.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p0.len() });
        }
        if pos == 0 {
            return Ok(p0.clone());
        }
        match &self.repr {
            DynamicsRepr::Matrix(f) => f.matrices[pos].apply(p0),
            DynamicsRepr::Tabulated(tab) => {
                tab.entries.get(p0).map(|traj| traj[pos].clone()).ok_or_else(|| Error::UntabulatedPoint(p0.to_string()))
            }
            DynamicsRepr::BlackBox(BlackBox(f)) => {
                let out = f(t, p0)?;
                if out.len() != self.n {
                    return Err(Error::DimensionMismatch { expected: self.n, found: out.len() });
                }
                Ok(out)
            }
        }
    }

    /// The trajectory `t ↦ P(t, p0)` over the grid.
    pub fn solution(&self, p0: &ProbVector) -> Result<Vec<ProbVector>> {
        self.grid.times().iter().map(|&t| self.evaluate(t, p0)).collect()
    }

    /// Points used by grid-based checks: the tabulated inputs for a table,
    /// otherwise the rational grid with denominators up to `g`.
    pub fn evaluation_points(&self, g: usize) -> Vec<ProbVector> {
        match &self.repr {
            DynamicsRepr::Tabulated(tab) => {
                let mut pts: Vec<ProbVector> = tab.entries.keys().cloned().collect();
                pts.sort_by(simplest_first);
                pts
            }
            _ => simplex_grid(self.n, g),
        }
    }

    fn vertex_candidate(&self) -> Result<MatrixFamily> {
        let matrices = self
            .grid
            .times()
            .iter()
            .map(|&t| {
                let cols = (0..self.n).map(|j| self.evaluate(t, &ProbVector::vertex(self.n, j))).collect::<Result<Vec<_>>>()?;
                StochasticMatrix::from_prob_columns(&cols)
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixFamily::new(self.grid.clone(), matrices)
    }

    /// Convex-combination preservation, decided exactly for matrix families
    /// and on the evaluation points otherwise.
    pub fn is_linear(&self) -> Result<LinearityVerdict> {
        self.is_linear_with_grid(DEFAULT_GRID_DENOMINATOR)
    }

    pub fn is_linear_with_grid(&self, g: usize) -> Result<LinearityVerdict> {
        if let DynamicsRepr::Matrix(f) = &self.repr {
            return Ok(LinearityVerdict::Linear { family: f.clone(), on_grid: false });
        }
        let candidate = self.vertex_candidate()?;
        let points = self.evaluation_points(g);
        for (pos, &t) in self.grid.times().iter().enumerate().skip(1) {
            let m = &candidate.matrices[pos];
            for p in &points {
                let lhs = self.evaluate(t, p)?;
                let predicted = m.apply(p)?;
                if lhs != predicted {
                    return Ok(LinearityVerdict::NotLinear(self.linearity_witness(t, p, lhs, &predicted, m)?));
                }
            }
        }
        Ok(LinearityVerdict::Linear { family: candidate, on_grid: true })
    }

    fn linearity_witness(
        &self,
        t: Time,
        p: &ProbVector,
        lhs: ProbVector,
        predicted: &ProbVector,
        m: &StochasticMatrix,
    ) -> Result<LinearityWitness> {
        let j = p.support()[0];
        let lambda = p.get(j).clone();
        let rest = Scalar::one() - &lambda;
        let q_entries: Vec<Scalar> =
            p.entries().iter().enumerate().map(|(k, v)| if k == j { Scalar::zero() } else { v / &rest }).collect();
        let q = ProbVector::new(q_entries)?;
        if let Ok(pq) = self.evaluate(t, &q) {
            let pe = m.column(j);
            let rhs = crate::simplex::convex_combine(&lambda, &pe, &pq)?;
            if rhs != lhs {
                return Ok(LinearityWitness {
                    t,
                    point: p.clone(),
                    components: vec![(lambda, ProbVector::vertex(self.n, j)), (rest, q)],
                    lhs,
                    rhs,
                });
            }
        }
        let components = p.support().into_iter().map(|k| (p.get(k).clone(), ProbVector::vertex(self.n, k))).collect();
        Ok(LinearityWitness { t, point: p.clone(), components, lhs, rhs: predicted.clone() })
    }

    /// Decomposability: by the kernel test for matrix families, by the direct
    /// pairwise test on evaluation points otherwise.
    pub fn is_decomposable(&self) -> Result<DecomposabilityVerdict> {
        match &self.repr {
            DynamicsRepr::Matrix(f) => decomposable_by_kernel(f),
            _ => decomposable_by_points(self, DEFAULT_GRID_DENOMINATOR),
        }
    }

    /// `P_t = P_{t−t'} ∘ P_{t'}` for all `t' <= t`.
    pub fn is_time_homogeneous(&self) -> Result<DynamicsHomogeneity> {
        if let Some((t, t_prime)) = self.grid.difference_gap() {
            return Err(Error::GridNotDifferenceClosed { t, t_prime });
        }
        if let DynamicsRepr::Matrix(f) = &self.repr {
            for (t, tp) in self.grid.ordered_pairs() {
                let composed = f.at(t - tp)?.mul(f.at(tp)?)?;
                if composed != *f.at(t)? {
                    return Ok(DynamicsHomogeneity::NotHomogeneous { t, t_prime: tp, p0: None });
                }
            }
            return Ok(DynamicsHomogeneity::Homogeneous { on_grid: false });
        }
        let points = self.evaluation_points(DEFAULT_GRID_DENOMINATOR);
        for (t, tp) in self.grid.ordered_pairs() {
            for p in &points {
                let direct = self.evaluate(t, p)?;
                let mid = self.evaluate(tp, p)?;
                let composed = match self.evaluate(t - tp, &mid) {
                    Ok(v) => v,
                    Err(Error::UntabulatedPoint(_)) => continue,
                    Err(e) => return Err(e),
                };
                if composed != direct {
                    return Ok(DynamicsHomogeneity::NotHomogeneous { t, t_prime: tp, p0: Some(p.clone()) });
                }
            }
        }
        Ok(DynamicsHomogeneity::Homogeneous { on_grid: true })
    }

    /// Divisibility of the linear form; every pair is `NotApplicable` when the
    /// dynamics is not linear.
    pub fn divisibility(&self) -> Result<DivisibilityReport> {
        match self.is_linear()? {
            LinearityVerdict::Linear { family, .. } => is_divisible(&family),
            LinearityVerdict::NotLinear(_) => Ok(DivisibilityReport {
                pairs: pairs_below(&self.grid)
                    .into_iter()
                    .map(|(t, t_prime)| PairDivisibility { t, t_prime, status: DivisibilityStatus::NotApplicable })
                    .collect(),
            }),
        }
    }
}

/// `p = Σ w_k c_k` with `P_t(p) = lhs ≠ rhs = Σ w_k P_t(c_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearityWitness {
    pub t: Time,
    pub point: ProbVector,
    pub components: Vec<(Scalar, ProbVector)>,
    pub lhs: ProbVector,
    pub rhs: ProbVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearityVerdict {
    /// `on_grid` marks a verdict established only on the evaluation points.
    Linear {
        family: MatrixFamily,
        on_grid: bool,
    },
    NotLinear(LinearityWitness),
}

impl LinearityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, LinearityVerdict::Linear { .. })
    }

    pub fn family(&self) -> Option<&MatrixFamily> {
        match self {
            LinearityVerdict::Linear { family, .. } => Some(family),
            LinearityVerdict::NotLinear(_) => None,
        }
    }
}

/// `P_{t←t'}` listed on the points of the range of `P_{t'}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecomposingMap {
    pub t: Time,
    pub t_prime: Time,
    pub domain: Vec<ProbVector>,
    pub images: Vec<ProbVector>,
}

/// `P_{t'}(p0) = P_{t'}(q0)` but `P_t(p0) ≠ P_t(q0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub t: Time,
    pub t_prime: Time,
    pub p0: ProbVector,
    pub q0: ProbVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecomposabilityVerdict {
    Decomposable { maps: Vec<DecomposingMap>, on_grid: bool },
    NotDecomposable(DecompositionWitness),
}

impl DecomposabilityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, DecomposabilityVerdict::Decomposable { .. })
    }
}

/// Pairs `(t, t')` with `t' < t`, ordered by `t'` then `t`.
pub fn pairs_below(grid: &TimeGrid) -> Vec<(Time, Time)> {
    grid.ordered_pairs().into_iter().filter(|(t, tp)| tp < t).collect()
}

fn column_map(fam: &MatrixFamily, t: Time, tp: Time) -> Result<DecomposingMap> {
    let late = fam.at(t)?;
    let early = fam.at(tp)?;
    let mut domain = Vec::new();
    let mut images = Vec::new();
    for j in 0..fam.n {
        let d = early.column(j);
        if !domain.contains(&d) {
            domain.push(d);
            images.push(late.column(j));
        }
    }
    Ok(DecomposingMap { t, t_prime: tp, domain, images })
}

/// Zero-sum kernel vectors of `P(t')` that `P(t)` does not annihilate,
/// first one per pair.
fn kernel_violation(fam: &MatrixFamily, t: Time, tp: Time) -> Result<Option<DecompositionWitness>> {
    let n = fam.n;
    let mut rows = fam.at(tp)?.matrix().to_rows();
    rows.push(vec![Scalar::one(); n]);
    let constraint = Matrix::from_rows(rows)?;
    let late = fam.at(t)?.matrix();
    for k in constraint.kernel() {
        if late.mul_vec(&k)?.iter().all(Scalar::is_zero) {
            continue;
        }
        let pos: Vec<Scalar> = k.iter().map(|v| if v.is_positive() { v.clone() } else { Scalar::zero() }).collect();
        let neg: Vec<Scalar> = k.iter().map(|v| if v.is_negative() { -v } else { Scalar::zero() }).collect();
        let s: Scalar = pos.iter().sum();
        let p0 = ProbVector::new(pos.iter().map(|v| v / &s).collect())?;
        let q0 = ProbVector::new(neg.iter().map(|v| v / &s).collect())?;
        return Ok(Some(DecompositionWitness { t, t_prime: tp, p0, q0 }));
    }
    Ok(None)
}

/// Linear decomposability: `P(t)` must vanish on `ker P(t') ∩ {Σx = 0}`.
pub fn decomposable_by_kernel(fam: &MatrixFamily) -> Result<DecomposabilityVerdict> {
    let mut maps = Vec::new();
    for (t, tp) in pairs_below(&fam.grid) {
        if let Some(w) = kernel_violation(fam, t, tp)? {
            return Ok(DecomposabilityVerdict::NotDecomposable(w));
        }
        maps.push(column_map(fam, t, tp)?);
    }
    Ok(DecomposabilityVerdict::Decomposable { maps, on_grid: false })
}

/// Direct test over evaluation points: equal values at `t'` force equal values at `t`.
pub fn decomposable_by_points(dynamics: &ProbabilityDynamics, g: usize) -> Result<DecomposabilityVerdict> {
    let points = dynamics.evaluation_points(g);
    let mut maps = Vec::new();
    for (t, tp) in pairs_below(&dynamics.grid) {
        let mut seen: BTreeMap<ProbVector, (ProbVector, ProbVector)> = BTreeMap::new();
        for p in &points {
            let at_tp = dynamics.evaluate(tp, p)?;
            let at_t = dynamics.evaluate(t, p)?;
            match seen.get(&at_tp) {
                Some((first, image)) if *image != at_t => {
                    return Ok(DecomposabilityVerdict::NotDecomposable(DecompositionWitness {
                        t,
                        t_prime: tp,
                        p0: first.clone(),
                        q0: p.clone(),
                    }));
                }
                Some(_) => {}
                None => {
                    seen.insert(at_tp, (p.clone(), at_t));
                }
            }
        }
        let (domain, images) = seen.into_iter().map(|(d, (_, img))| (d, img)).unzip();
        maps.push(DecomposingMap { t, t_prime: tp, domain, images });
    }
    Ok(DecomposabilityVerdict::Decomposable { maps, on_grid: true })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionMatrix {
    /// `P(t)·P(t')⁻¹`, possibly not stochastic.
    Matrix(Matrix),
    /// `P(t')` is singular; the map is given on the range points.
    NoMatrixForm(DecomposingMap),
}

/// The matrix of `P_{t←t'}` when `P(t')` is invertible.
pub fn decomposing_map_matrix(fam: &MatrixFamily, t: Time, t_prime: Time) -> Result<DecompositionMatrix> {
    fam.grid.require(t)?;
    fam.grid.require(t_prime)?;
    if t_prime > t {
        return Err(Error::PreconditionFailed(format!("t' = {t_prime} exceeds t = {t}")));
    }
    if t_prime == t {
        return Ok(DecompositionMatrix::Matrix(Matrix::identity(fam.n)));
    }
    if kernel_violation(fam, t, t_prime)?.is_some() {
        return Err(Error::NotDecomposable { t, t_prime });
    }
    match fam.at(t_prime)?.matrix().inverse() {
        Some(inv) => Ok(DecompositionMatrix::Matrix(fam.at(t)?.matrix().mul(&inv)?)),
        None => Ok(DecompositionMatrix::NoMatrixForm(column_map(fam, t, t_prime)?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisibilityStatus {
    Divisible {
        factor: StochasticMatrix,
    },
    /// Farkas vector over the rows of [`divisibility_system`].
    NotDivisible {
        certificate: Vec<Scalar>,
    },
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDivisibility {
    pub t: Time,
    pub t_prime: Time,
    pub status: DivisibilityStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibilityReport {
    pub pairs: Vec<PairDivisibility>,
}

impl DivisibilityReport {
    pub fn is_divisible(&self) -> bool {
        self.pairs.iter().all(|p| matches!(p.status, DivisibilityStatus::Divisible { .. }))
    }

    pub fn pair(&self, t: Time, t_prime: Time) -> Option<&PairDivisibility> {
        self.pairs.iter().find(|p| p.t == t && p.t_prime == t_prime)
    }

    pub fn first_failure(&self) -> Option<&PairDivisibility> {
        self.pairs.iter().find(|p| !matches!(p.status, DivisibilityStatus::Divisible { .. }))
    }
}

/// `X·P(t') = P(t)` and unit column sums as `A x = b` over `x_{ik}` (index `i·n + k`).
///
/// Rows `i·n + j` carry `Σ_k x_{ik} P(t')_{kj} = P(t)_{ij}`; rows `n² + k` carry `Σ_i x_{ik} = 1`.
pub fn divisibility_system(late: &StochasticMatrix, early: &StochasticMatrix) -> (Matrix, Vec<Scalar>) {
    let n = late.dim();
    let mut a = Matrix::zeros(n * n + n, n * n);
    let mut b = Vec::with_capacity(n * n + n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                a.set(i * n + j, i * n + k, early.get(k, j).clone());
            }
            b.push(late.get(i, j).clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            a.set(n * n + k, i * n + k, Scalar::one());
        }
        b.push(Scalar::one());
    }
    (a, b)
}

/// Stochastic `X` with `X·early = late`, or a Farkas certificate.
pub fn stochastic_factor(late: &StochasticMatrix, early: &StochasticMatrix) -> Result<DivisibilityStatus> {
    let n = late.dim();
    let (a, b) = divisibility_system(late, early);
    match lp::find_feasible(&a, &b)? {
        Feasibility::Feasible(x) => {
            let rows = (0..n).map(|i| x[i * n..(i + 1) * n].to_vec()).collect();
            Ok(DivisibilityStatus::Divisible { factor: StochasticMatrix::new(Matrix::from_rows(rows)?)? })
        }
        Feasibility::Infeasible(certificate) => Ok(DivisibilityStatus::NotDivisible { certificate }),
    }
}

/// Solves the exact feasibility problem for every pair `t' < t`.
pub fn is_divisible(fam: &MatrixFamily) -> Result<DivisibilityReport> {
    let pairs = pairs_below(&fam.grid)
        .into_iter()
        .map(|(t, tp)| Ok(PairDivisibility { t, t_prime: tp, status: stochastic_factor(fam.at(t)?, fam.at(tp)?)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(DivisibilityReport { pairs })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynamicsHomogeneity {
    Homogeneous { on_grid: bool },
    NotHomogeneous { t: Time, t_prime: Time, p0: Option<ProbVector> },
}

impl DynamicsHomogeneity {
    pub fn holds(&self) -> bool {
        matches!(self, DynamicsHomogeneity::Homogeneous { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn example2() -> MatrixFamily {
        let p1 = StochasticMatrix::from_ratio_rows(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]).unwrap();
        let p2 = StochasticMatrix::from_ratio_rows(&[&[(1, 2), (1, 1)], &[(1, 2), (0, 1)]]).unwrap();
        MatrixFamily::new(TimeGrid::contiguous(2), vec![StochasticMatrix::identity(2), p1, p2]).unwrap()
    }

    #[test]
    fn family_needs_identity_at_zero() {
        let flip = StochasticMatrix::from_ratio_rows(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]).unwrap();
        assert!(matches!(MatrixFamily::new(TimeGrid::contiguous(0), vec![flip]), Err(Error::InvalidFamily(_))));
    }

    #[test]
    fn example2_decomposing_matrix() {
        let fam = example2();
        let DecompositionMatrix::Matrix(m) = decomposing_map_matrix(&fam, 2, 1).unwrap() else { panic!() };
        assert_eq!(m, Matrix::from_ratio_rows(&[&[(1, 2), (3, 2)], &[(1, 2), (-1, 2)]]).unwrap());
        let DecompositionMatrix::Matrix(id) = decomposing_map_matrix(&fam, 1, 1).unwrap() else { panic!() };
        assert!(id.is_identity());
    }

    #[test]
    fn example2_not_divisible_with_certificate() {
        let fam = example2();
        let report = is_divisible(&fam).unwrap();
        assert!(!report.is_divisible());
        let pair = report.pair(2, 1).unwrap();
        let DivisibilityStatus::NotDivisible { certificate } = &pair.status else { panic!("{pair:?}") };
        let (a, b) = divisibility_system(fam.at(2).unwrap(), fam.at(1).unwrap());
        assert!(lp::is_farkas_certificate(&a, &b, certificate));
        assert!(matches!(report.pair(1, 0).unwrap().status, DivisibilityStatus::Divisible { .. }));
    }

    #[test]
    fn powers_are_divisible_and_homogeneous() {
        let m = StochasticMatrix::from_ratio_rows(&[&[(2, 3), (1, 4)], &[(1, 3), (3, 4)]]).unwrap();
        let fam = MatrixFamily::powers(&m, 3);
        let report = is_divisible(&fam).unwrap();
        assert!(report.is_divisible());
        for p in &report.pairs {
            let DivisibilityStatus::Divisible { factor } = &p.status else { unreachable!() };
            assert_eq!(factor.mul(fam.at(p.t_prime).unwrap()).unwrap(), *fam.at(p.t).unwrap());
        }
        assert!(ProbabilityDynamics::from_matrices(fam).is_time_homogeneous().unwrap().holds());
        assert!(!ProbabilityDynamics::from_matrices(example2()).is_time_homogeneous().unwrap().holds());
    }

    #[test]
    fn merging_then_splitting_not_decomposable() {
        // Deterministic image: both configurations go to 1 at t=1, then split at t=2.
        let p1 = StochasticMatrix::from_ratio_rows(&[&[(1, 1), (1, 1)], &[(0, 1), (0, 1)]]).unwrap();
        let p2 = StochasticMatrix::identity(2);
        let fam = MatrixFamily::new(TimeGrid::contiguous(2), vec![StochasticMatrix::identity(2), p1, p2]).unwrap();
        let DecomposabilityVerdict::NotDecomposable(w) = decomposable_by_kernel(&fam).unwrap() else { panic!() };
        assert_eq!((w.t, w.t_prime), (2, 1));
        assert_eq!(fam.at(1).unwrap().apply(&w.p0).unwrap(), fam.at(1).unwrap().apply(&w.q0).unwrap());
        assert_ne!(fam.at(2).unwrap().apply(&w.p0).unwrap(), fam.at(2).unwrap().apply(&w.q0).unwrap());
        let dynamics = ProbabilityDynamics::from_matrices(fam.clone());
        assert!(!decomposable_by_points(&dynamics, 6).unwrap().holds());
        assert!(matches!(decomposing_map_matrix(&fam, 2, 1), Err(Error::NotDecomposable { t: 2, t_prime: 1 })));
    }

    #[test]
    fn singular_intermediate_has_no_matrix_form() {
        let p1 = StochasticMatrix::from_ratio_rows(&[&[(1, 1), (1, 1)], &[(0, 1), (0, 1)]]).unwrap();
        let fam = MatrixFamily::new(TimeGrid::contiguous(2), vec![StochasticMatrix::identity(2), p1.clone(), p1]).unwrap();
        let DecompositionMatrix::NoMatrixForm(map) = decomposing_map_matrix(&fam, 2, 1).unwrap() else { panic!() };
        assert_eq!(map.domain, vec![ProbVector::vertex(2, 0)]);
        assert_eq!(map.images, vec![ProbVector::vertex(2, 0)]);
    }

    #[test]
    fn squaring_dynamics_not_linear() {
        let dynamics = ProbabilityDynamics::black_box(TimeGrid::contiguous(2), 2, |t, p| {
            let r = p.get(0).clone();
            let h = if t == 1 { &r * &r } else { r };
            ProbVector::new(vec![h.clone(), Scalar::one() - h])
        });
        assert_eq!(dynamics.evaluate(1, &ProbVector::uniform(2)).unwrap(), ProbVector::from_ratios(&[(1, 4), (3, 4)]).unwrap());
        let LinearityVerdict::NotLinear(w) = dynamics.is_linear().unwrap() else { panic!() };
        assert_eq!(w.t, 1);
        assert_eq!(w.point, ProbVector::uniform(2));
        assert_eq!(w.lhs, ProbVector::from_ratios(&[(1, 4), (3, 4)]).unwrap());
        assert_eq!(w.rhs, ProbVector::uniform(2));
        assert_eq!(w.components, vec![(q(1, 2), ProbVector::vertex(2, 0)), (q(1, 2), ProbVector::vertex(2, 1))]);
        assert!(!dynamics.is_time_homogeneous().unwrap().holds());
        let report = dynamics.divisibility().unwrap();
        assert!(report.pairs.iter().all(|p| p.status == DivisibilityStatus::NotApplicable));
    }

    #[test]
    fn tabulated_requires_vertices_and_identity() {
        let g = TimeGrid::contiguous(1);
        let e1 = ProbVector::vertex(2, 0);
        let mut entries = BTreeMap::new();
        entries.insert(e1.clone(), vec![e1.clone(), e1.clone()]);
        assert!(matches!(ProbabilityDynamics::tabulated(g.clone(), 2, entries.clone()), Err(Error::Schema(_))));
        let e2 = ProbVector::vertex(2, 1);
        entries.insert(e2.clone(), vec![e1.clone(), e2.clone()]);
        assert!(matches!(ProbabilityDynamics::tabulated(g, 2, entries), Err(Error::Schema(_))));
    }

    #[test]
    fn time_gap_detected() {
        let m = StochasticMatrix::identity(2);
        let fam = MatrixFamily::new(TimeGrid::new(vec![0, 2, 3]).unwrap(), vec![m.clone(), m.clone(), m]).unwrap();
        assert!(matches!(
            ProbabilityDynamics::from_matrices(fam).is_time_homogeneous(),
            Err(Error::GridNotDifferenceClosed { .. })
        ));
    }
}
