//! Stochastic process families and the constructions that implement a
//! probability dynamics by canonical processes.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::dynamics::{MatrixFamily, ProbabilityDynamics, DEFAULT_GRID_DENOMINATOR};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::{simplex_grid, PartialStochasticMatrix, ProbVector, StochasticMatrix};
use crate::trajectory::{Time, TimeGrid, TrajectoryMeasure, VectorTrajectory};

/// Name of the rule a family uses to build members.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    MarkovProduct,
    TransitionConstant,
    NonMarkovEps,
    Deterministic,
    Stochastic,
    AncillaIndependent,
    Custom,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::MarkovProduct => "markov_product",
            GeneratorKind::TransitionConstant => "transition_constant",
            GeneratorKind::NonMarkovEps => "non_markov_eps",
            GeneratorKind::Deterministic => "deterministic",
            GeneratorKind::Stochastic => "stochastic",
            GeneratorKind::AncillaIndependent => "ancilla_independent",
            GeneratorKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            GeneratorKind::MarkovProduct,
            GeneratorKind::TransitionConstant,
            GeneratorKind::NonMarkovEps,
            GeneratorKind::Deterministic,
            GeneratorKind::Stochastic,
            GeneratorKind::AncillaIndependent,
            GeneratorKind::Custom,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

type Builder = dyn Fn(&ProbVector) -> Result<TrajectoryMeasure> + Send + Sync;

/// Deterministic, stateless member constructor. `build` is absent for
/// families loaded from files, which keep only the rule's name.
#[derive(Clone)]
pub struct FamilyGenerator {
    pub kind: GeneratorKind,
    build: Option<Arc<Builder>>,
}

impl FamilyGenerator {
    pub fn new<F>(kind: GeneratorKind, f: F) -> Self
    where
        F: Fn(&ProbVector) -> Result<TrajectoryMeasure> + Send + Sync + 'static,
    {
        FamilyGenerator { kind, build: Some(Arc::new(f)) }
    }

    pub fn name_only(kind: GeneratorKind) -> Self {
        FamilyGenerator { kind, build: None }
    }

    pub fn can_build(&self) -> bool {
        self.build.is_some()
    }
}

impl fmt::Debug for FamilyGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FamilyGenerator({})", self.kind.as_str())
    }
}

/// Map `p0 ↦ μ_{p0}`, tabulated on finitely many initial vectors.
#[derive(Clone, Debug)]
pub struct ProcessFamily {
    grid: TimeGrid,
    n: usize,
    members: BTreeMap<ProbVector, TrajectoryMeasure>,
    generator: Option<FamilyGenerator>,
}

impl ProcessFamily {
    /// Checks that every member has the shared grid and `μ(0) = p0`.
    pub fn from_members(
        grid: TimeGrid,
        n: usize,
        members: BTreeMap<ProbVector, TrajectoryMeasure>,
        generator: Option<FamilyGenerator>,
    ) -> Result<Self> {
        for (p0, mu) in &members {
            if mu.grid() != &grid || mu.n_configs() != n {
                return Err(Error::GridMismatch(format!("member at {p0} has a different grid or n")));
            }
            if mu.marginal_vector(0)? != *p0 {
                return Err(Error::InvalidFamily(format!("member at {p0} starts at {}", mu.marginal_vector(0)?)));
            }
        }
        Ok(ProcessFamily { grid, n, members, generator })
    }

    /// Tabulates `generator` on the rational grid with denominators up to `g`
    /// (vertices included).
    pub fn tabulate(grid: TimeGrid, n: usize, generator: FamilyGenerator, g: usize) -> Result<Self> {
        let build = generator.build.clone().ok_or_else(|| Error::ExtensionUnavailable("tabulation".into()))?;
        let mut members = BTreeMap::new();
        for p0 in simplex_grid(n, g) {
            let mu = build(&p0)?;
            members.insert(p0, mu);
        }
        ProcessFamily::from_members(grid, n, members, Some(generator))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generator(&self) -> Option<&FamilyGenerator> {
        self.generator.as_ref()
    }

    pub fn members(&self) -> &BTreeMap<ProbVector, TrajectoryMeasure> {
        &self.members
    }

    /// Tabulated member, or one built by the generator.
    pub fn member(&self, p0: &ProbVector) -> Result<TrajectoryMeasure> {
        if let Some(mu) = self.members.get(p0) {
            return Ok(mu.clone());
        }
        match self.generator.as_ref().and_then(|g| g.build.as_ref()) {
            Some(build) => build(p0),
            None => Err(Error::ExtensionUnavailable(p0.to_string())),
        }
    }

    /// Marginals of every tabulated member, as a tabulated dynamics.
    pub fn induced_dynamics(&self) -> Result<ProbabilityDynamics> {
        let entries = self.members.iter().map(|(p0, mu)| (p0.clone(), mu.marginal_trajectory().points().to_vec())).collect();
        ProbabilityDynamics::tabulated(self.grid.clone(), self.n, entries)
    }
}

/// `μ` reproduces `traj` as its one-time marginals.
pub fn implements(mu: &TrajectoryMeasure, traj: &VectorTrajectory) -> Result<bool> {
    if traj.points().len() != mu.grid().len() {
        return Err(Error::LengthMismatch { expected: mu.grid().len(), found: traj.points().len() });
    }
    if traj.grid() != mu.grid() {
        return Err(Error::GridMismatch("trajectory and measure use different grids".into()));
    }
    if traj.n() != mu.n_configs() {
        return Ok(false);
    }
    Ok((0..traj.points().len()).all(|p| mu.marginal_table(&[p]) == traj.at_position(p).entries()))
}

/// Every tabulated member implements the solution of `dynamics` from its `p0`.
pub fn family_implements(fam: &ProcessFamily, dynamics: &ProbabilityDynamics) -> Result<bool> {
    if fam.grid() != dynamics.grid() || fam.n() != dynamics.n() {
        return Err(Error::GridMismatch("family and dynamics differ in grid or n".into()));
    }
    for (p0, mu) in fam.members() {
        let traj = VectorTrajectory::new(fam.grid().clone(), dynamics.solution(p0)?)?;
        if !implements(mu, &traj)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Two members whose `M_{p0}(t)_{ij}` disagree where both are defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionWitness {
    pub t: Time,
    pub i: usize,
    pub j: usize,
    pub p0: ProbVector,
    pub q0: ProbVector,
    pub value_p: Scalar,
    pub value_q: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransitionConstancy {
    /// Common `M(t)` per grid time; entries stay undefined only if no member defines them.
    Constant {
        common: Vec<PartialStochasticMatrix>,
    },
    NotConstant(TransitionWitness),
}

impl TransitionConstancy {
    pub fn holds(&self) -> bool {
        matches!(self, TransitionConstancy::Constant { .. })
    }

    /// The common matrices as a family, when every entry is defined.
    pub fn common_family(&self, grid: &TimeGrid) -> Option<MatrixFamily> {
        let TransitionConstancy::Constant { common } = self else {
            return None;
        };
        let ms = common.iter().map(PartialStochasticMatrix::to_stochastic).collect::<Option<Vec<_>>>()?;
        MatrixFamily::new(grid.clone(), ms).ok()
    }
}

/// Compares `μ_{p0}(E_i(t) | E_j(0))` across all tabulated members.
pub fn is_transition_constant(fam: &ProcessFamily) -> Result<TransitionConstancy> {
    let n = fam.n();
    let mut common = Vec::with_capacity(fam.grid().len());
    for &t in fam.grid().times() {
        let mut entries: Vec<Option<(Scalar, &ProbVector)>> = vec![None; n * n];
        for (p0, mu) in fam.members() {
            let m = mu.transition_matrix(t, 0)?;
            for i in 0..n {
                for j in 0..n {
                    let Some(v) = m.get(i, j) else { continue };
                    match &entries[i * n + j] {
                        Some((seen, q0)) if seen != v => {
                            return Ok(TransitionConstancy::NotConstant(TransitionWitness {
                                t,
                                i,
                                j,
                                p0: (*q0).clone(),
                                q0: p0.clone(),
                                value_p: seen.clone(),
                                value_q: v.clone(),
                            }));
                        }
                        Some(_) => {}
                        None => entries[i * n + j] = Some((v.clone(), p0)),
                    }
                }
            }
        }
        common.push(PartialStochasticMatrix::new(n, entries.into_iter().map(|e| e.map(|(v, _)| v)).collect())?);
    }
    Ok(TransitionConstancy::Constant { common })
}

/// Product measure `μ(ω) = Π_t p_{ω(t)}(t)`; always Markovian.
pub fn markov_implementation(traj: &VectorTrajectory) -> Result<TrajectoryMeasure> {
    let points = traj.points();
    TrajectoryMeasure::from_fn(traj.grid().clone(), traj.n(), |w| {
        let mut acc = Scalar::one();
        for (p, &c) in points.iter().zip(w) {
            let v = p.get(c);
            if v.is_zero() {
                return Scalar::zero();
            }
            acc = &acc * v;
        }
        acc
    })
}

/// Which perturbation the non-Markovian construction used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationCase {
    /// The middle time has interior entries; eight cells are perturbed.
    InteriorMiddle,
    /// The middle time sits on a vertex; four cells are perturbed.
    VertexMiddle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonMarkovConstruction {
    pub measure: TrajectoryMeasure,
    /// The three grid times whose joint law was perturbed.
    pub times: [Time; 3],
    pub case: PerturbationCase,
    pub epsilon: Scalar,
}

fn first_two(p: &ProbVector) -> [usize; 2] {
    let idx = p.interior_indices();
    [idx[0], idx[1]]
}

/// Non-Markovian implementation of a non-degenerate trajectory.
///
/// The three-time joint law at the first qualifying times `k1 < k2 < k3` is
/// the product law shifted by `±ε` on a checkerboard of cells, which leaves
/// every two-time marginal intact but breaks the Markov condition. All other
/// times stay independent.
pub fn non_markov_construction(traj: &VectorTrajectory) -> Result<NonMarkovConstruction> {
    if !traj.is_non_degenerate() {
        return Err(Error::DegenerateTrajectory);
    }
    let interior = traj.interior_positions();
    let k1 = interior[0];
    let k2 = k1 + 1;
    let k3 = *interior.iter().find(|&&p| p > k2).expect("non-degenerate");
    let (a, b, c) = (traj.at_position(k1), traj.at_position(k2), traj.at_position(k3));
    let n = traj.n();
    let js = first_two(a);
    let ns = first_two(c);

    let mut k = vec![Scalar::zero(); n * n * n];
    let cell = |x: usize, y: usize, z: usize| (x * n + y) * n + z;
    // (cell, +1 or -1)
    let mut perturbed: Vec<(usize, bool)> = Vec::new();
    let case = if b.interior_indices().is_empty() {
        let mid = b.vertex_index().expect("entries are 0 or 1");
        for x in 0..n {
            for z in 0..n {
                k[cell(x, mid, z)] = a.get(x) * c.get(z);
            }
        }
        for (ai, &x) in js.iter().enumerate() {
            for (ci, &z) in ns.iter().enumerate() {
                perturbed.push((cell(x, mid, z), (ai + 1 + 1 + ci + 1) % 2 == 1));
            }
        }
        PerturbationCase::VertexMiddle
    } else {
        let ls = first_two(b);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    k[cell(x, y, z)] = a.get(x) * b.get(y) * c.get(z);
                }
            }
        }
        for (ai, &x) in js.iter().enumerate() {
            for (bi, &y) in ls.iter().enumerate() {
                for (ci, &z) in ns.iter().enumerate() {
                    perturbed.push((cell(x, y, z), (ai + bi + ci + 3) % 2 == 1));
                }
            }
        }
        PerturbationCase::InteriorMiddle
    };
    let epsilon = perturbed
        .iter()
        .map(|&(idx, plus)| if plus { Scalar::one() - &k[idx] } else { k[idx].clone() })
        .min()
        .expect("perturbed cells")
        * Scalar::ratio(1, 2);
    for &(idx, plus) in &perturbed {
        if plus {
            k[idx] += &epsilon;
        } else {
            k[idx] -= &epsilon;
        }
    }

    let points = traj.points();
    let measure = TrajectoryMeasure::from_fn(traj.grid().clone(), n, |w| {
        let mut acc = k[cell(w[k1], w[k2], w[k3])].clone();
        for (pos, &cfg) in w.iter().enumerate() {
            if acc.is_zero() {
                return acc;
            }
            if pos != k1 && pos != k2 && pos != k3 {
                acc = &acc * points[pos].get(cfg);
            }
        }
        acc
    })?;
    let times = traj.grid().times();
    Ok(NonMarkovConstruction { measure, times: [times[k1], times[k2], times[k3]], case, epsilon })
}

/// The measure of [`non_markov_construction`].
pub fn non_markov_implementation(traj: &VectorTrajectory) -> Result<TrajectoryMeasure> {
    Ok(non_markov_construction(traj)?.measure)
}

/// `μ_{p0}(ω) = p0_{ω(0)} Π_{t>0} P(t)_{ω(t), ω(0)}`.
pub fn transition_constant_measure(fam: &MatrixFamily, p0: &ProbVector) -> Result<TrajectoryMeasure> {
    if p0.len() != fam.n() {
        return Err(Error::DimensionMismatch { expected: fam.n(), found: p0.len() });
    }
    let ms: Vec<&StochasticMatrix> = fam.matrices().iter().collect();
    TrajectoryMeasure::from_fn(fam.grid().clone(), fam.n(), |w| {
        let start = w[0];
        let mut acc = p0.get(start).clone();
        for (pos, &cfg) in w.iter().enumerate().skip(1) {
            if acc.is_zero() {
                return acc;
            }
            acc = &acc * ms[pos].get(cfg, start);
        }
        acc
    })
}

/// Family whose conditionals given the initial configuration are `P(t)` for every `p0`.
pub fn transition_constant_family(fam: &MatrixFamily) -> Result<ProcessFamily> {
    transition_constant_family_with_grid(fam, DEFAULT_GRID_DENOMINATOR)
}

pub fn transition_constant_family_with_grid(fam: &MatrixFamily, g: usize) -> Result<ProcessFamily> {
    let owned = fam.clone();
    let generator = FamilyGenerator::new(GeneratorKind::TransitionConstant, move |p0| transition_constant_measure(&owned, p0));
    ProcessFamily::tabulate(fam.grid().clone(), fam.n(), generator, g)
}

/// Product-measure implementation of every solution of `dynamics`.
pub fn markov_family(dynamics: &ProbabilityDynamics) -> Result<ProcessFamily> {
    let owned = dynamics.clone();
    let generator = FamilyGenerator::new(GeneratorKind::MarkovProduct, move |p0| {
        markov_implementation(&VectorTrajectory::new(owned.grid().clone(), owned.solution(p0)?)?)
    });
    family_over_points(dynamics, generator)
}

/// Non-Markovian implementation of every non-degenerate solution; degenerate
/// solutions only admit Markovian implementations and get the product measure.
pub fn non_markov_family(dynamics: &ProbabilityDynamics) -> Result<ProcessFamily> {
    let owned = dynamics.clone();
    let generator = FamilyGenerator::new(GeneratorKind::NonMarkovEps, move |p0| {
        let traj = VectorTrajectory::new(owned.grid().clone(), owned.solution(p0)?)?;
        match non_markov_implementation(&traj) {
            Err(Error::DegenerateTrajectory) => markov_implementation(&traj),
            other => other,
        }
    });
    family_over_points(dynamics, generator)
}

fn family_over_points(dynamics: &ProbabilityDynamics, generator: FamilyGenerator) -> Result<ProcessFamily> {
    let build = generator.build.clone().expect("constructed with a builder");
    let mut members = BTreeMap::new();
    for p0 in dynamics.evaluation_points(DEFAULT_GRID_DENOMINATOR) {
        let mu = build(&p0)?;
        members.insert(p0, mu);
    }
    ProcessFamily::from_members(dynamics.grid().clone(), dynamics.n(), members, Some(generator))
}

/// Finite mixture over initial vectors; conditioning on an index recovers
/// that member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerRepresentation {
    grid: TimeGrid,
    n: usize,
    support: Vec<(ProbVector, Scalar)>,
    /// `joint[k][ω] = w_k · μ_{p_k}(ω)`.
    joint: Vec<Vec<Scalar>>,
}

impl InnerRepresentation {
    pub fn support(&self) -> &[(ProbVector, Scalar)] {
        &self.support
    }

    pub fn joint(&self, traj: &[usize], k: usize) -> Result<Scalar> {
        let idx = crate::trajectory::trajectory_index(self.n, self.grid.len(), traj)?;
        Ok(self.joint[k][idx].clone())
    }

    /// `μ(ω | k)`.
    pub fn conditional_on(&self, k: usize) -> Result<TrajectoryMeasure> {
        let w = &self.support[k].1;
        TrajectoryMeasure::from_dense(self.grid.clone(), self.n, self.joint[k].iter().map(|x| x / w).collect())
    }

    /// Marginal on trajectories, averaging over the support.
    pub fn trajectory_marginal(&self) -> Result<TrajectoryMeasure> {
        let size = self.joint[0].len();
        let table = (0..size).map(|i| self.joint.iter().map(|row| &row[i]).sum()).collect();
        TrajectoryMeasure::from_dense(self.grid.clone(), self.n, table)
    }
}

pub fn finite_inner_representation(fam: &ProcessFamily, support: &[(ProbVector, Scalar)]) -> Result<InnerRepresentation> {
    if support.is_empty() || support.iter().any(|(_, w)| !w.is_positive()) {
        return Err(Error::BadWeights);
    }
    if !support.iter().map(|(_, w)| w).sum::<Scalar>().is_one() {
        return Err(Error::BadWeights);
    }
    let mut joint = Vec::with_capacity(support.len());
    for (p, w) in support {
        let mu = fam.members().get(p).ok_or_else(|| Error::UnknownSupportVector(p.to_string()))?;
        joint.push(mu.dense().iter().map(|x| x * w).collect());
    }
    Ok(InnerRepresentation { grid: fam.grid().clone(), n: fam.n(), support: support.to_vec(), joint })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::trajectory::EventSpec;

    fn traj(points: &[&[(i64, i64)]]) -> VectorTrajectory {
        let pts = points.iter().map(|p| ProbVector::from_ratios(p).unwrap()).collect::<Vec<_>>();
        VectorTrajectory::new(TimeGrid::contiguous(pts.len() as Time - 1), pts).unwrap()
    }

    #[test]
    fn product_weights() {
        let t = traj(&[&[(1, 2), (1, 2)], &[(1, 4), (3, 4)]]);
        let mu = markov_implementation(&t).unwrap();
        assert_eq!(*mu.weight(&[0, 1]).unwrap(), q(3, 8));
        assert!(implements(&mu, &t).unwrap());
        assert!(mu.is_markovian().unwrap().holds());
    }

    #[test]
    fn vertex_middle_case() {
        let t = traj(&[&[(1, 2), (1, 2)], &[(1, 1), (0, 1)], &[(1, 2), (1, 2)]]);
        let c = non_markov_construction(&t).unwrap();
        assert_eq!(c.case, PerturbationCase::VertexMiddle);
        assert_eq!(c.times, [0, 1, 2]);
        assert!(implements(&c.measure, &t).unwrap());
        let w = c.measure.is_markovian().unwrap();
        assert_eq!(w.witness().unwrap().times, vec![0, 1, 2]);
    }

    #[test]
    fn interior_middle_case() {
        let t = traj(&[&[(1, 2), (1, 2)], &[(1, 4), (3, 4)], &[(1, 2), (1, 2)]]);
        let c = non_markov_construction(&t).unwrap();
        assert_eq!(c.case, PerturbationCase::InteriorMiddle);
        assert!(c.epsilon.is_positive());
        assert!(implements(&c.measure, &t).unwrap());
        let mu = &c.measure;
        let full = mu.conditional(&EventSpec::at(2, 0), &EventSpec::at(1, 0).and(0, 0)).unwrap().unwrap();
        let last = mu.conditional(&EventSpec::at(2, 0), &EventSpec::at(1, 0)).unwrap().unwrap();
        assert_ne!(full, last);
    }

    #[test]
    fn degenerate_rejected() {
        let t = traj(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert_eq!(non_markov_construction(&t).unwrap_err(), Error::DegenerateTrajectory);
    }

    #[test]
    fn flip_family_member() {
        let flip = StochasticMatrix::from_ratio_rows(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]).unwrap();
        let fam = MatrixFamily::new(TimeGrid::contiguous(1), vec![StochasticMatrix::identity(2), flip]).unwrap();
        let mu = transition_constant_measure(&fam, &ProbVector::uniform(2)).unwrap();
        assert_eq!(*mu.weight(&[0, 1]).unwrap(), q(1, 2));
        let pf = transition_constant_family(&fam).unwrap();
        let v = is_transition_constant(&pf).unwrap();
        assert_eq!(v.common_family(pf.grid()).unwrap(), fam);
    }

    #[test]
    fn inner_representation_bad_inputs() {
        let fam = transition_constant_family_with_grid(&MatrixFamily::powers(&StochasticMatrix::identity(2), 1), 2).unwrap();
        let half = ProbVector::uniform(2);
        assert_eq!(finite_inner_representation(&fam, &[(half.clone(), q(1, 2))]).unwrap_err(), Error::BadWeights);
        let third = ProbVector::from_ratios(&[(1, 3), (2, 3)]).unwrap();
        assert!(matches!(finite_inner_representation(&fam, &[(third, q(1, 1))]), Err(Error::UnknownSupportVector(_))));
        let single = finite_inner_representation(&fam, &[(half.clone(), q(1, 1))]).unwrap();
        assert_eq!(single.conditional_on(0).unwrap(), fam.member(&half).unwrap());
    }

    #[test]
    fn extension_needs_generator() {
        let fam = transition_constant_family_with_grid(&MatrixFamily::powers(&StochasticMatrix::identity(2), 1), 2).unwrap();
        let p = ProbVector::from_ratios(&[(1, 7), (6, 7)]).unwrap();
        assert!(fam.member(&p).is_ok());
        let bare = ProcessFamily::from_members(fam.grid().clone(), 2, fam.members().clone(), None).unwrap();
        assert!(matches!(bare.member(&p), Err(Error::ExtensionUnavailable(_))));
    }
}
