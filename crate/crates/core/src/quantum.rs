//! Unitary quantum evolution seen through Born probabilities.
//!
//! Everything here is floating point. Two quantities are equal when they
//! differ by at most [`TOLERANCE`] entrywise.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::trajectory::{Time, TimeGrid};

pub const TOLERANCE: f64 = 1e-9;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

fn real_close(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| close(*x, *y))
}

fn complex_close(a: &CMatrix, b: &CMatrix) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= TOLERANCE)
}

pub fn is_unitary(u: &CMatrix) -> bool {
    u.is_square() && complex_close(&(u.adjoint() * u), &CMatrix::identity(u.nrows(), u.ncols()))
}

fn require_unitary(u: &CMatrix) -> Result<()> {
    if !u.is_square() {
        return Err(Error::NotUnitary(format!("{}x{} matrix is not square", u.nrows(), u.ncols())));
    }
    let defect = (u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols())).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > TOLERANCE {
        return Err(Error::NotUnitary(format!("‖U†U − I‖ = {defect:e}")));
    }
    Ok(())
}

/// Real rotation `((cos θ, −sin θ), (sin θ, cos θ))`.
pub fn rotation(theta: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    CMatrix::from_row_slice(2, 2, &[c.into(), (-s).into(), s.into(), c.into()])
}

/// Unit vector in `ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(CVector);

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm_squared();
        if !close(norm, 1.0) {
            return Err(Error::NotNormalized { sum: norm.to_string() });
        }
        Ok(PureState(amplitudes))
    }

    pub fn from_amplitudes(amplitudes: &[Complex64]) -> Result<Self> {
        PureState::new(CVector::from_column_slice(amplitudes))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        PureState::new(CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&a| a.into())))
    }

    /// `|i⟩`, 0-based.
    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = CVector::zeros(d);
        v[i] = Complex64::new(1.0, 0.0);
        PureState(v)
    }

    /// `(|1⟩ + |2⟩)/√2` on a qubit.
    pub fn plus() -> Self {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        PureState(CVector::from_column_slice(&[a, a]))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    pub fn evolve(&self, u: &CMatrix) -> Result<PureState> {
        if u.ncols() != self.dim() {
            return Err(Error::WrongDimension { expected: self.dim(), found: u.ncols() });
        }
        PureState::new(u * &self.0)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.0 * self.0.adjoint()
    }
}

/// `|⟨b_i|ψ⟩|²` for the orthonormal basis given by the columns of `basis`.
pub fn born_vector(psi: &PureState, basis: &CMatrix) -> Result<Vec<f64>> {
    require_unitary(basis)?;
    if basis.nrows() != psi.dim() {
        return Err(Error::WrongDimension { expected: psi.dim(), found: basis.nrows() });
    }
    let amps = basis.adjoint() * psi.amplitudes();
    let p: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let sum: f64 = p.iter().sum();
    if !close(sum, 1.0) {
        return Err(Error::NotNormalized { sum: sum.to_string() });
    }
    Ok(p)
}

/// Born probabilities in the standard basis.
pub fn born_standard(psi: &PureState) -> Vec<f64> {
    psi.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

/// `t ↦ U(t)` on a time grid with `U(0) = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryFamily {
    grid: TimeGrid,
    matrices: Vec<CMatrix>,
}

impl UnitaryFamily {
    pub fn new(grid: TimeGrid, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: matrices.len() });
        }
        let d = matrices[0].nrows();
        for m in &matrices {
            if m.nrows() != d {
                return Err(Error::WrongDimension { expected: d, found: m.nrows() });
            }
            require_unitary(m)?;
        }
        if !complex_close(&matrices[0], &CMatrix::identity(d, d)) {
            return Err(Error::NotUnitary("U(0) must be the identity".into()));
        }
        Ok(UnitaryFamily { grid, matrices })
    }

    /// `U(t)` is the rotation by `angles[t]` on the grid `0..=len`.
    pub fn rotations(angles: &[f64]) -> Result<Self> {
        let mut ms = vec![CMatrix::identity(2, 2)];
        ms.extend(angles.iter().map(|&a| rotation(a)));
        UnitaryFamily::new(TimeGrid::contiguous(angles.len() as Time), ms)
    }

    pub fn identity(grid: TimeGrid, d: usize) -> Self {
        let matrices = vec![CMatrix::identity(d, d); grid.len()];
        UnitaryFamily { grid, matrices }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn at(&self, t: Time) -> Result<&CMatrix> {
        Ok(&self.matrices[self.grid.require(t)?])
    }

    /// `U(t←t') = U(t) U(t')⁻¹`.
    pub fn relative(&self, t: Time, t_prime: Time) -> Result<CMatrix> {
        Ok(self.at(t)? * self.at(t_prime)?.adjoint())
    }

    /// `P(t) = conj(U(t)) ⊙ U(t)` at every grid time.
    pub fn transition_matrices(&self) -> Vec<DMatrix<f64>> {
        self.matrices.iter().map(schur_hadamard_square).collect()
    }
}

fn schur_hadamard_square(u: &CMatrix) -> DMatrix<f64> {
    u.map(|z| z.norm_sqr())
}

/// Entrywise `|U_ij|²`, a column-stochastic matrix.
pub fn unistochastic_of(u: &CMatrix) -> Result<DMatrix<f64>> {
    require_unitary(u)?;
    Ok(schur_hadamard_square(u))
}

/// `t ↦ born(U(t) ψ)` over the grid.
pub fn born_trajectory(psi: &PureState, u: &UnitaryFamily) -> Result<Vec<Vec<f64>>> {
    u.matrices.iter().map(|m| Ok(born_standard(&psi.evolve(m)?))).collect()
}

/// One grid time of [`quantum_linearity_violation`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearityViolation {
    pub t: Time,
    /// `p_ψ(t) − λ p_φ(t) − (1−λ) p_χ(t)`.
    pub difference: Vec<f64>,
    pub magnitude: f64,
    /// Interference terms `2 Re(a b̄ ⟨i|Uφ⟩ conj⟨i|Uχ⟩)`; present when
    /// `ψ = aφ + bχ` with `|a|² = λ` and `|b|² = 1 − λ`.
    pub cross_terms: Option<Vec<f64>>,
}

impl LinearityViolation {
    /// Cross terms, when defined, reproduce the difference.
    pub fn is_consistent(&self) -> bool {
        self.cross_terms.as_ref().is_none_or(|c| c.iter().zip(&self.difference).all(|(a, b)| close(*a, *b)))
    }
}

/// `ψ = aφ + bχ` by least squares over the span of `φ, χ`.
fn superposition_coefficients(psi: &PureState, phi: &PureState, chi: &PureState) -> Option<(Complex64, Complex64)> {
    let (f, c, p) = (phi.amplitudes(), chi.amplitudes(), psi.amplitudes());
    let gram = nalgebra::Matrix2::new(f.dotc(f), f.dotc(c), c.dotc(f), c.dotc(c));
    let rhs = nalgebra::Vector2::new(f.dotc(p), c.dotc(p));
    let sol = gram.try_inverse()? * rhs;
    let (a, b) = (sol[0], sol[1]);
    let residual = (f * a + c * b - p).norm();
    (residual <= TOLERANCE).then_some((a, b))
}

pub fn quantum_linearity_violation(
    u: &UnitaryFamily,
    lambda: f64,
    phi: &PureState,
    chi: &PureState,
    psi: &PureState,
) -> Result<Vec<LinearityViolation>> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::LambdaOutOfRange(lambda.to_string()));
    }
    let d = u.dim();
    for s in [phi, chi, psi] {
        if s.dim() != d {
            return Err(Error::WrongDimension { expected: d, found: s.dim() });
        }
    }
    let mix = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect() };
    let initial_ok = born_standard(psi).iter().zip(mix(&born_standard(phi), &born_standard(chi))).all(|(x, y)| close(*x, y));
    if !initial_ok {
        return Err(Error::PreconditionFailed("born(ψ) is not the λ-mixture of born(φ) and born(χ) at time 0".into()));
    }
    let coeffs = superposition_coefficients(psi, phi, chi)
        .filter(|(a, b)| close(a.norm_sqr(), lambda) && close(b.norm_sqr(), 1.0 - lambda));
    u.grid
        .times()
        .iter()
        .zip(&u.matrices)
        .map(|(&t, m)| {
            let (up, uf, uc) = (psi.evolve(m)?, phi.evolve(m)?, chi.evolve(m)?);
            let expected = mix(&born_standard(&uf), &born_standard(&uc));
            let difference: Vec<f64> = born_standard(&up).iter().zip(&expected).map(|(x, y)| x - y).collect();
            let magnitude = difference.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let cross_terms = coeffs
                .map(|(a, b)| (0..d).map(|i| 2.0 * (a * b.conj() * uf.amplitudes()[i] * uc.amplitudes()[i].conj()).re).collect());
            Ok(LinearityViolation { t, difference, magnitude, cross_terms })
        })
        .collect()
}

/// Hermitian, unit-trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotDensityMatrix("not square".into()));
        }
        if !complex_close(&m, &m.adjoint()) {
            return Err(Error::NotDensityMatrix("not Hermitian".into()));
        }
        let trace = m.trace();
        if !close(trace.re, 1.0) || !close(trace.im, 0.0) {
            return Err(Error::NotDensityMatrix(format!("trace {trace}")));
        }
        let min = m.clone().symmetric_eigenvalues().min();
        if min < -TOLERANCE {
            return Err(Error::NotDensityMatrix(format!("eigenvalue {min:e}")));
        }
        Ok(DensityMatrix(m))
    }

    pub fn pure(psi: &PureState) -> Self {
        DensityMatrix(psi.projector())
    }

    /// `diag(p)`.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        DensityMatrix::new(CMatrix::from_diagonal(&CVector::from_iterator(p.len(), p.iter().map(|&x| x.into()))))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// `tr(|i⟩⟨i| ϱ)`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.0.diagonal().iter().map(|z| z.re).collect()
    }

    /// `U ϱ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        require_unitary(u)?;
        if u.ncols() != self.dim() {
            return Err(Error::WrongDimension { expected: self.dim(), found: u.ncols() });
        }
        Ok(DensityMatrix(u * &self.0 * u.adjoint()))
    }

    pub fn mix(lambda: f64, a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::WrongDimension { expected: a.dim(), found: b.dim() });
        }
        DensityMatrix::new(a.0.scale(lambda) + b.0.scale(1.0 - lambda))
    }
}

/// `ϱ(t) = U(t) ϱ₀ U(t)†` and its diagonal.
pub fn density_evolution(rho0: &DensityMatrix, u: &UnitaryFamily, t: Time) -> Result<(DensityMatrix, Vec<f64>)> {
    let rho = rho0.conjugate_by(u.at(t)?)?;
    let p = rho.probabilities();
    Ok((rho, p))
}

/// Whether `diag(U ϱ U†) = (conj U ⊙ U) diag(ϱ)` at time `t`.
pub fn diagonal_evolution_commutes(rho0: &DensityMatrix, u: &UnitaryFamily, t: Time) -> Result<bool> {
    let (_, p) = density_evolution(rho0, u, t)?;
    let q = schur_hadamard_square(u.at(t)?) * DVector::from_vec(rho0.probabilities());
    Ok(p.iter().zip(q.iter()).all(|(a, b)| close(*a, *b)))
}

/// Born probabilities for the three Pauli bases:
/// `(z+, z−, x+, x−, y+, y−)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TomographicVector(pub [f64; 6]);

impl TomographicVector {
    pub fn entries(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn mix(lambda: f64, a: &Self, b: &Self) -> Self {
        TomographicVector(std::array::from_fn(|k| lambda * a.0[k] + (1.0 - lambda) * b.0[k]))
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| close(*a, *b))
    }

    /// Pairs sum to 1 and entries lie in `[0, 1]`.
    pub fn is_well_formed(&self) -> bool {
        self.0.chunks(2).all(|p| close(p[0] + p[1], 1.0)) && self.0.iter().all(|&v| (-TOLERANCE..=1.0 + TOLERANCE).contains(&v))
    }
}

fn require_qubit(d: usize) -> Result<()> {
    if d != 2 {
        return Err(Error::WrongDimension { expected: 2, found: d });
    }
    Ok(())
}

pub fn tomographic_vector(rho: &DensityMatrix) -> Result<TomographicVector> {
    require_qubit(rho.dim())?;
    let m = rho.matrix();
    let (a, d, c) = (m[(0, 0)].re, m[(1, 1)].re, m[(1, 0)]);
    // ⟨x±|ϱ|x±⟩ = 1/2 ± Re ϱ₂₁ and ⟨y±|ϱ|y±⟩ = 1/2 ± Im ϱ₂₁.
    Ok(TomographicVector([a, d, 0.5 + c.re, 0.5 - c.re, 0.5 + c.im, 0.5 - c.im]))
}

/// `ϱ = (I + xσx + yσy + zσz)/2` with Bloch components read from the pairs.
pub fn density_from_tomographic(v: &TomographicVector) -> Result<DensityMatrix> {
    if !v.is_well_formed() {
        return Err(Error::NotDensityMatrix("tomographic pairs must be probabilities".into()));
    }
    let [z0, z1, x0, x1, y0, y1] = v.0;
    let (z, x, y) = (z0 - z1, x0 - x1, y0 - y1);
    let off = Complex64::new(x, y) * 0.5;
    DensityMatrix::new(CMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new((1.0 + z) / 2.0, 0.0), off.conj(), off, Complex64::new((1.0 - z) / 2.0, 0.0)],
    ))
}

/// `V_t = φ ∘ (ϱ ↦ U(t)ϱU(t)†) ∘ φ⁻¹`.
pub fn evolve_tomographic(v: &TomographicVector, u: &UnitaryFamily, t: Time) -> Result<TomographicVector> {
    require_qubit(u.dim())?;
    let rho = density_from_tomographic(v)?;
    tomographic_vector(&rho.conjugate_by(u.at(t)?)?)
}

/// Outcome of comparing `SH(U(t)U(t')⁻¹)` with `P(t)P(t')⁻¹`.
#[derive(Clone, Debug, PartialEq)]
pub enum DiagramCheck {
    Commutes,
    DoesNotCommute {
        decomposed: DMatrix<f64>,
    },
    /// `P(t')` has no inverse.
    SingularIntermediate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterferenceDiscrepancy {
    pub t: Time,
    pub t_prime: Time,
    /// `P(t) − SH(U(t←t')) P(t')`.
    pub discrepancy: DMatrix<f64>,
    /// `Σ_{k≠l} conj(R_ik v_k) R_il v_l` with `R = U(t←t')`, `v = U(t')e_j`.
    pub cross_terms: DMatrix<f64>,
    pub identity_holds: bool,
    pub relative_square: DMatrix<f64>,
    pub diagram: DiagramCheck,
}

pub fn interference_discrepancy(u: &UnitaryFamily, t: Time, t_prime: Time) -> Result<InterferenceDiscrepancy> {
    if t_prime > t {
        return Err(Error::PreconditionFailed(format!("t' = {t_prime} exceeds t = {t}")));
    }
    let d = u.dim();
    let rel = u.relative(t, t_prime)?;
    let (ut, up) = (u.at(t)?, u.at(t_prime)?);
    let (pt, pp) = (schur_hadamard_square(ut), schur_hadamard_square(up));
    let relative_square = schur_hadamard_square(&rel);
    let discrepancy = &pt - &relative_square * &pp;
    let cross_terms = DMatrix::from_fn(d, d, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d {
            for l in 0..d {
                if k != l {
                    acc += (rel[(i, k)] * up[(k, j)]).conj() * rel[(i, l)] * up[(l, j)];
                }
            }
        }
        acc.re
    });
    let identity_holds = real_close(&discrepancy, &cross_terms);
    let diagram = if pp.determinant().abs() <= TOLERANCE {
        DiagramCheck::SingularIntermediate
    } else {
        let decomposed =
            &pt * pp.clone().try_inverse().ok_or_else(|| Error::PreconditionFailed("P(t') not invertible".into()))?;
        if real_close(&decomposed, &relative_square) {
            DiagramCheck::Commutes
        } else {
            DiagramCheck::DoesNotCommute { decomposed }
        }
    };
    Ok(InterferenceDiscrepancy { t, t_prime, discrepancy, cross_terms, identity_holds, relative_square, diagram })
}

/// Whether evolving straight to `t` and evolving via `t'` give the same Born vector.
pub fn quantum_decomposition_check(u: &UnitaryFamily, psi: &PureState, t: Time, t_prime: Time) -> Result<bool> {
    if t_prime > t {
        return Err(Error::PreconditionFailed(format!("t' = {t_prime} exceeds t = {t}")));
    }
    let direct = born_standard(&psi.evolve(u.at(t)?)?);
    let via = born_standard(&psi.evolve(u.at(t_prime)?)?.evolve(&u.relative(t, t_prime)?)?);
    Ok(direct.iter().zip(&via).all(|(a, b)| close(*a, *b)))
}

fn gaussian_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let (q, r) = gaussian_matrix(d, rng).qr().unpack();
    let mut q = q;
    for j in 0..d {
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let v = CVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    PureState(v / Complex64::new(n, 0.0))
}

/// `U(0) = I` and Haar-random unitaries elsewhere.
pub fn random_unitary_family<R: Rng + ?Sized>(grid: TimeGrid, d: usize, rng: &mut R) -> UnitaryFamily {
    let matrices = (0..grid.len()).map(|p| if p == 0 { CMatrix::identity(d, d) } else { random_unitary(d, rng) }).collect();
    UnitaryFamily { grid, matrices }
}

pub type StateSelector = Arc<dyn Fn(&[f64]) -> Result<PureState> + Send + Sync>;

/// `p0 ↦ born(U(t) Q(p0))` for a caller-chosen selection `Q` with
/// `born(Q(p0)) = p0`.
#[derive(Clone)]
pub struct QuantumProbabilityDynamics {
    unitaries: UnitaryFamily,
    select: StateSelector,
}

impl std::fmt::Debug for QuantumProbabilityDynamics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuantumProbabilityDynamics").field("unitaries", &self.unitaries).finish_non_exhaustive()
    }
}

impl QuantumProbabilityDynamics {
    pub fn new(unitaries: UnitaryFamily, select: impl Fn(&[f64]) -> Result<PureState> + Send + Sync + 'static) -> Self {
        QuantumProbabilityDynamics { unitaries, select: Arc::new(select) }
    }

    pub fn unitaries(&self) -> &UnitaryFamily {
        &self.unitaries
    }

    /// The selected state, checked against `p0`.
    pub fn state(&self, p0: &[f64]) -> Result<PureState> {
        let psi = (self.select)(p0)?;
        if psi.dim() != p0.len() {
            return Err(Error::WrongDimension { expected: p0.len(), found: psi.dim() });
        }
        if !born_standard(&psi).iter().zip(p0).all(|(a, b)| close(*a, *b)) {
            return Err(Error::PreconditionFailed("selected state does not reproduce p0".into()));
        }
        Ok(psi)
    }

    pub fn evaluate(&self, t: Time, p0: &[f64]) -> Result<Vec<f64>> {
        Ok(born_standard(&self.state(p0)?.evolve(self.unitaries.at(t)?)?))
    }

    /// `‖P(t, λp + (1−λ)q) − λP(t, p) − (1−λ)P(t, q)‖∞`.
    pub fn linearity_defect(&self, t: Time, lambda: f64, p: &[f64], q: &[f64]) -> Result<f64> {
        if p.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
        }
        let mixed: Vec<f64> = p.iter().zip(q).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let (lhs, ep, eq) = (self.evaluate(t, &mixed)?, self.evaluate(t, p)?, self.evaluate(t, q)?);
        Ok(lhs.iter().zip(ep.iter().zip(&eq)).map(|(l, (a, b))| (l - lambda * a - (1.0 - lambda) * b).abs()).fold(0.0, f64::max))
    }
}

/// `Q(p0) = Σ_i √p0_i |i⟩`, one admissible selection among many.
pub fn real_amplitude_selector(p0: &[f64]) -> Result<PureState> {
    if p0.iter().any(|&v| v < -TOLERANCE) {
        return Err(Error::PreconditionFailed("negative probability".into()));
    }
    PureState::from_real(&p0.iter().map(|v| v.max(0.0).sqrt()).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn eighth_turn_rotations() -> UnitaryFamily {
        UnitaryFamily::rotations(&[PI / 8.0, 3.0 * PI / 8.0]).unwrap()
    }

    #[test]
    fn born_examples() {
        let id = CMatrix::identity(2, 2);
        let p = born_vector(&PureState::plus(), &id).unwrap();
        assert!(close(p[0], 0.5) && close(p[1], 0.5));
        let s = PureState::from_real(&[(PI / 8.0).cos(), (PI / 8.0).sin()]).unwrap();
        assert!(close(born_vector(&s, &id).unwrap()[1], (PI / 8.0).sin().powi(2)));
        assert!(matches!(PureState::from_real(&[1.0, 1.0]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn plus_state_rotated_by_quarter_turn() {
        let u = UnitaryFamily::rotations(&[PI / 4.0]).unwrap();
        let traj = born_trajectory(&PureState::plus(), &u).unwrap();
        assert!(close(traj[1][0], 0.0) && close(traj[1][1], 1.0));
        let v =
            quantum_linearity_violation(&u, 0.5, &PureState::basis(2, 0), &PureState::basis(2, 1), &PureState::plus()).unwrap();
        assert!(close(v[0].magnitude, 0.0));
        assert!(close(v[1].magnitude, 0.5));
        assert!(close(v[1].difference[0], -0.5));
        assert!(v.iter().all(LinearityViolation::is_consistent));
        assert!(v[1].cross_terms.is_some());
    }

    #[test]
    fn precondition_is_checked() {
        let u = UnitaryFamily::rotations(&[PI / 4.0]).unwrap();
        let r = quantum_linearity_violation(&u, 0.3, &PureState::basis(2, 0), &PureState::basis(2, 1), &PureState::plus());
        assert!(matches!(r, Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn tomographic_examples() {
        let v1 = tomographic_vector(&DensityMatrix::pure(&PureState::basis(2, 0))).unwrap();
        assert!(v1.approx_eq(&TomographicVector([1.0, 0.0, 0.5, 0.5, 0.5, 0.5])));
        let vp = tomographic_vector(&DensityMatrix::pure(&PureState::plus())).unwrap();
        assert!(vp.approx_eq(&TomographicVector([0.5, 0.5, 1.0, 0.0, 0.5, 0.5])));
        let back = density_from_tomographic(&vp).unwrap();
        assert!(complex_close(back.matrix(), &PureState::plus().projector()));
        let three = DensityMatrix::diagonal(&[0.5, 0.25, 0.25]).unwrap();
        assert!(matches!(tomographic_vector(&three), Err(Error::WrongDimension { expected: 2, found: 3 })));
    }

    #[test]
    fn rotation_discrepancy() {
        let r = interference_discrepancy(&eighth_turn_rotations(), 2, 1).unwrap();
        assert!((r.discrepancy[(0, 0)] + 2f64.sqrt() / 4.0).abs() < 1e-12);
        assert!(r.identity_holds);
        assert!(real_close(&r.relative_square, &DMatrix::from_element(2, 2, 0.5)));
        match r.diagram {
            DiagramCheck::DoesNotCommute { decomposed } => {
                assert!(real_close(&decomposed, &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn singular_intermediate_still_reports() {
        let u = UnitaryFamily::rotations(&[PI / 4.0, PI / 3.0]).unwrap();
        let r = interference_discrepancy(&u, 2, 1).unwrap();
        assert_eq!(r.diagram, DiagramCheck::SingularIntermediate);
        assert!(r.identity_holds);
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..5 {
            assert!(is_unitary(&random_unitary(d, &mut rng)));
        }
    }

    #[test]
    fn selector_dynamics_is_not_linear() {
        let dynamics = QuantumProbabilityDynamics::new(UnitaryFamily::rotations(&[PI / 4.0]).unwrap(), real_amplitude_selector);
        assert!(close(dynamics.linearity_defect(1, 0.5, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.5));
        assert!(close(dynamics.linearity_defect(0, 0.5, &[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0));
    }
}
