//! Probability vectors, exact matrices and stochastic matrices.
//!
//! Matrices act on column vectors: `p(t) = P(t) p(0)`, so every column of a
//! stochastic matrix is itself a probability vector.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point of the probability simplex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ProbVector(Vec<Scalar>);

impl ProbVector {
    /// Validates entries in `[0, 1]` summing exactly to 1.
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (index, v) in entries.iter().enumerate() {
            if !v.in_unit_interval() {
                return Err(Error::OutOfRange { index, value: v.to_string() });
            }
        }
        let sum: Scalar = entries.iter().sum();
        if !sum.is_one() {
            return Err(Error::NotNormalized { sum: sum.to_string() });
        }
        Ok(ProbVector(entries))
    }

    /// Builds from `(num, den)` pairs; convenience for fixtures and tests.
    pub fn from_ratios(entries: &[(i64, i64)]) -> Result<Self> {
        ProbVector::new(entries.iter().map(|&(n, d)| Scalar::ratio(n, d)).collect())
    }

    /// Parses `"n/d"` strings.
    pub fn parse(entries: &[&str]) -> Result<Self> {
        let v = entries.iter().map(|s| s.parse()).collect::<Result<Vec<Scalar>>>()?;
        ProbVector::new(v)
    }

    /// The vertex `e_j` (0-based).
    pub fn vertex(n: usize, j: usize) -> Self {
        assert!(j < n, "vertex index {j} out of range for dimension {n}");
        let mut v = vec![Scalar::zero(); n];
        v[j] = Scalar::one();
        ProbVector(v)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        ProbVector(vec![Scalar::ratio(1, n as i64); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.0
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    /// Index of the single unit entry, if this is a vertex.
    pub fn vertex_index(&self) -> Option<usize> {
        let pos = self.0.iter().position(|v| v.is_one())?;
        Some(pos)
    }

    pub fn is_vertex(&self) -> bool {
        self.vertex_index().is_some()
    }

    /// Indices with `0 < p_i < 1`, ascending.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i].is_strictly_interior()).collect()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(Scalar::to_f64).collect()
    }
}

impl fmt::Debug for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'de> Deserialize<'de> for ProbVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Scalar>::deserialize(d)?;
        ProbVector::new(raw).map_err(serde::de::Error::custom)
    }
}

/// `λp + (1−λ)q`.
pub fn convex_combine(lambda: &Scalar, p: &ProbVector, q: &ProbVector) -> Result<ProbVector> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: q.len() });
    }
    if !lambda.in_unit_interval() {
        return Err(Error::LambdaOutOfRange(lambda.to_string()));
    }
    let mu = Scalar::one() - lambda;
    let v = p.0.iter().zip(&q.0).map(|(a, b)| lambda * a + &mu * b).collect();
    Ok(ProbVector(v))
}

/// `Σ w_k p_k` for nonnegative weights summing to 1.
pub fn mixture(parts: &[(Scalar, ProbVector)]) -> Result<ProbVector> {
    let Some((_, first)) = parts.first() else {
        return Err(Error::BadWeights);
    };
    let n = first.len();
    let mut acc = vec![Scalar::zero(); n];
    let mut total = Scalar::zero();
    for (w, p) in parts {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if w.is_negative() {
            return Err(Error::BadWeights);
        }
        total += w;
        for (a, x) in acc.iter_mut().zip(p.entries()) {
            *a += w * x;
        }
    }
    if !total.is_one() {
        return Err(Error::BadWeights);
    }
    ProbVector::new(acc)
}

/// Least common denominator of the rational parts of the entries.
pub fn common_denominator(p: &ProbVector) -> num_bigint::BigInt {
    use num_integer::Integer;
    p.entries().iter().fold(num_bigint::BigInt::from(1), |acc, v| acc.lcm(v.rational_part().denom()))
}

/// Orders points by support size, then common denominator, then entries.
pub fn simplest_first(a: &ProbVector, b: &ProbVector) -> std::cmp::Ordering {
    a.support()
        .len()
        .cmp(&b.support().len())
        .then_with(|| common_denominator(a).cmp(&common_denominator(b)))
        .then_with(|| a.cmp(b))
}

/// Every simplex point whose entries share a denominator `d <= g`, in
/// [`simplest_first`] order.
pub fn simplex_grid(n: usize, g: usize) -> Vec<ProbVector> {
    let mut pts = std::collections::BTreeSet::new();
    for d in 1..=g {
        let mut comp = vec![0usize; n];
        compositions(n, 0, d, &mut comp, &mut |c| {
            let v = c.iter().map(|&k| Scalar::ratio(k as i64, d as i64)).collect();
            pts.insert(ProbVector(v));
        });
    }
    let mut out: Vec<ProbVector> = pts.into_iter().collect();
    out.sort_by(simplest_first);
    out
}

fn compositions(n: usize, pos: usize, left: usize, comp: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if pos + 1 == n {
        comp[pos] = left;
        f(comp);
        return;
    }
    for k in 0..=left {
        comp[pos] = k;
        compositions(n, pos + 1, left - k, comp, f);
    }
}

/// Dense exact matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn from_columns(cols: Vec<Vec<Scalar>>) -> Result<Self> {
        Ok(Matrix::from_rows(cols)?.transpose())
    }

    /// Row-major construction from `(num, den)` pairs.
    pub fn from_ratio_rows(rows: &[&[(i64, i64)]]) -> Result<Self> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&(n, d)| Scalar::ratio(n, d)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: rhs.rows });
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: rhs.rows * rhs.cols });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&f * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Exact inverse; `None` when singular or not square.
    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(Scalar::to_f64).collect()).collect()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serialized as an array of columns.
impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.columns().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cols = Vec::<Vec<Scalar>>::deserialize(d)?;
        Matrix::from_columns(cols).map_err(serde::de::Error::custom)
    }
}

/// Square matrix whose columns are probability vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StochasticMatrix(Matrix);

impl StochasticMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
        }
        for j in 0..m.cols() {
            ProbVector::new(m.column(j))?;
        }
        Ok(StochasticMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        StochasticMatrix(Matrix::identity(n))
    }

    pub fn from_ratio_rows(rows: &[&[(i64, i64)]]) -> Result<Self> {
        StochasticMatrix::new(Matrix::from_ratio_rows(rows)?)
    }

    /// Matrix with the given probability vectors as columns.
    pub fn from_prob_columns(cols: &[ProbVector]) -> Result<Self> {
        StochasticMatrix::new(Matrix::from_columns(cols.iter().map(|c| c.entries().to_vec()).collect())?)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        self.0.get(i, j)
    }

    pub fn column(&self, j: usize) -> ProbVector {
        ProbVector(self.0.column(j))
    }

    pub fn apply(&self, p: &ProbVector) -> Result<ProbVector> {
        Ok(ProbVector(self.0.mul_vec(p.entries())?))
    }

    pub fn mul(&self, rhs: &StochasticMatrix) -> Result<StochasticMatrix> {
        Ok(StochasticMatrix(self.0.mul(&rhs.0)?))
    }

    pub fn pow(&self, k: u32) -> StochasticMatrix {
        let mut acc = StochasticMatrix::identity(self.dim());
        for _ in 0..k {
            acc = acc.mul(self).expect("square");
        }
        acc
    }
}

impl fmt::Debug for StochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl fmt::Display for StochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&self.0, f)
    }
}

impl Serialize for StochasticMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StochasticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = Matrix::deserialize(d)?;
        StochasticMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

/// `P p` for a stochastic matrix.
pub fn apply_matrix(m: &StochasticMatrix, p: &ProbVector) -> Result<ProbVector> {
    m.apply(p)
}

/// Stochastic matrix in which some entries are undefined conditionals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialStochasticMatrix {
    n: usize,
    entries: Vec<Option<Scalar>>,
}

impl PartialStochasticMatrix {
    /// Row-major entries; `None` marks an undefined entry.
    pub fn new(n: usize, entries: Vec<Option<Scalar>>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        let m = PartialStochasticMatrix { n, entries };
        for j in 0..n {
            if let Some(col) = m.defined_column(j) {
                ProbVector::new(col)?;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Scalar> {
        self.entries[i * self.n + j].as_ref()
    }

    /// Column `j` when all its entries are defined.
    pub fn defined_column(&self, j: usize) -> Option<Vec<Scalar>> {
        (0..self.n).map(|i| self.get(i, j).cloned()).collect()
    }

    pub fn is_fully_defined(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    pub fn to_stochastic(&self) -> Option<StochasticMatrix> {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).cloned()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        StochasticMatrix::new(Matrix::from_rows(rows).ok()?).ok()
    }

    pub fn from_stochastic(m: &StochasticMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n * n).map(|k| Some(m.get(k / n, k % n).clone())).collect();
        PartialStochasticMatrix { n, entries }
    }

    /// True when every entry defined in both matrices agrees.
    pub fn agrees_where_defined(&self, other: &PartialStochasticMatrix) -> bool {
        self.n == other.n
            && self.entries.iter().zip(&other.entries).all(|(a, b)| match (a, b) {
                (Some(x), Some(y)) => x == y,
                _ => true,
            })
    }
}

impl fmt::Debug for PartialStochasticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                match self.get(i, j) {
                    Some(v) => write!(f, "{v}")?,
                    None => write!(f, "undefined")?,
                }
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for PartialStochasticMatrix {
    /// Columns of `"n/d"` strings, with `"undefined"` for missing entries.
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let cols: Vec<Vec<String>> = (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).map_or_else(|| "undefined".to_string(), Scalar::to_string)).collect())
            .collect();
        cols.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PartialStochasticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let cols = Vec::<Vec<String>>::deserialize(d)?;
        let n = cols.len();
        let mut entries = vec![None; n * n];
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(serde::de::Error::custom("partial matrix must be square"));
            }
            for (i, s) in col.iter().enumerate() {
                if s != "undefined" {
                    let v: Scalar = s.parse().map_err(serde::de::Error::custom)?;
                    entries[i * n + j] = Some(v);
                }
            }
        }
        PartialStochasticMatrix::new(n, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn validation_examples() {
        assert!(ProbVector::from_ratios(&[(1, 2), (1, 2)]).is_ok());
        assert!(ProbVector::from_ratios(&[(1, 4), (3, 4)]).is_ok());
        assert!(matches!(ProbVector::from_ratios(&[(1, 2), (3, 2)]), Err(Error::OutOfRange { index: 1, .. })));
        assert!(matches!(ProbVector::from_ratios(&[(3, 2), (-1, 2)]), Err(Error::OutOfRange { index: 0, .. })));
        assert!(matches!(ProbVector::from_ratios(&[(1, 2), (1, 4)]), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn apply_examples() {
        let p = ProbVector::from_ratios(&[(1, 3), (2, 3)]).unwrap();
        assert_eq!(apply_matrix(&StochasticMatrix::identity(2), &p).unwrap(), p);
        let flip = StochasticMatrix::from_ratio_rows(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]).unwrap();
        assert_eq!(apply_matrix(&flip, &p).unwrap(), ProbVector::from_ratios(&[(2, 3), (1, 3)]).unwrap());
        let p1 = StochasticMatrix::from_ratio_rows(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]).unwrap();
        assert_eq!(apply_matrix(&p1, &ProbVector::vertex(2, 1)).unwrap(), ProbVector::uniform(2));
    }

    #[test]
    fn combine_examples() {
        let e1 = ProbVector::vertex(2, 0);
        let e2 = ProbVector::vertex(2, 1);
        assert_eq!(convex_combine(&q(1, 2), &e1, &e2).unwrap(), ProbVector::uniform(2));
        assert_eq!(convex_combine(&Scalar::one(), &e1, &e2).unwrap(), e1);
        let r = convex_combine(&q(1, 3), &ProbVector::vertex(3, 0), &ProbVector::vertex(3, 2)).unwrap();
        assert_eq!(r, ProbVector::from_ratios(&[(1, 3), (0, 1), (2, 3)]).unwrap());
        assert!(matches!(convex_combine(&q(3, 2), &e1, &e2), Err(Error::LambdaOutOfRange(_))));
        assert!(matches!(convex_combine(&q(1, 2), &e1, &ProbVector::vertex(3, 0)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn non_stochastic_rejected() {
        let bad = Matrix::from_ratio_rows(&[&[(1, 2), (3, 2)], &[(1, 2), (-1, 2)]]).unwrap();
        assert!(StochasticMatrix::new(bad).is_err());
    }

    #[test]
    fn inverse_and_kernel() {
        let p1 = Matrix::from_ratio_rows(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]).unwrap();
        let inv = p1.inverse().unwrap();
        assert_eq!(inv, Matrix::from_ratio_rows(&[&[(1, 1), (-1, 1)], &[(0, 1), (2, 1)]]).unwrap());
        assert!(p1.mul(&inv).unwrap().is_identity());
        let sing = Matrix::from_ratio_rows(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]).unwrap();
        assert!(sing.inverse().is_none());
        assert_eq!(sing.rank(), 1);
        let k = sing.kernel();
        assert_eq!(k.len(), 1);
        assert!(sing.mul_vec(&k[0]).unwrap().iter().all(Scalar::is_zero));
    }

    #[test]
    fn grid_counts() {
        // Points with a common denominator up to 6 on the 2-simplex: the
        // distinct fractions k/d in [0,1] with d <= 6 number 13.
        assert_eq!(simplex_grid(2, 6).len(), 13);
        let g3 = simplex_grid(3, 6);
        assert!(g3[..3].iter().all(ProbVector::is_vertex));
        assert!(g3.iter().all(|p| p.entries().iter().sum::<Scalar>().is_one()));
    }

    #[test]
    fn partial_serialization() {
        let m = PartialStochasticMatrix::new(2, vec![Some(q(1, 1)), None, Some(q(0, 1)), None]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1","0"],["undefined","undefined"]]"#);
        let back: PartialStochasticMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_serializes_by_columns() {
        let p1 = StochasticMatrix::from_ratio_rows(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]).unwrap();
        assert_eq!(serde_json::to_string(&p1).unwrap(), r#"[["1","0"],["1/2","1/2"]]"#);
    }
}
