//! Exact feasibility for `A x = b, x >= 0` by the phase-1 simplex method.
//!
//! Pivoting follows Bland's rule: the entering column is the lowest-index
//! column with negative reduced cost, and ratio-test ties go to the basic
//! variable with the lowest index. Either a feasible point or a Farkas
//! certificate `y` with `yᵀA >= 0` and `yᵀb < 0` is returned.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simplex::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Scalar>),
    /// Farkas vector over the rows of `A`.
    Infeasible(Vec<Scalar>),
}

pub fn find_feasible(a: &Matrix, b: &[Scalar]) -> Result<Feasibility> {
    let m = a.rows();
    let nv = a.cols();
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b.len() });
    }
    let width = nv + m;
    let mut tab: Vec<Vec<Scalar>> = Vec::with_capacity(m);
    let mut rhs: Vec<Scalar> = Vec::with_capacity(m);
    let mut flipped = vec![false; m];
    for r in 0..m {
        let neg = b[r].is_negative();
        flipped[r] = neg;
        let mut row: Vec<Scalar> = a.row(r).iter().map(|v| if neg { -v } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == r { Scalar::one() } else { Scalar::zero() }));
        tab.push(row);
        rhs.push(if neg { -&b[r] } else { b[r].clone() });
    }
    let mut basis: Vec<usize> = (nv..width).collect();
    let cost = |j: usize| if j >= nv { Scalar::one() } else { Scalar::zero() };

    loop {
        let entering = (0..width).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let mut z = cost(j);
            for r in 0..m {
                if basis[r] >= nv && !tab[r][j].is_zero() {
                    z -= &tab[r][j];
                }
            }
            z.is_negative()
        });
        let Some(j) = entering else { break };

        let mut leave: Option<(usize, Scalar)> = None;
        for r in 0..m {
            if !tab[r][j].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &tab[r][j];
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        // The phase-1 objective is bounded below by 0, so a leaving row exists.
        let (pr, _) = leave.expect("phase-1 objective is bounded");
        pivot(&mut tab, &mut rhs, pr, j);
        basis[pr] = j;
    }

    let objective: Scalar = (0..m).filter(|&r| basis[r] >= nv).map(|r| rhs[r].clone()).sum();
    if objective.is_zero() {
        let mut x = vec![Scalar::zero(); nv];
        for r in 0..m {
            if basis[r] < nv {
                x[basis[r]] = rhs[r].clone();
            }
        }
        return Ok(Feasibility::Feasible(x));
    }
    // y = c_B B⁻¹, read from the artificial columns; the certificate is -y
    // mapped back through the row sign flips.
    let cert = (0..m)
        .map(|k| {
            let y: Scalar = (0..m).filter(|&r| basis[r] >= nv).map(|r| tab[r][nv + k].clone()).sum();
            if flipped[k] {
                y
            } else {
                -y
            }
        })
        .collect();
    Ok(Feasibility::Infeasible(cert))
}

fn pivot(tab: &mut [Vec<Scalar>], rhs: &mut [Scalar], pr: usize, pc: usize) {
    let inv = tab[pr][pc].recip().expect("pivot element is positive");
    for v in tab[pr].iter_mut() {
        if !v.is_zero() {
            *v = &*v * &inv;
        }
    }
    rhs[pr] = &rhs[pr] * &inv;
    let prow = tab[pr].clone();
    let prhs = rhs[pr].clone();
    for r in 0..tab.len() {
        if r == pr || tab[r][pc].is_zero() {
            continue;
        }
        let f = tab[r][pc].clone();
        for (v, p) in tab[r].iter_mut().zip(&prow) {
            if !p.is_zero() {
                *v -= &(&f * p);
            }
        }
        rhs[r] -= &(&f * &prhs);
    }
}

/// `A x = b` with `x >= 0`.
pub fn is_feasible_point(a: &Matrix, b: &[Scalar], x: &[Scalar]) -> bool {
    x.len() == a.cols() && x.iter().all(|v| !v.is_negative()) && a.mul_vec(x).is_ok_and(|ax| ax == b)
}

/// `yᵀA >= 0` entrywise and `yᵀb < 0`.
pub fn is_farkas_certificate(a: &Matrix, b: &[Scalar], y: &[Scalar]) -> bool {
    if y.len() != a.rows() || b.len() != a.rows() {
        return false;
    }
    let ya = a.transpose().mul_vec(y).expect("dimensions checked");
    let yb: Scalar = y.iter().zip(b).map(|(u, v)| u * v).sum();
    ya.iter().all(|v| !v.is_negative()) && yb.is_negative()
}
