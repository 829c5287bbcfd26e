//! JSON renderings of verdicts. Configurations are 1-based; matrices are
//! arrays of columns, with a row-wise `text` form for reading.

use nalgebra::DMatrix;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::dynamics::{
    decomposing_map_matrix, DecomposabilityVerdict, DecompositionMatrix, DivisibilityReport, DivisibilityStatus,
    DynamicsHomogeneity, LinearityVerdict, MatrixFamily, ProbabilityDynamics,
};
use crate::error::{Error, Result};
use crate::implementation::{is_transition_constant, ProcessFamily, TransitionConstancy};
use crate::io::MeasureFile;
use crate::scalar::Scalar;
use crate::simplex::{Matrix, PartialStochasticMatrix, ProbVector};
use crate::trajectory::{HomogeneityVerdict, MarkovVerdict, TrajectoryMeasure};

/// `[[a,b],[c,d]]`, listed by rows.
pub fn rows_text(m: &Matrix) -> String {
    let rows: Vec<String> = m.to_rows().iter().map(|r| format!("[{}]", join(r))).collect();
    format!("[{}]", rows.join(","))
}

fn join(v: &[Scalar]) -> String {
    v.iter().map(Scalar::to_string).collect::<Vec<_>>().join(",")
}

pub fn vector_text(p: &ProbVector) -> String {
    format!("({})", p.entries().iter().map(Scalar::to_string).collect::<Vec<_>>().join(", "))
}

/// Nearest fraction with denominator at most 12 when within `1e-9`,
/// otherwise nine decimals.
pub fn float_text(x: f64) -> String {
    for d in 1..=12i64 {
        let n = (x * d as f64).round();
        if (x - n / d as f64).abs() <= 1e-9 {
            let r = BigRational::new((n as i64).into(), d.into());
            return Scalar::from_rational(r).to_string();
        }
    }
    format!("{x:.9}")
}

pub fn float_rows_text(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> =
        m.row_iter().map(|r| format!("[{}]", r.iter().map(|&x| float_text(x)).collect::<Vec<_>>().join(","))).collect();
    format!("[{}]", rows.join(","))
}

pub fn float_columns(m: &DMatrix<f64>) -> Value {
    json!(m.column_iter().map(|c| c.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>())
}

pub fn matrix_json(m: &Matrix) -> Value {
    json!({"columns": m, "text": rows_text(m)})
}

pub fn partial_json(m: &PartialStochasticMatrix) -> Value {
    json!(m)
}

pub fn linearity_json(v: &LinearityVerdict) -> Value {
    match v {
        LinearityVerdict::Linear { family, on_grid } => json!({
            "linear": true,
            "on_grid": on_grid,
            "matrices": family.matrices().iter().map(|m| matrix_json(m.matrix())).collect::<Vec<_>>(),
        }),
        LinearityVerdict::NotLinear(w) => json!({
            "linear": false,
            "witness": {
                "t": w.t,
                "point": w.point,
                "components": w.components.iter().map(|(l, c)| json!({"weight": l, "vector": c})).collect::<Vec<_>>(),
                "lhs": w.lhs,
                "rhs": w.rhs,
                "text": format!("P_{}{} = {} != {}", w.t, vector_text(&w.point), vector_text(&w.lhs), vector_text(&w.rhs)),
            },
        }),
    }
}

pub fn decomposability_json(v: &DecomposabilityVerdict) -> Value {
    match v {
        DecomposabilityVerdict::Decomposable { maps, on_grid } => json!({
            "decomposable": true,
            "on_grid": on_grid,
            "maps": maps.iter().map(|m| json!({
                "t": m.t, "t_prime": m.t_prime, "domain": m.domain, "images": m.images,
            })).collect::<Vec<_>>(),
        }),
        DecomposabilityVerdict::NotDecomposable(w) => json!({
            "decomposable": false,
            "witness": {"t": w.t, "t_prime": w.t_prime, "p0": w.p0, "q0": w.q0},
        }),
    }
}

pub fn divisibility_json(r: &DivisibilityReport) -> Value {
    let pairs: Vec<Value> = r
        .pairs
        .iter()
        .map(|p| {
            let status = match &p.status {
                DivisibilityStatus::Divisible { factor } => {
                    json!({"status": "DIVISIBLE", "factor": matrix_json(factor.matrix())})
                }
                DivisibilityStatus::NotDivisible { certificate } => {
                    json!({"status": "NOT_DIVISIBLE", "farkas_certificate": certificate})
                }
                DivisibilityStatus::NotApplicable => json!({"status": "NOT_APPLICABLE"}),
            };
            let mut v = json!({"t": p.t, "t_prime": p.t_prime});
            v.as_object_mut().expect("object").extend(status.as_object().cloned().unwrap_or_default());
            v
        })
        .collect();
    json!({"divisible": r.is_divisible(), "pairs": pairs})
}

/// `P(t)·P(t')⁻¹` for every pair, where it exists.
pub fn candidates_json(fam: &MatrixFamily) -> Result<Value> {
    let mut out = Vec::new();
    for (t, tp) in crate::dynamics::pairs_below(fam.grid()) {
        let entry = match decomposing_map_matrix(fam, t, tp) {
            Ok(DecompositionMatrix::Matrix(m)) => {
                let stochastic = crate::simplex::StochasticMatrix::new(m.clone()).is_ok();
                json!({"t": t, "t_prime": tp, "candidate": matrix_json(&m), "stochastic": stochastic})
            }
            Ok(DecompositionMatrix::NoMatrixForm(_)) => {
                json!({"t": t, "t_prime": tp, "candidate": null, "reason": "P(t') is singular"})
            }
            Err(Error::NotDecomposable { .. }) => json!({"t": t, "t_prime": tp, "candidate": null, "reason": "not decomposable"}),
            Err(e) => return Err(e),
        };
        out.push(entry);
    }
    Ok(json!(out))
}

fn homogeneity_json(r: Result<DynamicsHomogeneity>) -> Result<Value> {
    Ok(match r {
        Ok(DynamicsHomogeneity::Homogeneous { on_grid }) => json!({"homogeneous": true, "on_grid": on_grid}),
        Ok(DynamicsHomogeneity::NotHomogeneous { t, t_prime, p0 }) => {
            json!({"homogeneous": false, "witness": {"t": t, "t_prime": t_prime, "p0": p0}})
        }
        Err(e @ Error::GridNotDifferenceClosed { .. }) => json!({"homogeneous": null, "reason": e.to_string()}),
        Err(e) => return Err(e),
    })
}

pub fn dynamics_report(d: &ProbabilityDynamics) -> Result<Value> {
    let linear = d.is_linear()?;
    let mut out = json!({
        "grid": d.grid().times(),
        "n": d.n(),
        "linearity": linearity_json(&linear),
        "decomposability": decomposability_json(&d.is_decomposable()?),
        "divisibility": divisibility_json(&d.divisibility()?),
        "time_homogeneity": homogeneity_json(d.is_time_homogeneous())?,
    });
    if let Some(fam) = linear.family() {
        out["decomposition_candidates"] = candidates_json(fam)?;
    }
    Ok(out)
}

pub fn markov_json(v: &MarkovVerdict) -> Value {
    match v {
        MarkovVerdict::Markovian => json!({"markovian": true}),
        MarkovVerdict::NotMarkovian(w) => json!({
            "markovian": false,
            "witness": {
                "times": w.times,
                "configs": w.configs.iter().map(|c| c + 1).collect::<Vec<_>>(),
                "full_history": w.full_history,
                "last_step": w.last_step,
            },
        }),
    }
}

pub fn measure_report(mu: &TrajectoryMeasure) -> Result<Value> {
    let times = mu.grid().times();
    let markov = mu.is_markovian()?;
    let homogeneity = match mu.is_time_homogeneous() {
        Ok(HomogeneityVerdict::Homogeneous) => json!({"homogeneous": true}),
        Ok(HomogeneityVerdict::NotHomogeneous { t, t_prime, i, j, shifted, base }) => json!({
            "homogeneous": false,
            "witness": {"t": t, "t_prime": t_prime, "i": i + 1, "j": j + 1, "shifted": shifted, "base": base},
        }),
        Err(e @ (Error::NotMarkovian | Error::GridNotDifferenceClosed { .. })) => {
            json!({"homogeneous": null, "reason": e.to_string()})
        }
        Err(e) => return Err(e),
    };
    let mut ck = Vec::new();
    for (t, tp) in crate::dynamics::pairs_below(mu.grid()) {
        if tp == 0 {
            continue;
        }
        let r = mu.check_chapman_kolmogorov(t, tp)?;
        let mismatch = r.mismatch.map(|(i, j, lhs, rhs)| json!({"i": i + 1, "j": j + 1, "direct": lhs, "composed": rhs}));
        ck.push(json!({"t": t, "t_prime": tp, "holds": r.holds, "mismatch": mismatch}));
    }
    let transitions = times
        .iter()
        .map(|&t| Ok(json!({"t": t, "matrix": partial_json(&mu.transition_matrix(t, 0)?)})))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "grid": times,
        "n": mu.n_configs(),
        "marginals": mu.marginal_trajectory().points(),
        "markov": markov_json(&markov),
        "time_homogeneity": homogeneity,
        "chapman_kolmogorov": ck,
        "transition_matrices_from_0": transitions,
    }))
}

pub fn transition_constancy_json(v: &TransitionConstancy) -> Value {
    match v {
        TransitionConstancy::Constant { common } => json!({
            "transition_constant": true,
            "common": common.iter().map(partial_json).collect::<Vec<_>>(),
        }),
        TransitionConstancy::NotConstant(w) => json!({
            "transition_constant": false,
            "witness": {
                "t": w.t, "i": w.i + 1, "j": w.j + 1,
                "p0": w.p0, "q0": w.q0, "value_p": w.value_p, "value_q": w.value_q,
            },
        }),
    }
}

pub fn family_report(fam: &ProcessFamily) -> Result<Value> {
    let members = fam
        .members()
        .iter()
        .map(|(p0, mu)| Ok(json!({"p0": p0, "markov": markov_json(&mu.is_markovian()?)})))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({
        "grid": fam.grid().times(),
        "n": fam.n(),
        "generator": fam.generator().map(|g| g.kind.as_str()),
        "transition_constancy": transition_constancy_json(&is_transition_constant(fam)?),
        "members": members,
        "induced_dynamics": dynamics_report(&fam.induced_dynamics()?)?,
    }))
}

pub fn measure_json(mu: &TrajectoryMeasure) -> Value {
    json!(MeasureFile::from_measure(mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::StochasticMatrix;

    #[test]
    fn text_forms() {
        let m = Matrix::from_ratio_rows(&[&[(1, 2), (3, 2)], &[(1, 2), (-1, 2)]]).unwrap();
        assert_eq!(rows_text(&m), "[[1/2,3/2],[1/2,-1/2]]");
        assert_eq!(float_text(0.5000000000001), "1/2");
        assert_eq!(float_text(-0.3535533905932738), "-0.353553391");
        assert_eq!(float_rows_text(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])), "[[0,1],[1,0]]");
    }

    #[test]
    fn example2_report_has_rejected_candidate() {
        let p1 = StochasticMatrix::from_ratio_rows(&[&[(1, 1), (1, 2)], &[(0, 1), (1, 2)]]).unwrap();
        let p2 = StochasticMatrix::from_ratio_rows(&[&[(1, 2), (1, 1)], &[(1, 2), (0, 1)]]).unwrap();
        let fam =
            MatrixFamily::new(crate::trajectory::TimeGrid::contiguous(2), vec![StochasticMatrix::identity(2), p1, p2]).unwrap();
        let r = dynamics_report(&ProbabilityDynamics::from_matrices(fam)).unwrap();
        assert_eq!(r["divisibility"]["divisible"], json!(false));
        let c = r["decomposition_candidates"].as_array().unwrap().iter().find(|c| c["t_prime"] == json!(1)).unwrap();
        assert_eq!(c["candidate"]["text"], json!("[[1/2,3/2],[1/2,-1/2]]"));
        assert_eq!(c["stochastic"], json!(false));
    }
}
