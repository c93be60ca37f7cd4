//! Derivative-free minimization (Nelder-Mead) for the collapse objective.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Initial simplex edge length per coordinate.
    pub initial_step: Vec<f64>,
    /// Stop when the simplex diameter falls below this in every coordinate.
    pub param_tol: f64,
    /// Stop when the objective spread across the simplex falls below this.
    pub objective_tol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: vec![],
            param_tol: 1e-4,
            objective_tol: 1e-10,
            max_evals: 20_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// False when the eval budget ran out before the tolerances were met.
    pub converged: bool,
}

/// Standard Nelder-Mead with reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2. Deterministic: ties in the vertex ordering are broken by
/// insertion order, and no randomness is used anywhere.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    options: &NelderMeadOptions,
) -> Result<Minimum> {
    let n = start.len();
    if n == 0 {
        return Err(Error::Config("cannot optimize zero parameters".into()));
    }
    let step: Vec<f64> = if options.initial_step.is_empty() {
        start
            .iter()
            .map(|&x| if x.abs() > 1e-8 { 0.1 * x.abs() } else { 0.05 })
            .collect()
    } else if options.initial_step.len() == n {
        options.initial_step.clone()
    } else {
        return Err(Error::Config(format!(
            "initial_step has {} entries for {} parameters",
            options.initial_step.len(),
            n
        )));
    };

    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // simplex of n+1 vertices
    let mut verts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(start, &mut evals);
    verts.push((start.to_vec(), v0));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step[i];
        let v = eval(&p, &mut evals);
        verts.push((p, v));
    }

    let mut converged = false;
    while evals < options.max_evals {
        verts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = verts[n].1 - verts[0].1;
        let diameter = (0..n)
            .map(|i| {
                let lo = verts.iter().map(|(p, _)| p[i]).fold(f64::INFINITY, f64::min);
                let hi = verts.iter().map(|(p, _)| p[i]).fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .fold(0.0f64, f64::max);
        // both criteria must hold: a symmetric simplex can have zero value
        // spread while straddling the minimum. Exact equality also covers an
        // all-infinite simplex, whose spread is NaN.
        let spread_ok =
            verts[n].1 == verts[0].1 || spread.abs() < options.objective_tol;
        if spread_ok && diameter < options.param_tol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let centroid: Vec<f64> = (0..n)
            .map(|i| verts[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64)
            .collect();
        let worst = verts[n].clone();

        let reflect: Vec<f64> =
            (0..n).map(|i| centroid[i] + (centroid[i] - worst.0[i])).collect();
        let fr = eval(&reflect, &mut evals);

        if fr < verts[0].1 {
            let expand: Vec<f64> =
                (0..n).map(|i| centroid[i] + 2.0 * (centroid[i] - worst.0[i])).collect();
            let fe = eval(&expand, &mut evals);
            verts[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < verts[n - 1].1 {
            verts[n] = (reflect, fr);
        } else {
            let contracted: Vec<f64> = if fr < worst.1 {
                (0..n).map(|i| centroid[i] + 0.5 * (reflect[i] - centroid[i])).collect()
            } else {
                (0..n).map(|i| centroid[i] + 0.5 * (worst.0[i] - centroid[i])).collect()
            };
            let fc = eval(&contracted, &mut evals);
            if fc < fr.min(worst.1) {
                verts[n] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let best = verts[0].0.clone();
                for v in verts.iter_mut().skip(1) {
                    for i in 0..n {
                        v.0[i] = best[i] + 0.5 * (v.0[i] - best[i]);
                    }
                    v.1 = eval(&v.0, &mut evals);
                }
            }
        }
    }

    verts.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(Minimum { point: verts[0].0.clone(), value: verts[0].1, evals, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions { param_tol: 1e-8, ..Default::default() },
        )
        .unwrap();
        assert!(m.converged);
        assert!((m.point[0] - 3.0).abs() < 1e-5);
        assert!((m.point[1] + 1.0).abs() < 1e-5);
        assert!(m.value < 1e-9);
    }

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &NelderMeadOptions { param_tol: 1e-10, objective_tol: 1e-14, ..Default::default() },
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-4, "{:?}", m);
        assert!((m.point[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn one_dimensional() {
        let m = nelder_mead(|x| (x[0] - 0.25).powi(2), &[5.0], &Default::default()).unwrap();
        assert!((m.point[0] - 0.25).abs() < 1e-3);
    }

    #[test]
    fn deterministic_across_runs() {
        let run = || {
            nelder_mead(
                |x| x[0].powi(4) + x[1].powi(2) + 0.3 * (x[0] * x[1] - 1.0).powi(2),
                &[2.0, -2.0],
                &Default::default(),
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.point, b.point);
        assert_eq!(a.evals, b.evals);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &NelderMeadOptions {
                max_evals: 20,
                param_tol: 1e-12,
                objective_tol: 1e-16,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!m.converged);
        assert!(m.evals <= 25); // may finish the step in flight
    }

    #[test]
    fn nan_treated_as_worst() {
        let m = nelder_mead(
            |x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 1.0).powi(2) },
            &[2.0],
            &Default::default(),
        )
        .unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_empty_start() {
        assert!(nelder_mead(|_| 0.0, &[], &Default::default()).is_err());
    }
}
