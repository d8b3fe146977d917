//! Derivative-free Nelder-Mead simplex minimiser, used by the
//! probability-weighted-moments solver.

pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

pub struct NelderMead {
    pub max_iter: usize,
    /// Stop when best value falls below this.
    pub value_tol: f64,
    /// Stop when the simplex diameter, relative to the point scale, falls
    /// below this.
    pub rel_step_tol: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self { max_iter: 600, value_tol: 1e-10, rel_step_tol: 1e-9 }
    }
}

impl NelderMead {
    pub fn minimize<F: FnMut(&[f64]) -> f64>(
        &self,
        mut f: F,
        start: &[f64],
        steps: &[f64],
    ) -> NelderMeadResult {
        let n = start.len();
        assert_eq!(n, steps.len());
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = f(start);
        simplex.push((start.to_vec(), v0));
        for i in 0..n {
            let mut x = start.to_vec();
            x[i] += steps[i];
            let v = f(&x);
            simplex.push((x, v));
        }

        let mut iterations = 0usize;
        let mut rel_step = f64::INFINITY;
        while iterations < self.max_iter {
            iterations += 1;
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let best = simplex[0].1;
            let worst = simplex[n].1;

            rel_step = simplex_diameter(&simplex) / point_scale(&simplex[0].0);
            if best < self.value_tol || rel_step < self.rel_step_tol {
                break;
            }

            // centroid of all but worst
            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }

            let reflect = blend(&centroid, &simplex[n].0, -1.0);
            let fr = f(&reflect);
            if fr < simplex[0].1 {
                let expand = blend(&centroid, &simplex[n].0, -2.0);
                let fe = f(&expand);
                simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            } else if fr < simplex[n - 1].1 {
                simplex[n] = (reflect, fr);
            } else {
                let contract_target = if fr < worst { &reflect } else { &simplex[n].0 };
                let contract = blend(&centroid, contract_target, 0.5);
                let fc = f(&contract);
                if fc < worst.min(fr) {
                    simplex[n] = (contract, fc);
                } else {
                    // shrink towards the best vertex
                    let best_x = simplex[0].0.clone();
                    for entry in simplex.iter_mut().skip(1) {
                        let x: Vec<f64> = entry
                            .0
                            .iter()
                            .zip(&best_x)
                            .map(|(xi, bi)| bi + 0.5 * (xi - bi))
                            .collect();
                        let v = f(&x);
                        *entry = (x, v);
                    }
                }
            }
        }
        let _ = rel_step;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        NelderMeadResult { x: simplex[0].0.clone(), value: simplex[0].1, iterations }
    }
}

fn blend(centroid: &[f64], other: &[f64], weight: f64) -> Vec<f64> {
    // centroid + weight (other - centroid)
    centroid
        .iter()
        .zip(other)
        .map(|(c, o)| c + weight * (o - c))
        .collect()
}

fn simplex_diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn point_scale(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).fold(1.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_quadratic_bowl() {
        let nm = NelderMead::default();
        let res = nm.minimize(
            |x| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &[0.5, 0.5],
        );
        assert!(res.value < 1e-10, "value {}", res.value);
        assert!((res.x[0] - 3.0).abs() < 1e-4);
        assert!((res.x[1] + 1.0).abs() < 1e-4);
    }

    #[test]
    fn minimises_rosenbrock_reasonably() {
        let nm = NelderMead { max_iter: 4000, value_tol: 1e-12, rel_step_tol: 1e-12 };
        let res = nm.minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.5, 0.5],
        );
        assert!((res.x[0] - 1.0).abs() < 1e-3, "x {:?}", res.x);
        assert!((res.x[1] - 1.0).abs() < 1e-3);
    }
}
