//! Derivative-free Nelder–Mead simplex minimization.

/// Stopping rules for a single descent.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop once the spread of function values over the simplex is below this.
    pub f_tolerance: f64,
    /// Stop as soon as the best value reaches this target.
    pub target: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 1000,
            f_tolerance: 1e-12,
            target: f64::NEG_INFINITY,
            initial_step: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;

/// Expansion, contraction and shrink coefficients scaled with the dimension
/// (Gao and Han); they reduce to the classic 2, 1/2, 1/2 for `n = 2`.
fn adaptive_coefficients(n: usize) -> (f64, f64, f64) {
    let n = n.max(2) as f64;
    (1.0 + 2.0 / n, 0.75 - 0.5 / n, 1.0 - 1.0 / n)
}

/// Minimizes `f` from `start` with the standard reflect/expand/contract/shrink
/// moves.
pub fn minimize<F>(f: F, start: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let (expand, contract, shrink) = adaptive_coefficients(n);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += opts.initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];

    while iterations < opts.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second_worst) = (order[0], order[n], order[n - 1]);
        if values[best] <= opts.target || values[worst] - values[best] <= opts.f_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x / n as f64;
            }
        }

        let along = |coef: f64, out: &mut Vec<f64>, simplex: &Vec<Vec<f64>>| {
            for ((o, c), w) in out.iter_mut().zip(&centroid).zip(&simplex[worst]) {
                *o = c + coef * (c - w);
            }
        };

        along(REFLECT, &mut trial, &simplex);
        let f_reflect = f(&trial);

        if f_reflect < values[best] {
            along(expand, &mut trial2, &simplex);
            let f_expand = f(&trial2);
            if f_expand < f_reflect {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = f_expand;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = f_reflect;
            continue;
        }

        let (coef, reference) = if f_reflect < values[worst] {
            (contract, f_reflect)
        } else {
            (-contract, values[worst])
        };
        along(coef, &mut trial2, &simplex);
        let f_contract = f(&trial2);
        if f_contract < reference {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = f_contract;
            continue;
        }

        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + shrink * (*x - a);
            }
            values[idx] = f(&simplex[idx]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    SimplexResult {
        point: simplex[best].clone(),
        value: values[best],
        iterations,
        converged,
    }
}

/// Runs [`minimize`] repeatedly from the previous best point with a shrinking
/// initial step until a restart stops improving. Rebuilding the simplex guards
/// against premature collapse in higher dimensions.
pub fn minimize_with_restarts<F>(f: F, start: &[f64], opts: &SimplexOptions, rounds: usize) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let mut result = minimize(&f, start, opts);
    let mut total = result.iterations;
    let mut step = opts.initial_step;
    for _ in 1..rounds.max(1) {
        if result.value <= opts.target {
            break;
        }
        step *= 0.5;
        let next = minimize(
            &f,
            &result.point,
            &SimplexOptions {
                initial_step: step,
                ..*opts
            },
        );
        total += next.iterations;
        let improved = result.value - next.value > opts.f_tolerance;
        if next.value < result.value {
            result = next;
        }
        if !improved {
            break;
        }
    }
    result.iterations = total;
    result
}
