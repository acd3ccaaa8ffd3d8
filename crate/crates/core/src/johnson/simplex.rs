//! Nelder-Mead downhill simplex.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Stop once `f(worst) - f(best)` across the simplex falls below this.
    pub f_tolerance: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 2000,
            f_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0`, building the initial simplex by moving each
/// coordinate by its entry in `steps`. Non-finite objective values are
/// treated as +infinity.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    options: SimplexOptions,
) -> Simplex {
    let dim = x0.len();
    assert_eq!(dim, steps.len(), "one step per coordinate");
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    points.push(x0.to_vec());
    for (i, &s) in steps.iter().enumerate() {
        let mut p = x0.to_vec();
        p[i] += s;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p)).collect();
    let mut order: Vec<usize> = (0..=dim).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iterations {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (best, worst, second) = (order[0], order[dim], order[dim - 1]);
        if values[worst] - values[best] < options.f_tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for &k in &order[..dim] {
            for (c, v) in centroid.iter_mut().zip(&points[k]) {
                *c += v / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[worst])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = eval(&reflected);
        if fr < values[best] {
            let expanded = along(-2.0);
            let fe = eval(&expanded);
            if fe < fr {
                points[worst] = expanded;
                values[worst] = fe;
            } else {
                points[worst] = reflected;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            points[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[worst] {
            let c = along(-0.5);
            let fc = eval(&c);
            (c, fc)
        } else {
            let c = along(0.5);
            let fc = eval(&c);
            (c, fc)
        };
        if fc < values[worst].min(fr) {
            points[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        // Shrink toward the best point.
        let anchor = points[best].clone();
        for &k in &order[1..] {
            for (p, a) in points[k].iter_mut().zip(&anchor) {
                *p = a + 0.5 * (*p - a);
            }
            values[k] = eval(&points[k]);
        }
    }
    let best = (0..=dim)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty simplex");
    Simplex {
        x: points[best].clone(),
        f: values[best],
        iterations,
        converged,
    }
}
