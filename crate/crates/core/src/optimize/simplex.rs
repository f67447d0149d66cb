//! Nelder-Mead simplex descent.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Edge length of the initial simplex, per coordinate.
    pub step: f64,
    /// Stop when the spread of simplex values falls below this...
    pub ftol: f64,
    /// ...and the simplex diameter below this.
    pub xtol: f64,
    pub max_evals: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { step: 0.05, ftol: 1e-13, xtol: 1e-8, max_evals: 4000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each iteration.
    pub trace: Vec<f64>,
}

/// Minimizes `f` from `x0`. Non-finite values are treated as `+inf`.
pub fn nelder_mead(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: SimplexOptions) -> SimplexResult {
    let d = x0.len();
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut evals = 0;
    if d == 0 {
        let v = eval(x0, &mut evals);
        return SimplexResult { x: vec![], value: v, evaluations: 1, converged: true, trace: vec![v] };
    }
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..d {
        let mut p = x0.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();
    let mut trace = Vec::new();
    let mut converged = false;
    while evals < opts.max_evals {
        // Stable sort keeps ties in index order.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        trace.push(vals[0]);
        let spread = vals[d] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.is_finite() && spread <= opts.ftol * (1.0 + vals[0].abs()) && size <= opts.xtol {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|k| pts[..d].iter().map(|p| p[k]).sum::<f64>() / d as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..d).map(|k| centroid[k] + t * (pts[d][k] - centroid[k])).collect() };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[d] = xe;
                vals[d] = fe;
            } else {
                pts[d] = xr;
                vals[d] = fr;
            }
            continue;
        }
        if fr < vals[d - 1] {
            pts[d] = xr;
            vals[d] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[d] {
            let x = along(-0.5);
            let v = eval(&x, &mut evals);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x, &mut evals);
            (x, v)
        };
        if fc < vals[d].min(fr) {
            pts[d] = xc;
            vals[d] = fc;
            continue;
        }
        for i in 1..=d {
            let p: Vec<f64> = (0..d).map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k])).collect();
            vals[i] = eval(&p, &mut evals);
            pts[i] = p;
        }
    }
    let best = (0..=d).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult { x: pts[best].clone(), value: vals[best], evaluations: evals, converged, trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            SimplexOptions { step: 0.1, ftol: 1e-16, xtol: 1e-10, max_evals: 10_000 },
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn infinite_region_is_avoided() {
        let r = nelder_mead(
            |x| if x[0] < 0.2 { f64::NAN } else { (x[0] - 0.3).powi(2) },
            &[1.0],
            SimplexOptions::default(),
        );
        assert!((r.x[0] - 0.3).abs() < 1e-6);
    }
}
