//! Golden-section search with a uniform pre-scan to pick the bracket.

/// Outcome of [`golden_section`].
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
    /// Final bracket width.
    pub width: f64,
    /// The pre-scan minimum sat on an end of the range.
    pub at_boundary: bool,
    /// `(x, f(x))` of every pre-scan node and search step, in order.
    pub trace: Vec<(f64, f64)>,
}

/// Minimizes `f` on `[lo, hi]`: `prescan` uniform nodes locate the best
/// neighbourhood, then golden-section narrows it below `tol`.
pub fn golden_section<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    prescan: usize,
    tol: f64,
) -> Result<GoldenResult, E> {
    let m = prescan.max(3);
    let mut trace = Vec::with_capacity(m + 64);
    let mut best = (0usize, f64::INFINITY);
    let nodes: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect();
    for (i, &x) in nodes.iter().enumerate() {
        let v = f(x)?;
        trace.push((x, v));
        if v < best.1 {
            best = (i, v);
        }
    }
    let at_boundary = best.0 == 0 || best.0 == m - 1;
    let (mut a, mut b) = (nodes[best.0.saturating_sub(1)], nodes[(best.0 + 1).min(m - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evals = m + 2;
    trace.push((c, fc));
    trace.push((d, fd));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
            trace.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
            trace.push((d, fd));
        }
        evals += 1;
    }
    let mut out = if fc <= fd { (c, fc) } else { (d, fd) };
    if best.1 < out.1 {
        out = (nodes[best.0], best.1);
    }
    Ok(GoldenResult { x: out.0, value: out.1, evaluations: evals, width: b - a, at_boundary, trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_minimum() {
        let r = golden_section::<()>(|a| Ok(a + 1.0 / a), 0.5, 2.0, 64, 1e-6).unwrap();
        assert!((r.x - 1.0).abs() < 1e-6 && !r.at_boundary);
        assert!(r.width <= 1e-6);
    }

    #[test]
    fn monotone_flags_boundary() {
        let r = golden_section::<()>(|a| Ok(a), 0.5, 2.0, 64, 1e-6).unwrap();
        assert!(r.at_boundary && (r.x - 0.5).abs() < 1e-6);
    }
}
