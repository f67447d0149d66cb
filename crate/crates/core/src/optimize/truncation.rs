//! Truncation non-optimality check: cut `F` by a ball, keep the inside piece,
//! dilate it back to `|F|` and compare energies.

use crate::anisotropy::SurfaceTension;
use crate::energy::{self, NonlocalTerm};
use crate::error::{Error, Result};
use crate::geometry::{self, P2};
use crate::nonlocal::{EnergyParams, QuadratureSpec};
use crate::shapes::{self, Polygon, Shape};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TruncationOptions {
    /// Radii of the cutting balls.
    pub rho: Vec<f64>,
    /// Ball centers; empty means the barycenter of `F` and of each component.
    pub centers: Vec<P2>,
    /// Volume threshold `delta` in `|F_2| <= delta min(1, eps^{-n/(n+1-alpha)})`.
    pub delta: f64,
    /// Vertices of the polygonal ball.
    pub ball_vertices: usize,
}

impl Default for TruncationOptions {
    fn default() -> Self {
        Self {
            rho: (1..=20).map(|k| 0.1 * k as f64).collect(),
            centers: Vec::new(),
            delta: 0.05,
            ball_vertices: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitOutcome {
    pub center: P2,
    pub rho: f64,
    pub volume_inside: f64,
    pub volume_outside: f64,
    pub perimeter_inside: f64,
    pub perimeter_outside: f64,
    /// One of the pieces is (numerically) empty.
    pub trivial: bool,
    /// `P_f(F_1) + P_f(F_2) - P_f(F) <= P_f(F_2) / 2`.
    pub small_gain: bool,
    /// `|F_2|` below the volume threshold.
    pub small_volume: bool,
    /// `E(F_1 dilated to |F|)`, evaluated when the split is admissible.
    pub energy_dilated: Option<f64>,
    /// `E(F_1 dilated) < E(F)`.
    pub improved: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub energy: f64,
    pub volume_threshold: f64,
    pub outcomes: Vec<SplitOutcome>,
    /// Some admissible split lowered the energy.
    pub certified: bool,
    /// Largest relative error of `P_f` of the polygonal balls against the disks.
    pub ball_perimeter_error: f64,
}

fn loops_of(e: &Shape) -> Result<Vec<Vec<P2>>> {
    match e {
        Shape::Polygon(_) | Shape::MultiPolygon(_) => Ok(e.polygons().unwrap().iter().map(|p| p.vertices().to_vec()).collect()),
        _ => Err(Error::Unsupported(format!("truncation of a {} (planar polygons only)", e.name()))),
    }
}

fn shape_of(pieces: Vec<Vec<P2>>) -> Result<Shape> {
    let mut polys: Vec<Polygon> = pieces.into_iter().filter(|p| p.len() >= 3).map(Polygon::new).collect::<Result<_>>()?;
    Ok(if polys.len() == 1 { Shape::Polygon(polys.pop().unwrap()) } else { Shape::MultiPolygon(polys) })
}

/// Runs the check for every center and radius.
pub fn truncation_check(
    f_set: &Shape,
    f: &SurfaceTension,
    term: NonlocalTerm,
    params: &EnergyParams,
    spec: &QuadratureSpec,
    opts: &TruncationOptions,
) -> Result<TruncationReport> {
    params.validate()?;
    if opts.rho.is_empty() || opts.rho.iter().any(|r| !(*r > 0.0)) || opts.ball_vertices < 8 || !(opts.delta > 0.0) {
        return Err(Error::InvalidParams("truncation needs positive radii, a positive delta and at least 8 ball vertices".into()));
    }
    let loops = loops_of(f_set)?;
    let base = energy::total_energy(f_set, f, term, params, spec)?;
    let vol = shapes::volume(f_set);
    let eps = params.epsilon();
    let (n, alpha) = (params.n as f64, params.alpha);
    let threshold = opts.delta * if eps > 0.0 { eps.powf(-n / (n + 1.0 - alpha)).min(1.0) } else { 1.0 };
    let centers: Vec<P2> = if opts.centers.is_empty() {
        let b = shapes::barycenter(f_set);
        let mut c = vec![[b[0], b[1]]];
        if loops.len() > 1 {
            for l in &loops {
                let m = geometry::first_moment(l);
                let a = geometry::signed_area(l);
                c.push([m[0] / a, m[1] / a]);
            }
        }
        c
    } else {
        opts.centers.clone()
    };
    let mut ball_error = 0.0f64;
    for &rho in &opts.rho {
        ball_error = ball_error.max(super::polygon_perimeter_error(f, rho, opts.ball_vertices)?);
    }
    let mut outcomes = Vec::new();
    for &c in &centers {
        for &rho in &opts.rho {
            let gon = Polygon::regular(c, rho, opts.ball_vertices)?;
            let gv = gon.vertices();
            let pieces: Vec<Vec<P2>> = loops.iter().flat_map(|l| geometry::intersect_with_convex(l, gv)).collect();
            let inside_vol: f64 = pieces.iter().map(|p| geometry::signed_area(p)).sum();
            let outside_vol = vol - inside_vol;
            let trivial = inside_vol <= 1e-12 * vol || outside_vol <= 1e-12 * vol;
            // Cut length: edges of the inside pieces lying on the ball boundary.
            let (mut cut_in, mut cut_out) = (0.0, 0.0);
            let mut p_in = 0.0;
            for p in &pieces {
                let m = p.len();
                for i in 0..m {
                    let (a, b) = (p[i], p[(i + 1) % m]);
                    let nrm = geometry::edge_normal(a, b);
                    p_in += f.eval2(nrm);
                    let on_ball = (0..gv.len()).any(|k| {
                        let (g0, g1) = (gv[k], gv[(k + 1) % gv.len()]);
                        let tol = 1e-10 * rho;
                        geometry::segment_distance(a, g0, g1) <= tol && geometry::segment_distance(b, g0, g1) <= tol
                    });
                    if on_ball {
                        cut_in += f.eval2(nrm);
                        cut_out += f.eval2([-nrm[0], -nrm[1]]);
                    }
                }
            }
            let p_out = if trivial && inside_vol <= 1e-12 * vol { base.perimeter } else { base.perimeter - (p_in - cut_in) + cut_out };
            let p_out = if trivial && outside_vol <= 1e-12 * vol { 0.0 } else { p_out };
            let small_gain = p_in + p_out - base.perimeter <= 0.5 * p_out;
            let small_volume = outside_vol <= threshold;
            let (energy_dilated, improved) = if !trivial && small_gain && small_volume {
                let hat = shapes::rescale_to_volume(&shape_of(pieces)?, vol)?;
                let e = energy::total_energy(&hat, f, term, params, spec)?;
                (Some(e.total), Some(e.total < base.total))
            } else {
                (None, None)
            };
            outcomes.push(SplitOutcome {
                center: c,
                rho,
                volume_inside: inside_vol,
                volume_outside: outside_vol,
                perimeter_inside: p_in,
                perimeter_outside: p_out,
                trivial,
                small_gain,
                small_volume,
                energy_dilated,
                improved,
            });
        }
    }
    let certified = outcomes.iter().any(|o| o.improved == Some(true));
    Ok(TruncationReport { energy: base.total, volume_threshold: threshold, outcomes, certified, ball_perimeter_error: ball_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wulff_square_is_never_improved() {
        let f = SurfaceTension::scaled_l1(2, 0.5).unwrap();
        let sq = Shape::polygon(vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]]).unwrap();
        let params = EnergyParams::with_epsilon(2, 1.0, 0.01).unwrap();
        let r = truncation_check(&sq, &f, NonlocalTerm::Riesz, &params, &QuadratureSpec::default(), &TruncationOptions::default())
            .unwrap();
        assert!(!r.certified);
        assert!(r.outcomes.iter().filter(|o| o.rho >= 0.75).all(|o| o.trivial));
    }

    #[test]
    fn perimeter_bookkeeping_on_halved_square() {
        // A ball of huge radius centred far left acts as a half-plane cut.
        let f = SurfaceTension::euclidean(2).unwrap();
        let sq = Shape::polygon(vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]).unwrap();
        let opts = TruncationOptions { rho: vec![1000.0 + 1.0], centers: vec![[-1000.0, 0.5]], ball_vertices: 4096, ..Default::default() };
        let params = EnergyParams::with_epsilon(2, 1.0, 0.0).unwrap();
        let r = truncation_check(&sq, &f, NonlocalTerm::None, &params, &QuadratureSpec::default(), &opts).unwrap();
        let o = &r.outcomes[0];
        assert!((o.volume_inside - 1.0).abs() < 1e-3);
        assert!((o.perimeter_inside - 4.0).abs() < 1e-3 && (o.perimeter_outside - 4.0).abs() < 1e-3, "{o:?}");
    }
}
