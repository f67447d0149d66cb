//! Planar geometry kernels: predicates, polygon measures, clipping, splitting,
//! triangulation.
//!
//! Points are `[f64; 2]`. Polygons are vertex lists without a repeated closing
//! vertex; positive orientation means counter-clockwise.

pub type P2 = [f64; 2];

/// Relative tolerance for collinearity decisions.
pub const ORIENT_EPS: f64 = 1e-12;

#[inline]
pub fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}
#[inline]
pub fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}
#[inline]
pub fn scale(a: P2, s: f64) -> P2 {
    [a[0] * s, a[1] * s]
}
#[inline]
pub fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
#[inline]
pub fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
#[inline]
pub fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}
#[inline]
pub fn dist(a: P2, b: P2) -> f64 {
    norm(sub(a, b))
}
/// Counter-clockwise rotation by a right angle.
#[inline]
pub fn perp(a: P2) -> P2 {
    [-a[1], a[0]]
}
/// Outward normal (unnormalized, length = edge length) of a CCW edge `a -> b`.
#[inline]
pub fn edge_normal(a: P2, b: P2) -> P2 {
    [b[1] - a[1], a[0] - b[0]]
}

/// Sign of the orientation of `(a, b, c)`: `1` for a left turn, `-1` for a
/// right turn, `0` when collinear up to [`ORIENT_EPS`] relative to the lengths.
pub fn orientation(a: P2, b: P2, c: P2) -> i8 {
    let u = sub(b, a);
    let v = sub(c, a);
    let det = cross(u, v);
    let tol = ORIENT_EPS * norm(u) * norm(v);
    if det > tol {
        1
    } else if det < -tol {
        -1
    } else {
        0
    }
}

pub fn signed_area(poly: &[P2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

/// First moment `(int x, int y)` of a polygon, signed with its orientation.
pub fn first_moment(poly: &[P2]) -> P2 {
    let n = poly.len();
    let (mut mx, mut my) = (0.0, 0.0);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = cross(a, b);
        mx += (a[0] + b[0]) * c;
        my += (a[1] + b[1]) * c;
    }
    [mx / 6.0, my / 6.0]
}

pub fn perimeter_length(poly: &[P2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| dist(poly[i], poly[(i + 1) % n])).sum()
}

/// Even-odd point membership. Points on the boundary are classified arbitrarily.
pub fn point_in_polygon(poly: &[P2], p: P2) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

pub fn segment_distance(p: P2, a: P2, b: P2) -> f64 {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    if l2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0);
    dist(p, add(a, scale(ab, t)))
}

fn segments_cross(a: P2, b: P2, c: P2, d: P2) -> bool {
    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);
    if o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 {
        return true;
    }
    let on = |p: P2, q: P2, r: P2| {
        r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
    };
    (o1 == 0 && on(a, b, c)) || (o2 == 0 && on(a, b, d)) || (o3 == 0 && on(c, d, a)) || (o4 == 0 && on(c, d, b))
}

/// True when no two non-adjacent edges touch and no adjacent edges fold back.
pub fn is_simple(poly: &[P2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a == b {
            return false;
        }
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let c = poly[j];
            let d = poly[(j + 1) % n];
            if adjacent {
                // Shared vertex; reject only overlapping collinear fold-backs.
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if orientation(shared, p, q) == 0 && dot(sub(p, shared), sub(q, shared)) > 0.0 {
                    return false;
                }
            } else if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

pub fn is_convex_ccw(poly: &[P2]) -> bool {
    let n = poly.len();
    n >= 3 && (0..n).all(|i| orientation(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) >= 0)
}

fn remove_duplicates(poly: &mut Vec<P2>) {
    let scale_len = poly.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs())).max(1.0);
    let tol = 1e-14 * scale_len;
    let mut out: Vec<P2> = Vec::with_capacity(poly.len());
    for &p in poly.iter() {
        if out.last().is_none_or(|q| dist(*q, p) > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && dist(out[0], *out.last().unwrap()) <= tol {
        out.pop();
    }
    *poly = out;
}

/// Sutherland-Hodgman clip of a convex polygon to `{x : x.n <= c}`.
pub fn clip_convex_halfplane(poly: &[P2], n: P2, c: f64) -> Vec<P2> {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let sp = dot(p, n) - c;
        let sq = dot(q, n) - c;
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push(add(p, scale(sub(q, p), t)));
        }
    }
    remove_duplicates(&mut out);
    out
}

/// Intersection of half-planes `{x : x.n_i <= c_i}` inside the square
/// `[-bound, bound]^2`. Returns the CCW polygon, or an empty list.
pub fn halfplane_intersection(planes: &[(P2, f64)], bound: f64) -> Vec<P2> {
    let mut poly = vec![[-bound, -bound], [bound, -bound], [bound, bound], [-bound, bound]];
    for &(n, c) in planes {
        poly = clip_convex_halfplane(&poly, n, c);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    let mut cleaned: Vec<P2> = Vec::with_capacity(poly.len());
    let m = poly.len();
    for i in 0..m {
        let prev = poly[(i + m - 1) % m];
        let next = poly[(i + 1) % m];
        if orientation(prev, poly[i], next) != 0 {
            cleaned.push(poly[i]);
        }
    }
    cleaned
}

/// Pieces of a simple CCW polygon split by the line `x.nu = t`.
#[derive(Debug, Clone, Default)]
pub struct LineSplit {
    /// Components of `P cap {x.nu > t}`, each CCW.
    pub plus: Vec<Vec<P2>>,
    /// Components of `P cap {x.nu < t}`, each CCW.
    pub minus: Vec<Vec<P2>>,
    /// Length of `P cap {x.nu = t}`.
    pub cut_length: f64,
}

/// Splits a simple CCW polygon by a line into its connected pieces on either
/// side. Vertices within tolerance of the line belong to neither side.
pub fn split_polygon(poly: &[P2], nu: P2, t: f64) -> LineSplit {
    let scale_len = poly.iter().fold(0.0f64, |m, p| m.max(norm(*p))).max(t.abs()).max(1e-300);
    let tol = ORIENT_EPS * scale_len;
    let s: Vec<f64> = poly.iter().map(|p| dot(*p, nu) - t).collect();
    let (plus, chords_plus) = side_pieces(poly, &s, tol, nu);
    let neg: Vec<f64> = s.iter().map(|v| -v).collect();
    let (minus, _) = side_pieces(poly, &neg, tol, [-nu[0], -nu[1]]);
    let cut_length = chords_plus.iter().map(|(a, b)| dist(*a, *b)).sum();
    LineSplit { plus, minus, cut_length }
}

#[derive(Clone, Copy)]
enum Node {
    Vertex(P2),
    Entry(usize),
    Exit(usize),
}

/// Pieces of the polygon where `s > tol`, plus the chords along the cut line.
fn side_pieces(poly: &[P2], s: &[f64], tol: f64, nu: P2) -> (Vec<Vec<P2>>, Vec<(P2, P2)>) {
    let n = poly.len();
    let inside: Vec<bool> = s.iter().map(|&v| v > tol).collect();
    if inside.iter().all(|&b| b) {
        return (vec![poly.to_vec()], Vec::new());
    }
    if !inside.iter().any(|&b| b) {
        return (Vec::new(), Vec::new());
    }
    let mut nodes = Vec::with_capacity(n + 8);
    let mut points: Vec<P2> = Vec::new();
    let mut is_entry: Vec<bool> = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        if inside[i] {
            nodes.push(Node::Vertex(poly[i]));
        }
        if inside[i] != inside[j] {
            // Crossing parameter measured from the tolerance band edge.
            let (a, b) = (poly[i], poly[j]);
            let (sa, sb) = (s[i], s[j]);
            let lam = if (sa - sb).abs() > 0.0 { (sa / (sa - sb)).clamp(0.0, 1.0) } else { 0.5 };
            let p = add(a, scale(sub(b, a), lam));
            let id = points.len();
            points.push(p);
            is_entry.push(!inside[i]);
            nodes.push(if inside[i] { Node::Exit(id) } else { Node::Entry(id) });
        }
    }
    // Pair crossings along the cut line; chords alternate in/out.
    let dir = perp(nu);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| dot(points[a], dir).total_cmp(&dot(points[b], dir)).then(is_entry[a].cmp(&is_entry[b])));
    let mut partner = vec![usize::MAX; points.len()];
    let mut chords = Vec::new();
    for pair in order.chunks(2) {
        if pair.len() == 2 {
            partner[pair[0]] = pair[1];
            partner[pair[1]] = pair[0];
            chords.push((points[pair[0]], points[pair[1]]));
        }
    }
    let node_of: Vec<usize> = {
        let mut v = vec![0; points.len()];
        for (k, node) in nodes.iter().enumerate() {
            match node {
                Node::Entry(id) | Node::Exit(id) => v[*id] = k,
                Node::Vertex(_) => {}
            }
        }
        v
    };
    let mut used = vec![false; points.len()];
    let mut pieces = Vec::new();
    let total = nodes.len();
    for start in 0..points.len() {
        if !is_entry[start] || used[start] {
            continue;
        }
        let mut piece = Vec::new();
        let mut cur = start;
        let mut guard = 0;
        loop {
            used[cur] = true;
            piece.push(points[cur]);
            let mut k = (node_of[cur] + 1) % total;
            let exit = loop {
                match nodes[k] {
                    Node::Vertex(p) => piece.push(p),
                    Node::Exit(id) => break id,
                    Node::Entry(id) => break id,
                }
                k = (k + 1) % total;
            };
            used[exit] = true;
            piece.push(points[exit]);
            let next = partner[exit];
            guard += 1;
            if next == usize::MAX || next == start || used[next] || guard > points.len() {
                break;
            }
            cur = next;
        }
        remove_duplicates(&mut piece);
        if piece.len() >= 3 && signed_area(&piece) > tol * tol {
            pieces.push(piece);
        }
    }
    (pieces, chords)
}

/// Ear-clipping triangulation of a simple CCW polygon; returns index triples.
pub fn triangulate(poly: &[P2]) -> Vec<[usize; 3]> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    if is_convex_ccw(poly) {
        return (1..n - 1).map(|i| [0, i, i + 1]).collect();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n - 2);
    let mut guard = 0usize;
    while idx.len() > 3 && guard < 10 * n * n {
        guard += 1;
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = idx[(k + m - 1) % m];
            let ib = idx[k];
            let ic = idx[(k + 1) % m];
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            if orientation(a, b, c) <= 0 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                j != ia && j != ib && j != ic && {
                    let p = poly[j];
                    orientation(a, b, p) >= 0 && orientation(b, c, p) >= 0 && orientation(c, a, p) >= 0
                }
            });
            if !blocked {
                tris.push([ia, ib, ic]);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // Only collinear remnants remain; drop the flattest vertex.
            let m = idx.len();
            let k = (0..m)
                .min_by(|&x, &y| {
                    let area = |k: usize| {
                        cross(sub(poly[idx[k]], poly[idx[(k + m - 1) % m]]), sub(poly[idx[(k + 1) % m]], poly[idx[k]])).abs()
                    };
                    area(x).total_cmp(&area(y))
                })
                .unwrap();
            idx.remove(k);
        }
    }
    if idx.len() == 3 && orientation(poly[idx[0]], poly[idx[1]], poly[idx[2]]) > 0 {
        tris.push([idx[0], idx[1], idx[2]]);
    }
    tris
}

/// Convex hull (CCW, no collinear points) by the monotone chain.
pub fn convex_hull(points: &[P2]) -> Vec<P2> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<P2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(sub(lower[lower.len() - 1], lower[lower.len() - 2]), sub(p, lower[lower.len() - 2])) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(sub(upper[upper.len() - 1], upper[upper.len() - 2]), sub(p, upper[upper.len() - 2])) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Largest pairwise distance in a point set, via its convex hull.
pub fn point_set_diameter(points: &[P2]) -> f64 {
    let hull = convex_hull(points);
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in (i + 1)..hull.len() {
            best = best.max(dist(hull[i], hull[j]));
        }
    }
    best
}

/// `P cap C` for a simple CCW polygon `P` and a convex CCW polygon `C`,
/// as disjoint CCW pieces (successive exact line splits).
pub fn intersect_with_convex(poly: &[P2], convex: &[P2]) -> Vec<Vec<P2>> {
    let mut pieces = vec![poly.to_vec()];
    let m = convex.len();
    for i in 0..m {
        let a = convex[i];
        let b = convex[(i + 1) % m];
        let en = edge_normal(a, b);
        let len = norm(en);
        let nu = [-en[0] / len, -en[1] / len];
        let t = dot(nu, a);
        let mut next = Vec::new();
        for p in &pieces {
            next.extend(split_polygon(p, nu, t).plus);
        }
        pieces = next;
        if pieces.is_empty() {
            break;
        }
    }
    pieces
}

/// Area of the symmetric difference of two convex CCW polygons.
pub fn convex_symmetric_difference(a: &[P2], b: &[P2]) -> f64 {
    let mut inter = a.to_vec();
    let m = b.len();
    for i in 0..m {
        let p = b[i];
        let q = b[(i + 1) % m];
        let nrm = edge_normal(p, q);
        inter = clip_convex_halfplane(&inter, nrm, dot(nrm, p));
        if inter.len() < 3 {
            inter.clear();
            break;
        }
    }
    let ai = if inter.len() >= 3 { signed_area(&inter) } else { 0.0 };
    signed_area(a) + signed_area(b) - 2.0 * ai
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<P2> {
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn area_and_centroid_of_triangle() {
        let t = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!((signed_area(&t) - 0.5).abs() < 1e-15);
        let m = first_moment(&t);
        assert!((m[0] / 0.5 - 1.0 / 3.0).abs() < 1e-15);
        assert!((m[1] / 0.5 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn split_square_in_half() {
        let s = split_polygon(&square(), [1.0, 0.0], 0.5);
        assert_eq!(s.plus.len(), 1);
        assert_eq!(s.minus.len(), 1);
        assert!((signed_area(&s.plus[0]) - 0.5).abs() < 1e-15);
        assert!((signed_area(&s.minus[0]) - 0.5).abs() < 1e-15);
        assert!((s.cut_length - 1.0).abs() < 1e-15);
    }

    #[test]
    fn split_u_shape_into_two_prongs() {
        let u = vec![[0.0, 0.0], [3.0, 0.0], [3.0, 2.0], [2.0, 2.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let s = split_polygon(&u, [0.0, 1.0], 1.5);
        assert_eq!(s.plus.len(), 2);
        assert_eq!(s.minus.len(), 1);
        let plus_area: f64 = s.plus.iter().map(|p| signed_area(p)).sum();
        assert!((plus_area - 1.0).abs() < 1e-14);
        assert!((signed_area(&s.minus[0]) - 4.0).abs() < 1e-14);
        assert!((s.cut_length - 2.0).abs() < 1e-14);
    }

    #[test]
    fn miss_returns_one_side() {
        let s = split_polygon(&square(), [1.0, 0.0], 2.0);
        assert!(s.plus.is_empty());
        assert_eq!(s.minus.len(), 1);
        assert_eq!(s.cut_length, 0.0);
    }

    #[test]
    fn simplicity() {
        assert!(is_simple(&square()));
        let bow = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(!is_simple(&bow));
    }

    #[test]
    fn ear_clipping_covers_area() {
        let u = vec![[0.0, 0.0], [3.0, 0.0], [3.0, 2.0], [2.0, 2.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let tris = triangulate(&u);
        assert_eq!(tris.len(), u.len() - 2);
        let a: f64 = tris.iter().map(|t| signed_area(&[u[t[0]], u[t[1]], u[t[2]]])).sum();
        assert!((a - 5.0).abs() < 1e-14);
    }

    #[test]
    fn halfplanes_make_square() {
        let planes = [([1.0, 0.0], 0.5), ([-1.0, 0.0], 0.5), ([0.0, 1.0], 0.5), ([0.0, -1.0], 0.5)];
        let p = halfplane_intersection(&planes, 10.0);
        assert_eq!(p.len(), 4);
        assert!((signed_area(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shifted_square_symmetric_difference() {
        let a = square();
        let b: Vec<P2> = a.iter().map(|p| [p[0] + 0.1, p[1]]).collect();
        assert!((convex_symmetric_difference(&a, &b) - 0.2).abs() < 1e-14);
    }
}
