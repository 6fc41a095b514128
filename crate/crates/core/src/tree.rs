//! The Bruhat-Tits tree of `GL_2(K)` as a tree of closed balls, and a
//! brute-force oracle for branches of matrices.
//!
//! A vertex is a ball `B_c^[r] = { x : v(x - c) >= r }`. The ball `B_c^[r]`
//! corresponds to the maximal order `g M_2(O) g^{-1}` with
//! `g = [[c, t^r], [1, 0]]`, so `q` lies in that order exactly when
//! `g^{-1} q g` is integral.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{undetermined, Error, Result};
use crate::field::Field;
use crate::quaternion::Mat2;
use crate::series::Series;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub r: i64,
    /// Exact, supported in exponents `< r`.
    pub center: Series,
}

impl Vertex {
    /// `B_c^[r]`. An inexact center must be known modulo `t^r`.
    pub fn new(center: &Series, r: i64) -> Result<Vertex> {
        if let Some(p) = center.prec() {
            if p < r {
                return Err(undetermined(format!("ball of level {r} around a center known mod t^{p}")));
            }
        }
        Ok(Vertex { r, center: center.reduce_exact(r) })
    }

    pub fn root(field: Field) -> Vertex {
        Vertex { r: 0, center: Series::zero(field) }
    }

    pub fn field(&self) -> Field {
        self.center.field()
    }

    pub fn parent(&self) -> Vertex {
        Vertex { r: self.r - 1, center: self.center.reduce_exact(self.r - 1) }
    }

    pub fn children(&self) -> impl Iterator<Item = Vertex> + '_ {
        let f = self.field();
        f.elements().map(move |u| Vertex {
            r: self.r + 1,
            center: &self.center + &Series::monomial(f, u, self.r),
        })
    }

    pub fn neighbors(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.field().order() as usize + 1);
        out.push(self.parent());
        out.extend(self.children());
        out
    }

    /// Distance to the root `B_0^[0]`.
    pub fn norm(&self) -> i64 {
        let m = self.center.val().map_or(0.min(self.r), |v| v.min(0).min(self.r));
        self.r - 2 * m
    }

    /// `min(v(x - center), r)`: how far down the ray towards `x` this ball lies.
    pub fn agreement(&self, x: &Series) -> Result<i64> {
        (&self.center - x).val_capped(self.r)
    }

    pub fn contains_point(&self, x: &Series) -> Result<bool> {
        Ok(self.agreement(x)? >= self.r)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B[{}]({})", self.r, self.center)
    }
}

/// Parse `B[r](center)`.
pub fn parse_vertex(field: Field, s: &str) -> Result<Vertex> {
    let bad = || Error::Parse(format!("expected `B[r](center)`, got `{}`", s.trim()));
    let rest = s.trim().strip_prefix("B[").ok_or_else(bad)?;
    let (r, rest) = rest.split_once(']').ok_or_else(bad)?;
    let r: i64 = r.trim().parse().map_err(|_| bad())?;
    let center = rest.trim().strip_prefix('(').and_then(|c| c.strip_suffix(')')).ok_or_else(bad)?;
    Vertex::new(&crate::parse::parse_series(field, center)?, r)
}

impl Serialize for Vertex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Graph distance between two balls.
pub fn tree_distance(v1: &Vertex, v2: &Vertex) -> i64 {
    let diff = &v1.center - &v2.center;
    let mut m = v1.r.min(v2.r);
    if let Some(v) = diff.val() {
        m = m.min(v);
    }
    (v1.r - m) + (v2.r - m)
}

/// Number of vertices within distance `n` of a vertex in the
/// `(2^tau + 1)`-regular tree.
pub fn window_size(tau: u32, n: u32) -> u64 {
    let q = 1u64 << tau;
    let mut total = 1u64;
    let mut layer = q + 1;
    for _ in 0..n {
        total += layer;
        layer *= q;
    }
    total
}

/// Largest radius `enumerate_window` accepts by default.
pub fn default_cap(tau: u32) -> u32 {
    (10 / tau).max(2)
}

/// All vertices within distance `radius` of the root, in BFS order.
#[derive(Clone, Debug)]
pub struct Window {
    pub radius: u32,
    pub vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
}

impl Window {
    pub fn field(&self) -> Field {
        self.vertices[0].field()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Vertices at least `margin` away from the outer boundary layer.
    pub fn is_interior(&self, v: &Vertex, margin: u32) -> bool {
        v.norm() <= self.radius as i64 - margin as i64
    }
}

pub fn enumerate_window(field: Field, radius: u32) -> Result<Window> {
    enumerate_window_capped(field, radius, default_cap(field.tau()))
}

pub fn enumerate_window_capped(field: Field, radius: u32, cap: u32) -> Result<Window> {
    if radius > cap {
        return Err(Error::WindowCap { radius, cap });
    }
    let root = Vertex::root(field);
    let mut vertices = vec![root.clone()];
    let mut index = HashMap::new();
    index.insert(root, 0);
    let mut head = 0;
    while head < vertices.len() {
        let v = vertices[head].clone();
        head += 1;
        if v.norm() == radius as i64 {
            continue;
        }
        for w in v.neighbors() {
            if !index.contains_key(&w) {
                index.insert(w.clone(), vertices.len());
                vertices.push(w);
            }
        }
    }
    debug_assert_eq!(vertices.len() as u64, window_size(field.tau(), radius));
    Ok(Window { radius, vertices, index })
}

/// Whether `q` lies in the maximal order of `v`.
///
/// Expanding `g^{-1} q g` for `q = [[A, B], [C, D]]` and
/// `g = [[e, t^r], [1, 0]]` gives the entries
/// `Ce + D`, `t^r C`, `t^{-r}(Ce^2 + (A + D)e + B)` and `A + Ce`.
pub fn member(q: &Mat2, v: &Vertex) -> Result<bool> {
    if !q.is_exact() {
        return Err(Error::InexactInput);
    }
    Ok(member_exact(q, v))
}

fn member_exact(q: &Mat2, v: &Vertex) -> bool {
    let e = &v.center;
    if q.c.val_lower() < -v.r {
        return false;
    }
    let ce = &q.c * e;
    if (&ce + &q.a).val_lower() < 0 || (&ce + &q.d).val_lower() < 0 {
        return false;
    }
    let quad = &(&ce + &q.trace()) * e + q.b.clone();
    quad.val_lower() >= v.r
}

/// Membership by literal conjugation; slower, used to cross-check `member`.
pub fn member_by_conjugation(q: &Mat2, v: &Vertex) -> Result<bool> {
    let f = v.field();
    let g = Mat2::new(v.center.clone(), Series::pi_pow(f, v.r), Series::one(f), Series::zero(f));
    let conj = q.conjugate_by(&g)?;
    Ok(conj.is_integral_entries())
}

/// Indices of window vertices whose order contains `q`.
pub fn oracle_branch(q: &Mat2, w: &Window) -> Result<Vec<bool>> {
    if !q.is_exact() {
        return Err(Error::InexactInput);
    }
    Ok(w.vertices.iter().map(|v| member_exact(q, v)).collect())
}

/// Parameters for shape measurement: window radius, the margin a shape must
/// keep from the boundary, and how far local-depth searches may probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureConfig {
    pub radius: u32,
    pub margin: u32,
    pub probe: u32,
}

impl MeasureConfig {
    pub fn new(radius: u32, margin: u32) -> MeasureConfig {
        MeasureConfig { radius, margin, probe: 5 }
    }
}

/// Memoised membership of a single exact matrix, valid anywhere in the tree.
pub struct BranchOracle {
    q: Mat2,
    cache: HashMap<Vertex, bool>,
}

impl BranchOracle {
    pub fn new(q: &Mat2) -> Result<BranchOracle> {
        if !q.is_exact() {
            return Err(Error::InexactInput);
        }
        Ok(BranchOracle { q: q.clone(), cache: HashMap::new() })
    }

    pub fn member(&mut self, v: &Vertex) -> bool {
        if let Some(&b) = self.cache.get(v) {
            return b;
        }
        let b = member_exact(&self.q, v);
        self.cache.insert(v.clone(), b);
        b
    }

    /// Distance from `v` to the nearest vertex outside the branch, or `None`
    /// when no such vertex lies within `probe` steps.
    pub fn local_depth(&mut self, v: &Vertex, probe: u32) -> Option<i64> {
        local_depth_by(v, probe, |x| self.member(x))
    }
}

fn local_depth_by(v: &Vertex, probe: u32, mut inside: impl FnMut(&Vertex) -> bool) -> Option<i64> {
    if !inside(v) {
        return Some(0);
    }
    let mut seen: HashSet<Vertex> = HashSet::new();
    seen.insert(v.clone());
    let mut frontier = vec![v.clone()];
    for d in 1..=probe as i64 {
        let mut next = Vec::new();
        for x in &frontier {
            for y in x.neighbors() {
                if seen.insert(y.clone()) {
                    if !inside(&y) {
                        return Some(d);
                    }
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    None
}

/// Diameter of a vertex set of a tree by the double sweep.
pub fn diameter(set: &[Vertex]) -> Option<i64> {
    let first = set.first()?;
    let far = set.iter().max_by_key(|v| tree_distance(first, v))?;
    set.iter().map(|v| tree_distance(far, v)).max()
}

/// Minimum distance between two vertex sets, with every minimizing pair.
pub fn set_distance(a: &[Vertex], b: &[Vertex]) -> Option<(i64, Vec<(Vertex, Vertex)>)> {
    let mut best: Option<i64> = None;
    let mut pairs = Vec::new();
    for x in a {
        for y in b {
            let d = tree_distance(x, y);
            match best {
                Some(m) if d > m => {}
                Some(m) if d == m => pairs.push((x.clone(), y.clone())),
                _ => {
                    best = Some(d);
                    pairs = vec![(x.clone(), y.clone())];
                }
            }
        }
    }
    best.map(|d| (d, pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MeasuredKind {
    /// `q + sqrt(det q)` is nilpotent: the branch is its own stem.
    Foliage,
    ThickLine,
}

/// A branch as seen inside a window.
#[derive(Clone, Debug, Serialize)]
pub struct MeasuredShape {
    pub kind: MeasuredKind,
    pub vertex_set: Vec<Vertex>,
    pub stem: Vec<Vertex>,
    pub depth: Option<i64>,
    pub diameter: Option<i64>,
    /// Stem and depth are certified: the stem meets the window away from the
    /// boundary and every local depth was resolved within the probe.
    pub boundary_safe: bool,
}

fn is_foliage_matrix(q: &Mat2) -> bool {
    q.trace().is_exact_zero() && matches!(q.det().sqrt(), Ok(Some(_)))
}

/// Measure the branch of an exact integral non-scalar `q` inside `w`.
pub fn measure_branch(q: &Mat2, w: &Window, cfg: &MeasureConfig) -> Result<MeasuredShape> {
    let mut oracle = BranchOracle::new(q)?;
    measure_with(&mut oracle, w, cfg)
}

fn measure_with(oracle: &mut BranchOracle, w: &Window, cfg: &MeasureConfig) -> Result<MeasuredShape> {
    let members: Vec<Vertex> = w.vertices.iter().filter(|v| oracle.member(v)).cloned().collect();
    let diameter = if members.iter().all(|v| w.is_interior(v, cfg.margin)) {
        diameter(&members)
    } else {
        None
    };
    if is_foliage_matrix(&oracle.q) {
        return Ok(MeasuredShape {
            kind: MeasuredKind::Foliage,
            stem: members.clone(),
            vertex_set: members,
            depth: None,
            diameter,
            boundary_safe: true,
        });
    }
    let mut resolved = true;
    let mut best = i64::MIN;
    let mut stem = Vec::new();
    for v in &members {
        match oracle.local_depth(v, cfg.probe) {
            None => resolved = false,
            Some(d) if d > best => {
                best = d;
                stem = vec![v.clone()];
            }
            Some(d) if d == best => stem.push(v.clone()),
            Some(_) => {}
        }
    }
    let anchored = stem.iter().any(|v| w.is_interior(v, 1));
    Ok(MeasuredShape {
        kind: MeasuredKind::ThickLine,
        vertex_set: members,
        depth: (best > 0).then_some(best - 1),
        stem,
        diameter,
        boundary_safe: resolved && anchored,
    })
}

/// Shape of `stem(q1) ∩ stem(q2)` inside the window.
#[derive(Clone, Debug, Serialize)]
pub struct MeetShape {
    pub vertices: Vec<Vertex>,
    pub diameter: i64,
    /// No vertex within `margin` of the boundary, so the whole meet is visible.
    pub interior: bool,
    /// Every vertex has at most two neighbours in the meet.
    pub path_like: bool,
    /// Path endpoints (vertices of degree <= 1 in the meet) near the boundary.
    pub boundary_ends: usize,
    /// Depth and stem size of the meet, when it is interior.
    pub depth: Option<i64>,
    pub stem_size: Option<usize>,
}

/// Everything the pair oracle observes about two branches.
#[derive(Clone, Debug, Serialize)]
pub struct PairMeasure {
    pub b1: MeasuredShape,
    pub b2: MeasuredShape,
    pub config: MeasureConfig,
    /// `branch(q1) ∩ branch(q2) ∩ W` is empty.
    pub branches_disjoint_in_window: bool,
    pub stem_meet: Option<MeetShape>,
    /// Distance between the two stems when they do not meet in the window.
    pub stem_distance: Option<i64>,
    /// The minimizing pairs sit away from the boundary and both stems are certified.
    pub stem_distance_certified: bool,
    /// Within the window, one branch is contained in the other.
    pub branch_containment: bool,
}

fn meet_shape(
    verts: Vec<Vertex>,
    w: &Window,
    cfg: &MeasureConfig,
    inside: Option<&mut dyn FnMut(&Vertex) -> bool>,
) -> MeetShape {
    let set: HashSet<&Vertex> = verts.iter().collect();
    let mut path_like = true;
    let mut boundary_ends = 0;
    for v in &verts {
        let deg = v.neighbors().iter().filter(|n| set.contains(n)).count();
        if deg > 2 {
            path_like = false;
        }
        if deg <= 1 && !w.is_interior(v, cfg.margin) {
            boundary_ends += 1;
        }
    }
    let interior = verts.iter().all(|v| w.is_interior(v, cfg.margin));
    let diameter = diameter(&verts).unwrap_or(0);
    let (mut depth, mut stem_size) = (None, None);
    if let (true, Some(inside)) = (interior, inside) {
        let bound = diameter as u32 + 2;
        let lds: Vec<i64> = verts
            .iter()
            .map(|v| local_depth_by(v, bound, &mut *inside).expect("finite meet"))
            .collect();
        let m = lds.iter().copied().max().unwrap_or(0);
        depth = Some(m - 1);
        stem_size = Some(lds.iter().filter(|&&d| d == m).count());
    }
    MeetShape { vertices: verts, diameter, interior, path_like, boundary_ends, depth, stem_size }
}

/// Measure both branches and how their stems meet.
pub fn measure_intersection(q1: &Mat2, q2: &Mat2, w: &Window, cfg: &MeasureConfig) -> Result<PairMeasure> {
    let mut o1 = BranchOracle::new(q1)?;
    let mut o2 = BranchOracle::new(q2)?;
    let b1 = measure_with(&mut o1, w, cfg)?;
    let b2 = measure_with(&mut o2, w, cfg)?;

    let in1: HashSet<&Vertex> = b1.vertex_set.iter().collect();
    let in2: HashSet<&Vertex> = b2.vertex_set.iter().collect();
    let branches_disjoint_in_window = !b1.vertex_set.iter().any(|v| in2.contains(v));
    let branch_containment =
        b1.vertex_set.iter().all(|v| in2.contains(v)) || b2.vertex_set.iter().all(|v| in1.contains(v));

    let stem2: HashSet<&Vertex> = b2.stem.iter().collect();
    let meet: Vec<Vertex> = b1.stem.iter().filter(|v| stem2.contains(v)).cloned().collect();

    let (mut stem_meet, mut stem_distance, mut stem_distance_certified) = (None, None, false);
    if meet.is_empty() {
        if let Some((d, pairs)) = set_distance(&b1.stem, &b2.stem) {
            stem_distance = Some(d);
            stem_distance_certified = b1.boundary_safe
                && b2.boundary_safe
                && pairs.iter().all(|(x, y)| w.is_interior(x, cfg.margin) && w.is_interior(y, cfg.margin));
        }
    } else {
        let both_foliage = b1.kind == MeasuredKind::Foliage && b2.kind == MeasuredKind::Foliage;
        // depth of a stem meet is only reported for foliage pairs
        let mut both = |v: &Vertex| o1.member(v) && o2.member(v);
        let inside: Option<&mut dyn FnMut(&Vertex) -> bool> = if both_foliage { Some(&mut both) } else { None };
        stem_meet = Some(meet_shape(meet, w, cfg, inside));
    }
    Ok(PairMeasure {
        b1,
        b2,
        config: *cfg,
        branches_disjoint_in_window,
        stem_meet,
        stem_distance,
        stem_distance_certified,
        branch_containment,
    })
}

/// Graphviz rendering of a window; vertices are coloured by which of the
/// given membership vectors contain them.
pub fn to_dot(w: &Window, branches: &[Vec<bool>]) -> String {
    const PALETTE: [&str; 3] = ["lightblue", "salmon", "plum"];
    let mut out = String::from("graph window {\n  node [style=filled, fontsize=9];\n");
    for (i, v) in w.vertices.iter().enumerate() {
        let hits: Vec<usize> = (0..branches.len()).filter(|&b| branches[b][i]).collect();
        let color = match hits.as_slice() {
            [] => "white",
            [b] => PALETTE[*b % 2],
            _ => PALETTE[2],
        };
        out.push_str(&format!("  v{i} [label=\"{v}\", fillcolor={color}];\n"));
    }
    for (i, v) in w.vertices.iter().enumerate() {
        if v.r == 0 && v.center.is_zero() {
            continue;
        }
        // every non-root vertex is joined to its neighbour towards the root
        let toward_root = v.neighbors().into_iter().find(|n| n.norm() < v.norm()).expect("non-root vertex");
        if let Some(j) = w.index_of(&toward_root) {
            out.push_str(&format!("  v{j} -- v{i};\n"));
        }
    }
    out.push_str("}\n");
    out
}
