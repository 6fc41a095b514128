//! Closed-form branch shapes, the fake distance, and predicted relative
//! positions of two branches, together with the comparison against oracle
//! measurements.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::defects::{as_defect, quad_defect, solve_quadratic, QuadClass, QuadPoly};
use crate::error::{undetermined, Error, Result};
use crate::quaternion::{discriminant, min_poly, Mat2, PairConfig};
use crate::series::Series;
use crate::tree::{tree_distance, MeasuredKind, MeasuredShape, PairMeasure, Vertex, Window};

/// A half-integer stored doubled, or one of the infinite symbols.
/// `TwoInf` is the length of a bi-infinite path and exceeds `PosInf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HalfInt {
    NegInf,
    Finite(i64),
    PosInf,
    TwoInf,
}

impl HalfInt {
    pub fn int(n: i64) -> HalfInt {
        HalfInt::Finite(2 * n)
    }

    pub fn twice(self) -> Option<i64> {
        match self {
            HalfInt::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_positive(self) -> bool {
        match self {
            HalfInt::Finite(t) => t > 0,
            HalfInt::NegInf => false,
            _ => true,
        }
    }

    /// `-2x`; infinite values map to `TwoInf` (larger than every stem length).
    pub fn neg_double(self) -> HalfInt {
        match self {
            HalfInt::Finite(t) => HalfInt::Finite(-2 * t),
            HalfInt::NegInf => HalfInt::TwoInf,
            HalfInt::PosInf | HalfInt::TwoInf => HalfInt::NegInf,
        }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalfInt::NegInf => write!(f, "-inf"),
            HalfInt::PosInf => write!(f, "inf"),
            HalfInt::TwoInf => write!(f, "2inf"),
            HalfInt::Finite(t) if t % 2 == 0 => write!(f, "{}", t / 2),
            HalfInt::Finite(t) => write!(f, "{t}/2"),
        }
    }
}

impl std::str::FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<HalfInt> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad half-integer `{s}`"));
        match s {
            "-inf" => Ok(HalfInt::NegInf),
            "inf" => Ok(HalfInt::PosInf),
            "2inf" => Ok(HalfInt::TwoInf),
            _ => match s.strip_suffix("/2") {
                Some(n) => Ok(HalfInt::Finite(n.parse().map_err(|_| bad())?)),
                None => Ok(HalfInt::int(s.parse().map_err(|_| bad())?)),
            },
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A point of `P^1(K)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Finite(Series),
    Infinity,
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(x) => write!(f, "{x}"),
            ProjPoint::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StemKind {
    Vertex(Vertex),
    Edge(Vertex, Vertex),
    BiInfinitePath(ProjPoint, ProjPoint),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BranchShape {
    ThickLine { stem: StemKind, depth: i64, stem_length: HalfInt },
    InfiniteFoliage { end: ProjPoint, leaf_level: i64 },
}

fn val(x: &Series) -> Result<i64> {
    x.val_certain()?.ok_or_else(|| Error::Precondition("valuation of zero".into()))
}

/// Distance from `v` to the line through `a` and `b`.
fn dist_to_path(v: &Vertex, a: &ProjPoint, b: &ProjPoint) -> Result<i64> {
    match (a, b) {
        (ProjPoint::Infinity, ProjPoint::Infinity) => Err(Error::Precondition("degenerate path".into())),
        (ProjPoint::Finite(x), ProjPoint::Infinity) | (ProjPoint::Infinity, ProjPoint::Finite(x)) => {
            Ok(v.r - v.agreement(x)?)
        }
        (ProjPoint::Finite(x), ProjPoint::Finite(y)) => {
            let mu = val(&(x - y))?;
            let mut best = i64::MAX;
            for end in [x, y] {
                let g = v.agreement(end)?;
                let d = if g >= mu { v.r - g } else { (v.r - g) + (mu - g) };
                best = best.min(d);
            }
            Ok(best)
        }
    }
}

impl BranchShape {
    pub fn stem_length(&self) -> HalfInt {
        match self {
            BranchShape::ThickLine { stem_length, .. } => *stem_length,
            BranchShape::InfiniteFoliage { .. } => HalfInt::PosInf,
        }
    }

    /// Distance from `v` to the stem; zero inside a foliage.
    pub fn dist_to_stem(&self, v: &Vertex) -> Result<i64> {
        match self {
            BranchShape::ThickLine { stem, .. } => match stem {
                StemKind::Vertex(s) => Ok(tree_distance(v, s)),
                StemKind::Edge(s, u) => Ok(tree_distance(v, s).min(tree_distance(v, u))),
                StemKind::BiInfinitePath(a, b) => dist_to_path(v, a, b),
            },
            BranchShape::InfiniteFoliage { .. } => Ok(if self.contains(v)? { 0 } else { 1 }),
        }
    }

    pub fn contains(&self, v: &Vertex) -> Result<bool> {
        match self {
            BranchShape::ThickLine { depth, .. } => Ok(self.dist_to_stem(v)? <= *depth),
            BranchShape::InfiniteFoliage { end: ProjPoint::Infinity, leaf_level } => Ok(v.r <= *leaf_level),
            BranchShape::InfiniteFoliage { end: ProjPoint::Finite(a), leaf_level } => {
                let g = v.agreement(a)?;
                Ok(2 * g - v.r >= *leaf_level)
            }
        }
    }

    pub fn stem_in_window(&self, w: &Window) -> Result<Vec<Vertex>> {
        let mut out = Vec::new();
        for v in &w.vertices {
            if self.dist_to_stem(v)? == 0 {
                out.push(v.clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BranchShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchShape::ThickLine { stem, depth, stem_length } => {
                let s = match stem {
                    StemKind::Vertex(v) => format!("vertex {v}"),
                    StemKind::Edge(u, v) => format!("edge {u} -- {v}"),
                    StemKind::BiInfinitePath(a, b) => format!("path ({a}) .. ({b})"),
                };
                write!(f, "thick line: stem {s}, depth {depth}, stem length {stem_length}")
            }
            BranchShape::InfiniteFoliage { end, leaf_level } => {
                write!(f, "infinite foliage: end {end}, leaf level {leaf_level}")
            }
        }
    }
}

/// Stem length by class.
pub fn class_stem_length(class: QuadClass) -> HalfInt {
    match class {
        QuadClass::ReducibleSep => HalfInt::TwoInf,
        QuadClass::UnramSep => HalfInt::int(0),
        QuadClass::RamSep | QuadClass::RamInsep => HalfInt::int(1),
        QuadClass::ReducibleInsep => HalfInt::PosInf,
    }
}

/// Closed-form branch of an integral non-scalar `q`.
///
/// With `q = [[A, B], [C, D]]`, `C != 0`, `y = 1/C` and `x = A/C`, the branch
/// is the image under `z -> x + y z` of the set of balls `B_w^[s]`, `s >= 0`,
/// `w in O`, with `v(m(w)) >= s`, where `m` is the minimal polynomial.
pub fn branch_shape(q: &Mat2) -> Result<BranchShape> {
    let m = min_poly(q)?;
    branch_shape_with(q, &m)
}

pub fn branch_shape_with(q: &Mat2, m: &QuadPoly) -> Result<BranchShape> {
    let (c, d) = (&m.a, &m.b);
    if q.c.val().is_none() {
        if !q.c.is_exact() {
            return Err(undetermined("lower-left entry indistinguishable from zero"));
        }
        // upper triangular: one fixed point at infinity
        return match m.class {
            QuadClass::ReducibleSep => Ok(BranchShape::ThickLine {
                stem: StemKind::BiInfinitePath(ProjPoint::Finite(q.b.div(c)?), ProjPoint::Infinity),
                depth: val(c)?,
                stem_length: HalfInt::TwoInf,
            }),
            QuadClass::ReducibleInsep => {
                Ok(BranchShape::InfiniteFoliage { end: ProjPoint::Infinity, leaf_level: val(&q.b)? })
            }
            _ => Err(Error::Precondition(format!("triangular matrix {q} with irreducible minimal polynomial"))),
        };
    }
    let y = q.c.inv()?;
    let x = &q.a * &y;
    let image = |w: &Series| &x + &(&y * w);
    let vy = val(&y)?;
    match m.class {
        QuadClass::ReducibleSep => {
            let (r1, r2) = solve_quadratic(c, d)?.ok_or_else(|| undetermined("reducible polynomial without roots"))?;
            Ok(BranchShape::ThickLine {
                stem: StemKind::BiInfinitePath(ProjPoint::Finite(image(&r1)), ProjPoint::Finite(image(&r2))),
                depth: val(c)?,
                stem_length: HalfInt::TwoInf,
            })
        }
        QuadClass::UnramSep | QuadClass::RamSep => {
            let h = as_defect(&d.div(&c.square())?)?.witness;
            let xi = image(&(c * &h));
            let level = vy + val(c)?;
            if m.class == QuadClass::UnramSep {
                Ok(BranchShape::ThickLine {
                    stem: StemKind::Vertex(Vertex::new(&xi, level)?),
                    depth: val(c)?,
                    stem_length: HalfInt::int(0),
                })
            } else {
                let l = level - m.t;
                Ok(BranchShape::ThickLine {
                    stem: StemKind::Edge(Vertex::new(&xi, l)?, Vertex::new(&xi, l + 1)?),
                    depth: val(c)? - m.t,
                    stem_length: HalfInt::int(1),
                })
            }
        }
        QuadClass::ReducibleInsep => {
            let alpha = d.sqrt()?.ok_or_else(|| undetermined("square class without a square root"))?;
            Ok(BranchShape::InfiniteFoliage { end: ProjPoint::Finite(image(&alpha)), leaf_level: vy })
        }
        QuadClass::RamInsep => {
            let xi = image(&quad_defect(d)?.witness);
            let l = vy + m.t;
            Ok(BranchShape::ThickLine {
                stem: StemKind::Edge(Vertex::new(&xi, l)?, Vertex::new(&xi, l + 1)?),
                depth: m.t,
                stem_length: HalfInt::int(1),
            })
        }
    }
}

/// The fake distance of a pair of classified polynomials.
///
/// Base term `-v(Delta)/2`, plus `v(a_i)` for each separable factor; then
/// `-t_i` for each ramified separable and `+t_i` for each ramified
/// inseparable factor.
pub fn fake_distance(lambda: &Series, m1: &QuadPoly, m2: &QuadPoly) -> Result<HalfInt> {
    fake_distance_with(lambda, m1, m2, TSign::Positive)
}

/// Sign convention for the ramification parameter of a ramified separable
/// factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TSign {
    /// `t > 0` with `v(D) = 1 - 2t`; the factor contributes `-t`.
    Positive,
    /// `t = floor((v(D) - 1) / 2) < 0` substituted into the same `-t` term,
    /// so the factor contributes `+|t|`.
    Floor,
}

pub fn fake_distance_with(lambda: &Series, m1: &QuadPoly, m2: &QuadPoly, sign: TSign) -> Result<HalfInt> {
    let delta = discriminant(lambda, m1, m2);
    let Some(vd) = delta.val_certain()? else {
        return Ok(HalfInt::NegInf);
    };
    let mut twice = -vd;
    for m in [m1, m2] {
        if m.class.is_separable() {
            twice += 2 * val(&m.a)?;
        }
        match m.class {
            QuadClass::RamSep if sign == TSign::Positive => twice -= 2 * m.t,
            QuadClass::RamSep => twice += 2 * m.t,
            QuadClass::RamInsep => twice += 2 * m.t,
            _ => {}
        }
    }
    Ok(HalfInt::Finite(twice))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RelPos {
    Disjoint { distance: HalfInt },
    Overlap { length: HalfInt },
    SharedRay,
    SharedMaxPath,
    FoliageMeet { diameter: i64, depth: i64, stem_is_edge: bool },
    FoliageContained,
}

impl fmt::Display for RelPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelPos::Disjoint { distance } => write!(f, "disjoint stems at distance {distance}"),
            RelPos::Overlap { length } => write!(f, "stems overlap in length {length}"),
            RelPos::SharedRay => write!(f, "stems share a ray"),
            RelPos::SharedMaxPath => write!(f, "stems share a maximal path"),
            RelPos::FoliageMeet { diameter, depth, stem_is_edge } => write!(
                f,
                "foliages meet: diameter {diameter}, depth {depth}, stem {}",
                if *stem_is_edge { "edge" } else { "vertex" }
            ),
            RelPos::FoliageContained => write!(f, "one foliage contains the other"),
        }
    }
}

fn commute(q1: &Mat2, q2: &Mat2) -> bool {
    let d = &(q1 * q2) + &(q2 * q1);
    d.entries().iter().all(|e| e.is_zero())
}

pub fn predict_relpos(cfg: &PairConfig) -> Result<RelPos> {
    predict_relpos_with(cfg, TSign::Positive)
}

pub fn predict_relpos_with(cfg: &PairConfig, sign: TSign) -> Result<RelPos> {
    let (c1, c2) = (cfg.m1.class, cfg.m2.class);
    if c1 == QuadClass::ReducibleInsep && c2 == QuadClass::ReducibleInsep {
        let Some(v) = cfg.lambda.val_certain()? else {
            return Ok(RelPos::FoliageContained);
        };
        return Ok(if v < 0 {
            RelPos::Disjoint { distance: HalfInt::int(-v) }
        } else {
            RelPos::FoliageMeet { diameter: v, depth: v.div_euclid(2), stem_is_edge: v % 2 != 0 }
        });
    }
    let df = fake_distance_with(&cfg.lambda, &cfg.m1, &cfg.m2, sign)?;
    if c1 == QuadClass::ReducibleSep && c2 == QuadClass::ReducibleSep && df == HalfInt::NegInf {
        return Ok(if commute(&cfg.q1, &cfg.q2) { RelPos::SharedMaxPath } else { RelPos::SharedRay });
    }
    if df.is_positive() {
        return Ok(RelPos::Disjoint { distance: df });
    }
    let length = df.neg_double().min(class_stem_length(c1)).min(class_stem_length(c2));
    Ok(RelPos::Overlap { length })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Match,
    Mismatch(String),
    Skipped(String),
}

impl Verdict {
    pub fn is_mismatch(&self) -> bool {
        matches!(self, Verdict::Mismatch(_))
    }
}

/// Compare a predicted relative position with what the oracle saw.
///
/// Stems are compared as vertex sets: an edge stem contributes both of its
/// endpoints, and a predicted distance is the distance between the nearest
/// stem vertices.
pub fn compare(pred: &RelPos, meas: &PairMeasure) -> Verdict {
    use Verdict::*;
    let certified = meas.b1.boundary_safe && meas.b2.boundary_safe;
    if meas.b1.stem.is_empty() || meas.b2.stem.is_empty() {
        return Skipped("a stem misses the window".into());
    }
    match pred {
        RelPos::FoliageContained => {
            if meas.branch_containment {
                Match
            } else {
                Mismatch("neither foliage contains the other".into())
            }
        }
        RelPos::Disjoint { distance } => {
            let Some(tw) = distance.twice() else {
                return Mismatch(format!("infinite distance {distance}"));
            };
            if tw % 2 != 0 {
                return Mismatch(format!("distance {distance} is not realisable between vertex sets"));
            }
            let expected = tw / 2;
            if !certified {
                return Skipped("stems not certified".into());
            }
            match (&meas.stem_meet, meas.stem_distance) {
                (Some(_), _) if expected == 0 => Match,
                (Some(_), _) => Mismatch(format!("stems meet, expected distance {expected}")),
                (None, Some(d)) if meas.stem_distance_certified => {
                    if d == expected {
                        Match
                    } else {
                        Mismatch(format!("measured stem distance {d}, expected {expected}"))
                    }
                }
                _ => Skipped("stem distance realised near the boundary".into()),
            }
        }
        RelPos::Overlap { length } => {
            if !certified {
                return Skipped("stems not certified".into());
            }
            let Some(meet) = &meas.stem_meet else {
                return if meas.stem_distance_certified {
                    Mismatch(format!("stems disjoint at distance {:?}", meas.stem_distance))
                } else {
                    Skipped("stems do not meet inside the window".into())
                };
            };
            match length.twice() {
                Some(tw) => {
                    let l = tw / 2;
                    if meet.interior {
                        if meet.diameter == l {
                            Match
                        } else {
                            Mismatch(format!("overlap length {}, expected {l}", meet.diameter))
                        }
                    } else if meet.diameter > l {
                        Mismatch(format!("overlap of length >= {} reaches the boundary, expected {l}", meet.diameter))
                    } else {
                        Skipped("overlap reaches the boundary".into())
                    }
                }
                None if meet.interior => Mismatch(format!("finite overlap of length {}", meet.diameter)),
                None => Match,
            }
        }
        RelPos::SharedMaxPath | RelPos::SharedRay => {
            if !certified {
                return Skipped("stems not certified".into());
            }
            let Some(meet) = &meas.stem_meet else {
                return Mismatch("stems do not meet".into());
            };
            if meet.interior || !meet.path_like {
                return Mismatch(format!("meet is not an infinite path (diameter {})", meet.diameter));
            }
            match (pred, meet.boundary_ends) {
                (RelPos::SharedMaxPath, n) if n >= 2 => Match,
                (RelPos::SharedMaxPath, _) => Mismatch("meet is a ray".into()),
                (_, 1) => Match,
                _ => Skipped("ray origin lies outside the window".into()),
            }
        }
        RelPos::FoliageMeet { diameter, depth, stem_is_edge } => {
            let Some(meet) = &meas.stem_meet else {
                return if meas.stem_distance_certified {
                    Mismatch("foliages are disjoint".into())
                } else {
                    Skipped("foliages do not meet inside the window".into())
                };
            };
            if !meet.interior {
                return if meet.diameter > *diameter {
                    Mismatch(format!("meet of diameter >= {} reaches the boundary", meet.diameter))
                } else {
                    Skipped("meet reaches the boundary".into())
                };
            }
            let seen = (meet.diameter, meet.depth, meet.stem_size.map(|n| n == 2));
            if seen == (*diameter, Some(*depth), Some(*stem_is_edge)) {
                Match
            } else {
                Mismatch(format!("meet diameter/depth/edge {seen:?}"))
            }
        }
    }
}

/// Compare a predicted branch with its measurement over the whole window.
pub fn compare_branch(shape: &BranchShape, meas: &MeasuredShape, w: &Window) -> Result<Verdict> {
    let members: HashSet<&Vertex> = meas.vertex_set.iter().collect();
    for v in &w.vertices {
        let predicted = shape.contains(v)?;
        if predicted != members.contains(v) {
            return Ok(Verdict::Mismatch(format!(
                "membership of {v}: predicted {predicted}, oracle {}",
                !predicted
            )));
        }
    }
    match (shape, meas.kind) {
        (BranchShape::InfiniteFoliage { .. }, MeasuredKind::Foliage) => Ok(Verdict::Match),
        (BranchShape::InfiniteFoliage { .. }, _) | (_, MeasuredKind::Foliage) => {
            Ok(Verdict::Mismatch("foliage/thick line disagreement".into()))
        }
        (BranchShape::ThickLine { depth, .. }, MeasuredKind::ThickLine) => {
            if !meas.boundary_safe {
                return Ok(Verdict::Skipped("stem not certified inside the window".into()));
            }
            let mut stem = shape.stem_in_window(w)?;
            let mut seen = meas.stem.clone();
            stem.sort();
            seen.sort();
            if stem != seen {
                return Ok(Verdict::Mismatch(format!("stem has {} vertices, oracle {}", stem.len(), seen.len())));
            }
            if meas.depth != Some(*depth) {
                return Ok(Verdict::Mismatch(format!("depth {depth}, oracle {:?}", meas.depth)));
            }
            Ok(Verdict::Match)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::parse::parse_series;
    use crate::quaternion::{make_pair, parse_mat2};
    use crate::tree::{enumerate_window, measure_branch, measure_intersection, MeasureConfig};

    fn f() -> Field {
        Field::binary()
    }

    fn m(x: &str) -> Mat2 {
        parse_mat2(f(), x).unwrap()
    }

    fn s(x: &str) -> Series {
        parse_series(f(), x).unwrap()
    }

    fn check_branch(q: &str, n: u32) -> BranchShape {
        let q = m(q);
        let shape = branch_shape(&q).unwrap();
        let w = enumerate_window(f(), n).unwrap();
        let meas = measure_branch(&q, &w, &MeasureConfig::new(n, 2)).unwrap();
        assert_eq!(compare_branch(&shape, &meas, &w).unwrap(), Verdict::Match, "{q}: {shape}");
        shape
    }

    #[test]
    fn nilpotent_foliage() {
        for (q, t) in [("[[0, t^2],[0, 0]]", 2), ("[[1, t^3],[0, 1]]", 3), ("[[t, 1],[0, t]]", 0)] {
            let shape = check_branch(q, 6);
            assert_eq!(shape, BranchShape::InfiniteFoliage { end: ProjPoint::Infinity, leaf_level: t });
        }
        let shape = check_branch("[[t, t^2],[1, t]]", 6);
        assert!(matches!(shape, BranchShape::InfiniteFoliage { leaf_level: 0, .. }));
    }

    #[test]
    fn idempotent_path() {
        let shape = check_branch("[[1, 0],[0, 0]]", 6);
        assert_eq!(
            shape,
            BranchShape::ThickLine {
                stem: StemKind::BiInfinitePath(ProjPoint::Finite(Series::zero(f())), ProjPoint::Infinity),
                depth: 0,
                stem_length: HalfInt::TwoInf
            }
        );
    }

    #[test]
    fn ramified_inseparable_edge() {
        let shape = check_branch("[[0, t],[1, 0]]", 6);
        assert!(matches!(shape, BranchShape::ThickLine { stem: StemKind::Edge(..), depth: 0, .. }));
        check_branch("[[1, t^3],[t^2, 1]]", 7);
    }

    #[test]
    fn separable_classes() {
        // X^2 + tX + t: ramified, t = 1, depth 0
        let shape = check_branch("[[0, t],[1, t]]", 7);
        assert!(matches!(shape, BranchShape::ThickLine { stem: StemKind::Edge(..), depth: 0, .. }));
        // X^2 + t^3 X + t: ramified with t = 2, depth 1
        check_branch("[[0, t],[1, t^3]]", 7);
        // X^2 + X + 1 over F_2: unramified
        let shape = check_branch("[[0, 1],[1, 1]]", 6);
        assert!(matches!(shape, BranchShape::ThickLine { stem: StemKind::Vertex(_), depth: 0, .. }));
        check_branch("[[0, t + t^3],[t^-1, 1]]", 7);
        // X^2 + tX: split, depth 1
        check_branch("[[t, 0],[1, 0]]", 6);
        check_branch("[[t^2 + t, t],[t^-1, 1]]", 7);
    }

    #[test]
    fn fake_distance_examples() {
        let zero = Series::zero(f());
        let nil = min_poly(&m("[[0, 1],[0, 0]]")).unwrap();
        assert_eq!(fake_distance(&s("t^-2"), &nil, &nil).unwrap(), HalfInt::int(2));
        assert_eq!(fake_distance(&zero, &nil, &nil).unwrap(), HalfInt::NegInf);
        let a = HalfInt::Finite(-1);
        assert_eq!(a.neg_double(), HalfInt::int(1));
        assert!(HalfInt::int(1) < HalfInt::PosInf && HalfInt::PosInf < HalfInt::TwoInf);
        assert_eq!(HalfInt::Finite(3).to_string(), "3/2");
    }

    #[test]
    fn lambda_shift_preserves_fake_distance() {
        let m1 = min_poly(&m("[[t, 1],[1, 0]]")).unwrap();
        let m2 = min_poly(&m("[[0, t],[1, t]]")).unwrap();
        let lambda = s("t^-1 + 1");
        let shifted = &lambda + &(&m1.a * &m2.a);
        assert_eq!(fake_distance(&lambda, &m1, &m2).unwrap(), fake_distance(&shifted, &m1, &m2).unwrap());
    }

    fn check_pair(q1: &str, q2: &str, n: u32) -> RelPos {
        let (q1, q2) = (m(q1), m(q2));
        let cfg = make_pair(&q1, &q2).unwrap();
        let pred = predict_relpos(&cfg).unwrap();
        let w = enumerate_window(f(), n).unwrap();
        let meas = measure_intersection(&q1, &q2, &w, &MeasureConfig::new(n, 2)).unwrap();
        assert_eq!(compare(&pred, &meas), Verdict::Match, "{q1} / {q2}: {pred}");
        pred
    }

    #[test]
    fn relpos_examples() {
        assert_eq!(check_pair("[[1, 0],[t, 0]]", "[[1, 0],[t, 0]]", 6), RelPos::SharedMaxPath);
        assert_eq!(check_pair("[[1, 0],[0, 0]]", "[[1, 1],[0, 0]]", 6), RelPos::SharedRay);
        assert_eq!(check_pair("[[0, 1],[0, 0]]", "[[0, 0],[t^-2, 0]]", 7), RelPos::Disjoint { distance: HalfInt::int(2) });
        assert_eq!(
            check_pair("[[0, 1],[0, 0]]", "[[0, 0],[1, 0]]", 6),
            RelPos::FoliageMeet { diameter: 0, depth: 0, stem_is_edge: false }
        );
        assert_eq!(
            check_pair("[[0, t^3],[0, 0]]", "[[0, 0],[1, 0]]", 7),
            RelPos::FoliageMeet { diameter: 3, depth: 1, stem_is_edge: true }
        );
        assert_eq!(check_pair("[[0, t],[0, 0]]", "[[0, t^3],[0, 0]]", 6), RelPos::FoliageContained);
    }
}
