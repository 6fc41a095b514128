//! Differential self-test: random pairs and branches checked against the
//! window oracle, defects against exhaustive search, and the splitting symbol
//! against explicit solutions.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::defects::{as_defect, classify, quad_defect, solve_quadratic, QuadClass, QuadPoly};
use crate::error::Result;
use crate::existence::{cyclic_presentation, search_pair, splits, AlgebraSpec, SearchBox};
use crate::field::{Field, FieldElem};
use crate::predictor::{
    branch_shape, compare, compare_branch, predict_relpos, predict_relpos_with, RelPos, TSign, Verdict,
};
use crate::quaternion::{make_pair, Mat2};
use crate::series::Series;
use crate::tree::{enumerate_window, measure_branch, measure_intersection, MeasureConfig, Window};

const CLASSES: [QuadClass; 5] = [
    QuadClass::ReducibleSep,
    QuadClass::UnramSep,
    QuadClass::RamSep,
    QuadClass::ReducibleInsep,
    QuadClass::RamInsep,
];

/// Entry support of generated matrices.
const ENTRY_LO: i64 = -3;
const ENTRY_HI: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SelfTestConfig {
    pub tau: u32,
    pub modulus: u32,
    pub prec: u32,
    pub radius: u32,
    pub margin: u32,
    pub seed: u64,
    pub count: usize,
}

impl SelfTestConfig {
    pub fn new(field: Field, radius: u32, margin: u32, seed: u64, count: usize) -> SelfTestConfig {
        SelfTestConfig { tau: field.tau(), modulus: field.modulus(), prec: field.prec(), radius, margin, seed, count }
    }

    pub fn field(&self) -> Result<Field> {
        Ok(Field::new(self.tau, self.modulus)?.with_prec(self.prec))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CellStats {
    pub attempted: usize,
    pub skipped: usize,
    pub matched: usize,
    pub mismatched: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseEntry {
    pub index: usize,
    pub cell: String,
    pub input: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Suite {
    pub cells: BTreeMap<String, CellStats>,
    pub skipped: Vec<CaseEntry>,
    pub mismatches: Vec<CaseEntry>,
}

impl Suite {
    fn record(&mut self, index: usize, cell: String, input: String, verdict: Verdict) {
        let stats = self.cells.entry(cell.clone()).or_default();
        stats.attempted += 1;
        match verdict {
            Verdict::Match => stats.matched += 1,
            Verdict::Skipped(reason) => {
                stats.skipped += 1;
                self.skipped.push(CaseEntry { index, cell, input, reason });
            }
            Verdict::Mismatch(reason) => {
                stats.mismatched += 1;
                self.mismatches.push(CaseEntry { index, cell, input, reason });
            }
        }
    }

    pub fn matched(&self) -> usize {
        self.cells.values().map(|c| c.matched).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Agreement {
    pub checked: usize,
    /// Instances where the independent check reached a verdict.
    pub conclusive: usize,
    pub agreed: usize,
    pub disagreements: Vec<String>,
}

/// Distance predictions for pairs with a ramified separable factor, scored
/// under both readings of the sign of `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TSignFinding {
    pub instances: usize,
    pub positive_matches: usize,
    pub positive_mismatches: usize,
    pub floor_matches: usize,
    pub floor_mismatches: usize,
    pub resolution: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfTestReport {
    pub config: SelfTestConfig,
    pub pairs: Suite,
    pub branches: Suite,
    pub defects: Agreement,
    pub symbols: Agreement,
    pub t_sign: TSignFinding,
}

impl SelfTestReport {
    pub fn mismatches(&self) -> usize {
        self.pairs.mismatches.len()
            + self.branches.mismatches.len()
            + self.defects.disagreements.len()
            + self.symbols.disagreements.len()
    }

    pub fn passed(&self) -> bool {
        self.mismatches() == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        out.push_str(&format!(
            "selftest tau={} seed={} count={} radius={} margin={}\n",
            c.tau, c.seed, c.count, c.radius, c.margin
        ));
        for (name, suite) in [("pairs", &self.pairs), ("branches", &self.branches)] {
            out.push_str(&format!("{name}:\n"));
            for (cell, s) in &suite.cells {
                out.push_str(&format!(
                    "  {cell:<34} attempted {:>4}  matched {:>4}  skipped {:>4}  mismatched {:>3}\n",
                    s.attempted, s.matched, s.skipped, s.mismatched
                ));
            }
            for m in &suite.mismatches {
                out.push_str(&format!("  MISMATCH #{} {} {}: {}\n", m.index, m.cell, m.input, m.reason));
            }
        }
        for (name, a) in [("defects", &self.defects), ("symbols", &self.symbols)] {
            out.push_str(&format!(
                "{name}: checked {} conclusive {} agreed {}\n",
                a.checked, a.conclusive, a.agreed
            ));
            for d in &a.disagreements {
                out.push_str(&format!("  DISAGREE {d}\n"));
            }
        }
        let t = &self.t_sign;
        out.push_str(&format!(
            "t-sign: {} instances; positive t {} match / {} mismatch; floor t {} match / {} mismatch\n  {}\n",
            t.instances, t.positive_matches, t.positive_mismatches, t.floor_matches, t.floor_mismatches, t.resolution
        ));
        out.push_str(&format!("result: {}\n", if self.passed() { "PASS" } else { "FAIL" }));
        out
    }
}

fn rng_for(seed: u64, suite: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((suite << 40) | index as u64);
    rng
}

/// Uniform Laurent polynomial with support in `lo..=hi`.
pub fn random_poly<R: Rng>(rng: &mut R, field: Field, lo: i64, hi: i64) -> Series {
    let terms: Vec<(i64, FieldElem)> =
        (lo..=hi).map(|e| (e, FieldElem(rng.gen_range(0..field.order())))).collect();
    Series::from_terms(field, &terms)
}

fn nonzero_poly<R: Rng>(rng: &mut R, field: Field, lo: i64, hi: i64) -> Series {
    loop {
        let s = random_poly(rng, field, lo, hi);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Integral quadratic of the requested class, by rejection; falls back to
/// whatever class the last draw produced.
pub fn random_quad<R: Rng>(rng: &mut R, field: Field, class: QuadClass) -> QuadPoly {
    let mut last = None;
    for _ in 0..400 {
        let a = match class {
            QuadClass::ReducibleInsep | QuadClass::RamInsep => Series::zero(field),
            _ => nonzero_poly(rng, field, 0, 3),
        };
        let b = random_poly(rng, field, 0, 3);
        let Ok(m) = classify(&a, &b) else { continue };
        if m.class == class {
            return m;
        }
        last = Some(m);
    }
    last.expect("some draw classifies")
}

pub fn companion(m: &QuadPoly) -> Mat2 {
    let f = m.a.field();
    Mat2::new(Series::zero(f), m.b.clone(), Series::one(f), m.a.clone())
}

fn elementary<R: Rng>(rng: &mut R, field: Field) -> Mat2 {
    let (zero, one) = (Series::zero(field), Series::one(field));
    match rng.gen_range(0..4) {
        0 => Mat2::diag(Series::pi_pow(field, rng.gen_range(-2..=2)), one),
        1 => Mat2::new(one.clone(), random_poly(rng, field, -2, 2), zero, one),
        2 => Mat2::new(one.clone(), zero, random_poly(rng, field, -2, 2), one),
        _ => Mat2::new(zero.clone(), one.clone(), one, zero),
    }
}

pub fn random_conjugator<R: Rng>(rng: &mut R, field: Field) -> Mat2 {
    let mut g = Mat2::identity(field);
    for _ in 0..rng.gen_range(1..=2) {
        g = &g * &elementary(rng, field);
    }
    g
}

fn within_support(q: &Mat2) -> bool {
    q.entries()
        .iter()
        .all(|e| e.is_zero() || (e.val_lower() >= ENTRY_LO && e.degree().is_some_and(|d| d <= ENTRY_HI)))
}

/// Conjugate each matrix by one random exact conjugator whose result keeps
/// entries within the support bound.
fn conjugate_all<R: Rng>(rng: &mut R, qs: &[Mat2]) -> Vec<Mat2> {
    let field = qs[0].field();
    for _ in 0..50 {
        let g = random_conjugator(rng, field);
        let out: Vec<Mat2> = qs.iter().map(|q| q.conjugate_by(&g).expect("invertible conjugator")).collect();
        if out.iter().all(within_support) {
            return out;
        }
    }
    qs.to_vec()
}

fn random_class<R: Rng>(rng: &mut R) -> QuadClass {
    CLASSES[rng.gen_range(0..CLASSES.len())]
}

/// Upper triangular matrix with a reducible minimal polynomial.
fn random_triangular<R: Rng>(rng: &mut R, field: Field, separable: bool) -> Mat2 {
    let alpha = random_poly(rng, field, 0, 2);
    let a = if separable { nonzero_poly(rng, field, 0, 2) } else { Series::zero(field) };
    let u = nonzero_poly(rng, field, -2, 2);
    Mat2::new(&alpha + &a, u, Series::zero(field), alpha)
}

fn transpose(q: &Mat2) -> Mat2 {
    Mat2::new(q.a.clone(), q.c.clone(), q.b.clone(), q.d.clone())
}

fn random_companion<R: Rng>(rng: &mut R, field: Field) -> Mat2 {
    let class = random_class(rng);
    companion(&random_quad(rng, field, class))
}

fn random_reducible<R: Rng>(rng: &mut R, field: Field) -> Mat2 {
    let separable = rng.gen_bool(0.5);
    random_triangular(rng, field, separable)
}

/// A random integral non-scalar pair. Independent draws rarely share ends or
/// commute, so a fraction of the draws is built to do so.
pub fn random_pair<R: Rng>(rng: &mut R, field: Field) -> (Mat2, Mat2) {
    let out = match rng.gen_range(0..10) {
        0..=3 => {
            let c1 = random_companion(rng, field);
            let c2 = random_companion(rng, field);
            let mut q1 = conjugate_all(rng, &[c1]);
            q1.extend(conjugate_all(rng, &[c2]));
            q1
        }
        4..=5 => {
            let c1 = random_companion(rng, field);
            let c2 = random_companion(rng, field);
            conjugate_all(rng, &[c1, c2])
        }
        6 => {
            let q1 = random_companion(rng, field);
            let c0 = random_poly(rng, field, 0, 2);
            let c1 = nonzero_poly(rng, field, 0, 2);
            let q2 = q1.scale(&c1).add_scalar(&c0);
            conjugate_all(rng, &[q1, q2])
        }
        7..=8 => {
            let q1 = random_reducible(rng, field);
            let q2 = random_reducible(rng, field);
            conjugate_all(rng, &[q1, q2])
        }
        _ => {
            let q1 = random_reducible(rng, field);
            let q2 = transpose(&random_reducible(rng, field));
            conjugate_all(rng, &[q1, q2])
        }
    };
    (out[0].clone(), out[1].clone())
}

fn relpos_kind(r: &RelPos) -> &'static str {
    match r {
        RelPos::Disjoint { .. } => "disjoint",
        RelPos::Overlap { .. } => "overlap",
        RelPos::SharedRay => "shared-ray",
        RelPos::SharedMaxPath => "shared-max-path",
        RelPos::FoliageMeet { .. } => "foliage-meet",
        RelPos::FoliageContained => "foliage-contained",
    }
}

fn pair_cell(m1: &QuadPoly, m2: &QuadPoly, pred: &RelPos) -> String {
    let mut fam = [m1.class.family(), m2.class.family()];
    fam.sort();
    match pred {
        RelPos::Overlap { length } => format!("{}/{} {} {length}", fam[0], fam[1], relpos_kind(pred)),
        _ => format!("{}/{} {}", fam[0], fam[1], relpos_kind(pred)),
    }
}

struct PairOutcome {
    cell: String,
    input: String,
    verdict: Verdict,
    /// Verdict under the floor sign, for pairs with a ramified separable factor.
    floor: Option<Verdict>,
}

fn run_pair(index: usize, cfg: &SelfTestConfig, field: Field, w: &Window) -> PairOutcome {
    let mut rng = rng_for(cfg.seed, 1, index);
    let (q1, q2) = random_pair(&mut rng, field);
    let input = format!("{q1} {q2}");
    let skip = |cell: &str, reason: String| PairOutcome {
        cell: cell.to_string(),
        input: input.clone(),
        verdict: Verdict::Skipped(reason),
        floor: None,
    };
    let pair = match make_pair(&q1, &q2) {
        Ok(p) => p,
        Err(e) => return skip("invalid", e.to_string()),
    };
    let pred = match predict_relpos(&pair) {
        Ok(p) => p,
        Err(e) => return skip("unpredicted", e.to_string()),
    };
    let cell = pair_cell(&pair.m1, &pair.m2, &pred);
    let mcfg = MeasureConfig::new(cfg.radius, cfg.margin);
    let meas = match measure_intersection(&q1, &q2, w, &mcfg) {
        Ok(m) => m,
        Err(e) => return skip(&cell, e.to_string()),
    };
    let verdict = compare(&pred, &meas);
    let has_bs = pair.m1.class == QuadClass::RamSep || pair.m2.class == QuadClass::RamSep;
    let floor = (has_bs && !matches!(verdict, Verdict::Skipped(_)))
        .then(|| match predict_relpos_with(&pair, TSign::Floor) {
            Ok(alt) => compare(&alt, &meas),
            Err(e) => Verdict::Mismatch(e.to_string()),
        });
    PairOutcome { cell, input, verdict, floor }
}

fn run_branch(index: usize, cfg: &SelfTestConfig, field: Field, w: &Window) -> (String, String, Verdict) {
    let mut rng = rng_for(cfg.seed, 2, index);
    let class = CLASSES[index % CLASSES.len()];
    let c = companion(&random_quad(&mut rng, field, class));
    let q = conjugate_all(&mut rng, &[c]).remove(0);
    let input = q.to_string();
    let shape = match branch_shape(&q) {
        Ok(s) => s,
        Err(e) => return (format!("{class:?}"), input, Verdict::Skipped(e.to_string())),
    };
    let class = crate::quaternion::min_poly(&q).map(|m| m.class).unwrap_or(class);
    let verdict = measure_branch(&q, w, &MeasureConfig::new(cfg.radius, cfg.margin))
        .and_then(|m| compare_branch(&shape, &m, w))
        .unwrap_or_else(|e| Verdict::Skipped(e.to_string()));
    (format!("{class:?}"), input, verdict)
}

/// Largest `v(h^2 + h + a)` over `h` with support in `lo..=hi`, capped at 64.
pub fn brute_as_defect(a: &Series, lo: i64, hi: i64) -> i64 {
    brute_max(a, lo, hi, |h| &(&h.square() + h) + a)
}

/// Largest `v(a + x^2)` over `x` with support in `lo..=hi`, capped at 64.
pub fn brute_quad_defect(a: &Series, lo: i64, hi: i64) -> i64 {
    brute_max(a, lo, hi, |x| &x.square() + a)
}

fn brute_max(a: &Series, lo: i64, hi: i64, f: impl Fn(&Series) -> Series) -> i64 {
    let field = a.field();
    let q = field.order() as u64;
    let n = (hi - lo + 1) as u32;
    let mut best = i64::MIN;
    for mut code in 0..q.pow(n) {
        let terms: Vec<(i64, FieldElem)> = (lo..=hi)
            .map(|e| {
                let c = FieldElem((code % q) as u32);
                code /= q;
                (e, c)
            })
            .collect();
        best = best.max(f(&Series::from_terms(field, &terms)).val().unwrap_or(64));
    }
    best
}

/// Compare both defects of `a` with exhaustive search; `None` when they agree.
pub fn check_defects(a: &Series, lo: i64, hi: i64) -> Option<String> {
    let as_ = as_defect(a).ok()?.ideal;
    let seen = brute_as_defect(a, lo, hi);
    let ok = match as_.val {
        Some(v) => seen == v,
        None => seen > hi,
    };
    if !ok {
        return Some(format!("as_defect({a}) = {as_}, search reaches t^{seen}"));
    }
    let qd = quad_defect(a).ok()?.ideal;
    let seen = brute_quad_defect(a, lo, hi);
    let ok = match qd.val {
        Some(v) => seen == v,
        None => seen > 2 * hi,
    };
    (!ok).then(|| format!("quad_defect({a}) = {qd}, search reaches t^{seen}"))
}

/// Exhaustive grid for the defect check: `[-4, 8]` shortened so the grid
/// holds at most `2^13` elements.
fn defect_grid(field: Field) -> (i64, i64) {
    let width = (13 / field.tau()).max(1) as i64;
    (-4, -4 + width - 1)
}

fn run_defect(index: usize, cfg: &SelfTestConfig, field: Field) -> Option<String> {
    let mut rng = rng_for(cfg.seed, 3, index);
    let a = random_poly(&mut rng, field, -6, 6);
    let (lo, hi) = defect_grid(field);
    check_defects(&a, lo, hi)
}

pub fn random_spec<R: Rng>(rng: &mut R, field: Field) -> AlgebraSpec {
    loop {
        let lambda = random_poly(rng, field, -2, 2);
        let (c1, c2) = (random_class(rng), random_class(rng));
        let m1 = random_quad(rng, field, c1);
        let m2 = random_quad(rng, field, c2);
        let spec = AlgebraSpec::new(lambda, m1, m2);
        if !spec.delta.is_zero() {
            return spec;
        }
    }
}

/// Symbol decision vs. an explicit splitting certificate: a root of either
/// minimal polynomial, or a search hit. Returns `(conclusive, disagreement)`.
pub fn check_symbol(spec: &AlgebraSpec, bx: &SearchBox) -> Result<(bool, Option<String>)> {
    let (a, b) = cyclic_presentation(spec)?;
    let split = splits(&a, &b)?;
    let root = |m: &QuadPoly| matches!(solve_quadratic(&m.a, &m.b), Ok(Some(_)));
    let certified = root(&spec.m1) || root(&spec.m2) || search_pair(spec, bx).is_some();
    if certified && !split {
        return Ok((true, Some(format!("lambda={} m1=({}, {}) m2=({}, {}): symbol says non-split, certificate found", spec.lambda, spec.m1.a, spec.m1.b, spec.m2.a, spec.m2.b))));
    }
    Ok((certified, None))
}

fn run_symbol(index: usize, cfg: &SelfTestConfig, field: Field) -> (bool, Option<String>) {
    let mut rng = rng_for(cfg.seed, 4, index);
    let spec = random_spec(&mut rng, field);
    let bx = SearchBox { lo: -3, hi: 5, max_candidates: 1 << 9 };
    check_symbol(&spec, &bx).unwrap_or_else(|e| (false, Some(e.to_string())))
}

/// Run the differential self-test.
pub fn selftest(cfg: &SelfTestConfig) -> Result<SelfTestReport> {
    let field = cfg.field()?;
    let n = cfg.count;
    let w = if n > 0 { Some(enumerate_window(field, cfg.radius)?) } else { None };

    let mut pairs = Suite::default();
    let mut branches = Suite::default();
    let mut t_sign = TSignFinding::default();
    if let Some(w) = &w {
        let outcomes: Vec<PairOutcome> = (0..n).into_par_iter().map(|i| run_pair(i, cfg, field, w)).collect();
        for (i, o) in outcomes.into_iter().enumerate() {
            if let Some(floor) = &o.floor {
                t_sign.instances += 1;
                match o.verdict {
                    Verdict::Match => t_sign.positive_matches += 1,
                    Verdict::Mismatch(_) => t_sign.positive_mismatches += 1,
                    Verdict::Skipped(_) => {}
                }
                match floor {
                    Verdict::Match => t_sign.floor_matches += 1,
                    Verdict::Mismatch(_) => t_sign.floor_mismatches += 1,
                    Verdict::Skipped(_) => {}
                }
            }
            pairs.record(i, o.cell, o.input, o.verdict);
        }
        let outcomes: Vec<_> = (0..n).into_par_iter().map(|i| run_branch(i, cfg, field, w)).collect();
        for (i, (cell, input, verdict)) in outcomes.into_iter().enumerate() {
            branches.record(i, cell, input, verdict);
        }
    }
    t_sign.resolution = if t_sign.instances == 0 {
        "no certified instance with a ramified separable factor".into()
    } else if t_sign.positive_mismatches == 0 {
        format!(
            "positive t (ramified separable factor contributes -t) matches the oracle on all {} instances; \
             the floor value of t disagrees on {}",
            t_sign.instances, t_sign.floor_mismatches
        )
    } else {
        format!("positive t disagrees with the oracle on {} instances", t_sign.positive_mismatches)
    };

    let mut defects = Agreement::default();
    let nd = n.div_ceil(10);
    let results: Vec<Option<String>> = (0..nd).into_par_iter().map(|i| run_defect(i, cfg, field)).collect();
    for r in results {
        defects.checked += 1;
        defects.conclusive += 1;
        match r {
            None => defects.agreed += 1,
            Some(d) => defects.disagreements.push(d),
        }
    }

    let mut symbols = Agreement::default();
    let ns = n.div_ceil(2);
    let results: Vec<(bool, Option<String>)> = (0..ns).into_par_iter().map(|i| run_symbol(i, cfg, field)).collect();
    for (conclusive, r) in results {
        symbols.checked += 1;
        if conclusive {
            symbols.conclusive += 1;
        }
        match r {
            None if conclusive => symbols.agreed += 1,
            None => {}
            Some(d) => symbols.disagreements.push(d),
        }
    }

    Ok(SelfTestReport { config: *cfg, pairs, branches, defects, symbols, t_sign })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(count: usize, seed: u64) -> SelfTestConfig {
        SelfTestConfig::new(Field::binary(), 6, 2, seed, count)
    }

    #[test]
    fn empty_run_passes() {
        let r = selftest(&cfg(0, 1)).unwrap();
        assert!(r.passed());
        assert!(r.pairs.cells.is_empty());
    }

    #[test]
    fn small_run_is_deterministic_and_clean() {
        let a = selftest(&cfg(12, 3)).unwrap();
        let b = selftest(&cfg(12, 3)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.passed(), "{}", a.summary());
    }

    #[test]
    fn random_quads_have_requested_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for class in CLASSES {
            for _ in 0..10 {
                assert_eq!(random_quad(&mut rng, Field::binary(), class).class, class);
            }
        }
    }

    #[test]
    fn generated_pairs_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let (q1, q2) = random_pair(&mut rng, Field::binary());
            assert!(make_pair(&q1, &q2).is_ok(), "{q1} {q2}");
        }
    }

    #[test]
    fn defect_search_agrees_on_samples() {
        let f = Field::binary();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let a = random_poly(&mut rng, f, -6, 6);
            assert_eq!(check_defects(&a, -4, 6), None);
        }
    }
}
