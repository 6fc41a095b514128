//! Acceptance suite: one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quatbranch::cli::{ClassifyRecord, DefectRecord, ExistsRecord};
use quatbranch::defects::{as_defect, classify, quad_defect, QuadClass};
use quatbranch::existence::{decide, validate_witness, AlgebraSpec, Condition, SearchBox};
use quatbranch::parse::parse_series;
use quatbranch::predictor::{branch_shape, BranchShape, HalfInt, ProjPoint, StemKind};
use quatbranch::quaternion::{discriminant, make_pair, min_poly, parse_mat2, sym_product, Mat2};
use quatbranch::selftest::{check_defects, check_symbol, random_pair, random_poly, random_spec, selftest, SelfTestConfig, SelfTestReport};
use quatbranch::tree::{parse_vertex, Vertex};
use quatbranch::{Field, FieldElem, Series};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fields: Vec<Field> = (1..=3).map(|t| Field::with_degree(t).unwrap()).collect();
    for i in 0..10_000 {
        let f = fields[i % 3];
        let lo = rng.gen_range(-12..=2);
        let hi = lo + rng.gen_range(0..=14);
        let a = random_poly(&mut rng, f, lo, hi);
        let d = as_defect(&a).map_err(|e| format!("as_defect({a}): {e}"))?.ideal;
        check(d.val.map_or(true, |v| v == 0 || (v < 0 && v % 2 != 0)), || format!("as_defect({a}) = {d}"))?;
        let q = quad_defect(&a).map_err(|e| format!("quad_defect({a}): {e}"))?.ideal;
        check(q.val.map_or(true, |v| v % 2 != 0), || format!("quad_defect({a}) = {q}"))?;
    }
    let el = start.elapsed();
    check(el < Duration::from_secs(10), || format!("took {el:?}"))?;
    Ok(format!("10000 elements, zero violations, {:.2}s", el.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = Field::binary();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let a = random_poly(&mut rng, f, -6, 6);
        if let Some(d) = check_defects(&a, -4, 8) {
            return Err(d);
        }
    }
    let el = start.elapsed();
    check(el < Duration::from_secs(120), || format!("took {el:?}"))?;
    Ok(format!("500 elements against the [-4,8] grid, zero mismatches, {:.2}s", el.as_secs_f64()))
}

/// Nonzero constant of the residue field.
fn unit<R: Rng>(rng: &mut R, f: Field) -> Series {
    Series::constant(f, FieldElem(rng.gen_range(1..f.order())))
}

fn table_row(row: usize, rng: &mut ChaCha8Rng, f: Field) -> Result<(), String> {
    let zero = Series::zero(f);
    let alpha1 = random_poly(rng, f, 0, 3);
    let alpha2 = random_poly(rng, f, 0, 3);
    let a1 = unit(rng, f).shift(rng.gen_range(0..3));
    let a2 = unit(rng, f).shift(rng.gen_range(0..3));
    let (u, v) = (unit(rng, f), unit(rng, f));
    let s = rng.gen_range(1..5);
    let r = rng.gen_range(0..5);
    let mut theta_pt = Series::zero(f);
    let upper = |x: &Series, b: Series| Mat2::new(x.clone(), b, zero.clone(), x.clone());
    let (q1, q2, lambda, delta) = match row {
        1 => {
            // 1 + theta is a monomial, so its inverse is exact
            let k = rng.gen_range(-2..3);
            let one_theta = unit(rng, f).shift(k);
            let theta = &Series::one(f) + &one_theta;
            if theta.is_zero() {
                return Ok(());
            }
            theta_pt = theta.clone();
            let inv = one_theta.inv().unwrap();
            let e = &a2 * &inv;
            let q1 = Mat2::diag(&a1 + &alpha1, alpha1.clone());
            let q2 = Mat2::new(&(&e * &theta) + &alpha2, &e * &theta, e.clone(), &e + &alpha2);
            let lambda = &a1 * &alpha2 + &a2 * &alpha1 + &(&a1 * &a2) * &inv;
            let delta = &(&(&a1 * &a2).square() * &theta) * &inv.square();
            (q1, q2, lambda, delta)
        }
        2 => {
            let q1 = Mat2::diag(&a1 + &alpha1, alpha1.clone());
            let q2 = Mat2::diag(&a2 + &alpha2, alpha2.clone());
            (q1, q2, &a1 * &alpha2 + &a2 * &alpha1, zero.clone())
        }
        3 => {
            let q1 = upper(&alpha1, u.clone());
            let q2 = Mat2::new(alpha2.clone(), zero.clone(), (&v).shift(-s), alpha2.clone());
            let lambda = (&u * &v).shift(-s);
            (q1, q2, lambda.clone(), lambda.square())
        }
        4 => {
            let q1 = upper(&alpha1, u.clone());
            let q2 = upper(&alpha2, v.shift(s));
            (q1, q2, zero.clone(), zero.clone())
        }
        5 => {
            let q1 = Mat2::new(alpha1.clone(), zero.clone(), a1.clone(), &a1 + &alpha1);
            let q2 = upper(&alpha2, u.shift(r));
            let lambda = &a1 * &(&alpha2 + &u.shift(r));
            (q1, q2, lambda, (&a1 * &u).square().shift(2 * r))
        }
        _ => {
            let q1 = Mat2::diag(&a1 + &alpha1, alpha1.clone());
            let q2 = upper(&alpha2, u.shift(r));
            (q1, q2, &a1 * &alpha2, zero.clone())
        }
    };
    let (m1, m2) = (min_poly(&q1).map_err(|e| e.to_string())?, min_poly(&q2).map_err(|e| e.to_string())?);
    let got_lambda = sym_product(&q1, &q2);
    let got_delta = discriminant(&got_lambda, &m1, &m2);
    check(got_lambda == lambda && got_delta == delta, || {
        format!("row {row}: {q1} {q2}: lambda {got_lambda} vs {lambda}, Delta {got_delta} vs {delta}")
    })?;
    // the canonical matrices have the branches listed in the table
    let stem = |q: &Mat2| branch_shape(q).map_err(|e| e.to_string());
    let same = |p: &ProjPoint, q: &ProjPoint| match (p, q) {
        (ProjPoint::Finite(x), ProjPoint::Finite(y)) => x.eq_at_precision(y),
        _ => p == q,
    };
    let is_path = |b: &BranchShape, x: &ProjPoint, y: &ProjPoint| {
        matches!(b, BranchShape::ThickLine { stem: StemKind::BiInfinitePath(p, q), .. }
            if (same(p, x) && same(q, y)) || (same(p, y) && same(q, x)))
    };
    let is_foliage = |b: &BranchShape, x: &ProjPoint, l: i64| {
        matches!(b, BranchShape::InfiniteFoliage { end, leaf_level } if same(end, x) && *leaf_level == l)
    };
    let fin = |x: Series| ProjPoint::Finite(x);
    let (z, one, inf) = (fin(Series::zero(f)), fin(Series::one(f)), ProjPoint::Infinity);
    let (b1, b2) = (stem(&q1)?, stem(&q2)?);
    let ok = match row {
        1 => is_path(&b1, &z, &inf) && is_path(&b2, &one, &fin(theta_pt)),
        2 => is_path(&b1, &z, &inf) && is_path(&b2, &z, &inf),
        3 => is_foliage(&b1, &inf, 0) && is_foliage(&b2, &z, s),
        4 => is_foliage(&b1, &inf, 0) && is_foliage(&b2, &inf, s),
        5 => is_path(&b1, &z, &one) && is_foliage(&b2, &inf, r),
        _ => is_path(&b1, &z, &inf) && is_foliage(&b2, &inf, r),
    };
    check(ok, || format!("row {row}: branches {b1} and {b2}"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut n = 0;
    for tau in 1..=2 {
        let f = Field::with_degree(tau).unwrap();
        for row in 1..=6 {
            for _ in 0..50 {
                table_row(row, &mut rng, f)?;
                n += 1;
            }
        }
    }
    Ok(format!("6 rows, {n} randomized instances, exact equality"))
}

fn acceptance_report() -> SelfTestReport {
    let cfg = SelfTestConfig::new(Field::binary(), 8, 2, 7, 500);
    selftest(&cfg).expect("selftest runs")
}

fn criterion_4(report: &SelfTestReport, elapsed: Duration) -> Outcome {
    let p = &report.pairs;
    check(p.mismatches.is_empty(), || format!("{} mismatches, first: {:?}", p.mismatches.len(), p.mismatches[0]))?;
    let attempted: usize = p.cells.values().map(|c| c.attempted).sum();
    check(attempted >= 500, || format!("only {attempted} pairs"))?;
    let matched = |pred: &dyn Fn(&str) -> bool| p.cells.iter().any(|(k, c)| pred(k) && c.matched > 0);
    let required: [(&str, &dyn Fn(&str) -> bool); 7] = [
        ("A^i/A^i with lambda = 0", &|k| k == "A^i/A^i foliage-contained"),
        ("A^i/A^i with lambda != 0", &|k| k == "A^i/A^i foliage-meet"),
        ("A^s/A^s shared ray", &|k| k == "A^s/A^s shared-ray"),
        ("A^s/A^s shared maximal path", &|k| k == "A^s/A^s shared-max-path"),
        ("a B^s cell", &|k| k.contains("B^s")),
        ("a B^i cell", &|k| k.contains("B^i")),
        ("a mixed cell", &|k| k.starts_with("A^s/B^i") || k.starts_with("A^i/B^s")),
    ];
    for (name, pred) in required {
        check(matched(pred), || format!("no matched instance for {name}"))?;
    }
    check(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    let skipped: usize = p.cells.values().map(|c| c.skipped).sum();
    Ok(format!(
        "{attempted} pairs, {} matched, {skipped} skipped, 0 mismatches across {} cells, {:.1}s",
        p.matched(),
        p.cells.len(),
        elapsed.as_secs_f64()
    ))
}

fn criterion_5(report: &SelfTestReport) -> Outcome {
    let b = &report.branches;
    check(b.mismatches.is_empty(), || format!("{:?}", b.mismatches[0]))?;
    let attempted: usize = b.cells.values().map(|c| c.attempted).sum();
    check(attempted >= 200, || format!("only {attempted} branches"))?;
    for class in ["ReducibleSep", "UnramSep", "RamSep", "ReducibleInsep", "RamInsep"] {
        check(b.cells.get(class).is_some_and(|c| c.matched > 0), || format!("no matched {class} branch"))?;
    }
    Ok(format!("{attempted} branches over five classes, {} matched, 0 mismatches", b.matched()))
}

fn criterion_6(report: &SelfTestReport) -> Outcome {
    let t = &report.t_sign;
    check(t.positive_mismatches == 0, || t.resolution.clone())?;
    check(t.positive_matches >= 20, || format!("only {} certified B^s instances", t.positive_matches))?;
    Ok(format!(
        "{} certified B^s instances match with positive t; the floor reading mismatches {}",
        t.positive_matches, t.floor_mismatches
    ))
}

fn spec(f: Field, lambda: &str, m1: (&str, &str), m2: (&str, &str)) -> AlgebraSpec {
    let s = |x: &str| parse_series(f, x).unwrap();
    AlgebraSpec::from_coeffs(s(lambda), (s(m1.0), s(m1.1)), (s(m2.0), s(m2.1))).unwrap()
}

fn criterion_7() -> Outcome {
    let f = Field::binary();
    let ex = decide(&spec(f, "0", ("1", "1"), ("0", "t"))).map_err(|e| e.to_string())?;
    check(!ex.exists, || "division algebra example reported split".into())?;
    let cases = [
        (Condition::I, spec(f, "t^-1", ("1", "0"), ("0", "t"))),
        (Condition::I, spec(f, "1 + t", ("0", "t^2"), ("t", "1"))),
        (Condition::III, spec(f, "t", ("1", "0"), ("0", "t^2"))),
        (Condition::IV, spec(f, "t", ("0", "t^2"), ("1", "0"))),
        (Condition::V, spec(f, "0", ("0", "t"), ("0", "t^3"))),
        (Condition::V, spec(f, "0", ("0", "1 + t^2"), ("0", "t^2"))),
    ];
    for (cond, sp) in &cases {
        let v = decide(sp).map_err(|e| e.to_string())?;
        check(v.exists && v.matched_condition == *cond, || format!("{cond:?}: got {v:?}"))?;
        let (q1, q2) = v.witness.clone().ok_or_else(|| format!("{cond:?}: no witness"))?;
        let pair = make_pair(&q1, &q2).map_err(|e| format!("{cond:?}: {q1} {q2}: {e}"))?;
        check(validate_witness(sp, &q1, &q2).unwrap_or(false) && pair.lambda == sp.lambda, || {
            format!("{cond:?}: witness {q1} {q2} does not realise the spec")
        })?;
    }
    let mut conclusive = 0;
    for i in 0..200u64 {
        let sp = random_spec(&mut ChaCha8Rng::seed_from_u64(1000 + i), f);
        let (c, dis) = check_symbol(&sp, &SearchBox::default()).map_err(|e| e.to_string())?;
        if let Some(d) = dis {
            return Err(d);
        }
        conclusive += c as usize;
    }
    Ok(format!(
        "non-split example rejected, {} witness cases pass make_pair, 200 specs: {conclusive} conclusive, 0 disagreements",
        cases.len()
    ))
}

fn round_trips() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut n = 0;
    for i in 0..1000 {
        let f = Field::with_degree(1 + (i % 3) as u32).unwrap();
        let (lo, hi) = (rng.gen_range(-8..0), rng.gen_range(0..8));
        let mut a = random_poly(&mut rng, f, lo, hi);
        if rng.gen_bool(0.3) {
            a = a.truncate(rng.gen_range(-2..10));
        }
        check(parse_series(f, &a.to_string()).ok() == Some(a.clone()), || format!("series {a}"))?;

        let (q1, _) = random_pair(&mut rng, f);
        check(parse_mat2(f, &q1.to_string()).ok() == Some(q1.clone()), || format!("matrix {q1}"))?;

        let v = Vertex::new(&random_poly(&mut rng, f, -4, 6), rng.gen_range(-4..8)).unwrap();
        check(parse_vertex(f, &v.to_string()).ok() == Some(v.clone()), || format!("vertex {v}"))?;

        let h = HalfInt::Finite(rng.gen_range(-30..30));
        check(h.to_string().parse::<HalfInt>().ok() == Some(h), || format!("half-integer {h}"))?;

        let exact = random_poly(&mut rng, f, -6, 6);
        let d = as_defect(&exact).unwrap();
        let rec = DefectRecord {
            kind: "as".into(),
            input: exact.to_string(),
            ideal: d.ideal.to_string(),
            ideal_val: d.ideal.val,
            witness: d.witness.to_string(),
        };
        let back: DefectRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        check(back == rec && parse_series(f, &back.witness).ok() == Some(d.witness.clone()), || {
            format!("defect record {rec:?}")
        })?;

        let (ca, cb) = (random_poly(&mut rng, f, 0, 3), random_poly(&mut rng, f, 0, 3));
        let m = classify(&ca, &cb).unwrap();
        let rec = ClassifyRecord { a: ca.to_string(), b: cb.to_string(), class: m.class, family: m.class.family().into(), t: m.t };
        let back: ClassifyRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        check(back == rec && matches!(back.class, QuadClass::ReducibleSep | QuadClass::UnramSep | QuadClass::RamSep | QuadClass::ReducibleInsep | QuadClass::RamInsep), || format!("classify record {rec:?}"))?;

        let rec = ExistsRecord {
            lambda: a.to_string(),
            delta: exact.to_string(),
            exists: true,
            condition: "II".into(),
            witness: Some((q1.to_string(), q1.bar().to_string())),
            commutative_note: false,
            independent: Some(true),
        };
        let back: ExistsRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
        check(back == rec, || format!("exists record {rec:?}"))?;
        n += 1;
    }
    Ok(n)
}

fn criterion_8(report: &SelfTestReport) -> Outcome {
    let again = acceptance_report();
    check(report.to_json() == again.to_json(), || "seed 7 reports differ between runs".into())?;
    let small = SelfTestConfig::new(Field::binary(), 6, 2, 99, 60);
    let (x, y) = (selftest(&small).unwrap(), selftest(&small).unwrap());
    check(x.to_json() == y.to_json(), || "seed 99 reports differ between runs".into())?;
    let n = round_trips()?;
    Ok(format!("reports byte-identical across runs; {n} random values round-trip through every grammar"))
}

fn main() {
    let start = Instant::now();
    let t4 = Instant::now();
    let report = acceptance_report();
    let e4 = t4.elapsed();
    let results: Vec<(&str, Outcome)> = vec![
        ("defect image law", criterion_1()),
        ("defect brute-force agreement", criterion_2()),
        ("symmetric product table", criterion_3()),
        ("pair differential suite", criterion_4(&report, e4)),
        ("single-branch suite", criterion_5(&report)),
        ("sign of t", criterion_6(&report)),
        ("existence", criterion_7()),
        ("determinism and round-trip", criterion_8(&report)),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(msg) => println!("criterion {} ({name}): PASS - {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed in {:.1}s", results.len() - failed, results.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
