//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num::BigRational;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use common::oracle::{
    brute_force_tag, coboundary_identity_at_points, telescoper_holds_entrywise, torus_refutation,
    untwisted_residual,
};
use common::*;
use qdiff::hypergeom::{
    build_operator, classify, classify_balanced, torus_is_connected, GroupTag, HypergeometricSpec,
};
use qdiff::isomono::{search_telescoper, verify_telescoper, TelescoperMode, TelescoperQuery};
use qdiff::matrix::MatrixOverRat;
use qdiff::newton::{newton_polygon, puiseux_solve, twist_operator};
use qdiff::parse::{parse_expvec, parse_factored};
use qdiff::qdivisor::{
    classify_rank_one, div_q, divq_twisted_product, is_q_trivial, solve_b, RankOneTag,
};
use qdiff::ratfun::FactoredRat;
use qdiff::scalars::{rat, Exponent, ExponentVector, QScalar};
use qdiff::series::verify_series;
use qdiff_cli::{build_document, parse_input, run};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Sampler(TestRunner);

impl Sampler {
    fn new() -> Sampler {
        Sampler(TestRunner::deterministic())
    }

    fn draw<S: Strategy>(&mut self, s: &S) -> S::Value {
        s.new_tree(&mut self.0)
            .expect("strategy produces values")
            .current()
    }
}

fn spec(alphas: &[&str], betas: &[&str]) -> HypergeometricSpec {
    let ev = |xs: &[&str]| xs.iter().map(|x| parse_expvec(x).unwrap()).collect();
    HypergeometricSpec::new(ev(alphas), ev(betas), QScalar::one()).unwrap()
}

fn rationals(xs: &[&str]) -> Vec<BigRational> {
    xs.iter()
        .map(|x| parse_expvec(x).unwrap().as_rational().unwrap().clone())
        .collect()
}

fn coboundary_round_trip() -> Outcome {
    let mut s = Sampler::new();
    for i in 0..200 {
        let b = s.draw(&general_factored(6));
        let c = s.draw(&monomial());
        let m = s.draw(&(-3i64..=3));
        let f = b
            .sigma_q()
            .div(&b)
            .mul(&FactoredRat::z_pow(m))
            .scale_unit(&c);
        ensure(is_q_trivial(&f), || format!("case {i}: {f} not q-trivial"))?;
        let w = solve_b(&f).map_err(|e| format!("case {i}: {e}"))?;
        ensure(
            w.verify(&f) && coboundary_identity_at_points(&f, &w.c, w.m, &w.b),
            || format!("case {i}: witness identity fails for {f}"),
        )?;
    }
    Ok("200 coboundaries".into())
}

fn divisor_properties() -> Outcome {
    let mut s = Sampler::new();
    for i in 0..200 {
        let f = s.draw(&general_factored(5));
        let g = s.draw(&general_factored(5));
        ensure(div_q(&f.mul(&g)) == div_q(&f).add(&div_q(&g)), || {
            format!("pair {i}: not additive")
        })?;
        ensure(div_q(&f.sigma_q()) == div_q(&f), || {
            format!("pair {i}: not σ_q-invariant")
        })?;
    }
    let mut checked = 0;
    while checked < 100 {
        let f = s.draw(&general_factored(5));
        if div_q(&f).is_zero() {
            continue;
        }
        let r = s.draw(&(1usize..=4));
        let mut k: Vec<i64> = (0..=r).map(|_| s.draw(&(-2i64..=2))).collect();
        k[0] = s.draw(&prop_nonzero());
        k[r] = s.draw(&prop_nonzero());
        ensure(!divq_twisted_product(&f, &k).is_zero(), || {
            format!("{f} with {k:?}: twisted product is trivial")
        })?;
        checked += 1;
    }
    Ok("200 pairs, 100 twisted products".into())
}

fn prop_nonzero() -> impl Strategy<Value = i64> {
    proptest::prop_oneof![-2i64..=-1, 1i64..=2]
}

/// Fractions in `[0, 1)` with denominator at most `max_den`.
fn farey(max_den: i64) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = (1..=max_den)
        .flat_map(|d| (0..d).map(move |n| rat(n, d)))
        .collect();
    v.sort();
    v.dedup();
    v
}

fn multisets(
    grid: &[BigRational],
    k: usize,
    from: usize,
    prefix: &mut Vec<BigRational>,
    out: &mut Vec<Vec<BigRational>>,
) {
    if prefix.len() == k {
        out.push(prefix.clone());
        return;
    }
    for i in from..grid.len() {
        prefix.push(grid[i].clone());
        multisets(grid, k, i, prefix, out);
        prefix.pop();
    }
}

fn all_multisets(grid: &[BigRational], k: usize) -> Vec<Vec<BigRational>> {
    let mut out = Vec::new();
    multisets(grid, k, 0, &mut Vec::new(), &mut out);
    out
}

fn rational_spec(alphas: &[BigRational], betas: &[BigRational]) -> HypergeometricSpec {
    let ev = |x: &BigRational| ExponentVector::rational(x.clone());
    HypergeometricSpec::new(
        alphas.iter().map(ev).collect(),
        betas.iter().map(ev).collect(),
        QScalar::one(),
    )
    .unwrap()
}

/// `0` in the grid stands for `β = 1`, which is the same class mod `Z`.
fn as_beta(x: &BigRational) -> BigRational {
    if x == &rat(0, 1) {
        rat(1, 1)
    } else {
        x.clone()
    }
}

/// Every pair of alpha and beta multisets over the grid, for `n = 2, 3`.
fn classifier_grid() -> Outcome {
    let grid = farey(6);
    let mut cases: Vec<(Vec<BigRational>, Vec<BigRational>)> = Vec::new();
    for n in 2..=3 {
        let sets = all_multisets(&grid, n);
        for a in &sets {
            for b in &sets {
                cases.push((a.clone(), b.iter().map(as_beta).collect()));
            }
        }
    }
    let mut counts = std::collections::BTreeMap::new();
    for (alphas, betas) in &cases {
        let expected = brute_force_tag(alphas, betas);
        let v = classify_balanced(&rational_spec(alphas, betas)).map_err(|e| e.to_string())?;
        ensure(v.tag == expected, || {
            format!(
                "{alphas:?} / {betas:?}: got {:?}, oracle {expected:?}",
                v.tag
            )
        })?;
        if let Some(w) = &v.pairing {
            let ok = |xs: &[BigRational], mu: &[usize]| {
                xs.iter()
                    .enumerate()
                    .all(|(i, x)| (&w.gamma + x + &xs[mu[i] - 1]).is_integer())
            };
            ensure(ok(alphas, &w.mu1.0) && ok(betas, &w.mu2.0), || {
                format!("{alphas:?} / {betas:?}: bad witness")
            })?;
        }
        *counts.entry(format!("{expected:?}")).or_insert(0usize) += 1;
    }
    let summary: Vec<String> = counts.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Ok(format!("{} specs ({})", cases.len(), summary.join(", ")))
}

fn regression_verdicts() -> Outcome {
    let cases: [(&[&str], &[&str], GroupTag); 4] = [
        (&["1/3", "1/5"], &["1", "1/7"], GroupTag::SL),
        (
            &["1/8", "3/8", "5/8", "7/8"],
            &["1", "1/3", "2/3", "1"],
            GroupTag::Sp,
        ),
        (&["1/4", "3/4"], &["1", "3/2"], GroupTag::KummerInduced),
        (&["1/2", "1/3"], &["1", "3/2"], GroupTag::Reducible),
    ];
    for (a, b, tag) in cases {
        let v = classify(&spec(a, b)).map_err(|e| e.to_string())?;
        let oracle = brute_force_tag(&rationals(a), &rationals(b));
        ensure(v.tag == tag && oracle == tag, || {
            format!("{a:?}: got {:?}, oracle {oracle:?}", v.tag)
        })?;
        match tag {
            GroupTag::Sp => {
                let w = v.pairing.as_ref().ok_or("Sp verdict without pairing")?;
                ensure(
                    w.gamma == rat(0, 1) && w.mu1.cycles() == "(1 4)(2 3)",
                    || format!("pairing γ = {}, μ_1 = {}", w.gamma, w.mu1.cycles()),
                )?;
            }
            GroupTag::KummerInduced => {
                let d = v.kummer.as_ref().map(|k| k.d);
                ensure(d == Some(2), || format!("Kummer d = {d:?}"))?;
            }
            _ => {}
        }
    }
    Ok("SL, Sp (γ = 0, μ_1 = (1 4)(2 3)), Kummer d = 2, Reducible".into())
}

fn torus_regression() -> Outcome {
    let mut s = Sampler::new();
    let grid = farey(4);
    let (mut connected, mut split) = (0, 0);
    for i in 0..50 {
        let n = s.draw(&(1usize..=3));
        let mut alphas: Vec<ExponentVector> = (0..n)
            .map(|_| {
                let p = &grid[s.draw(&(0..grid.len()))];
                let t = s.draw(&(-2i64..=2));
                let t2 = if i % 3 == 0 { s.draw(&(-1i64..=1)) } else { 0 };
                parse_expvec(&format!("{t}*tau + {t2}*tau2 + {p}")).unwrap()
            })
            .collect();
        let c = torus_is_connected(&alphas);
        let refuted = torus_refutation(&alphas, 6).is_some();
        ensure(c != refuted, || {
            format!("case {i}: connected = {c}, refutation found = {refuted}")
        })?;
        if c {
            connected += 1;
        } else {
            split += 1;
        }
        let mut dup = alphas.clone();
        dup.push(alphas[s.draw(&(0..n))].clone());
        alphas.reverse();
        ensure(
            torus_is_connected(&dup) == c && torus_is_connected(&alphas) == c,
            || format!("case {i}: not invariant under duplication or permutation"),
        )?;
    }
    Ok(format!("50 cases ({connected} connected, {split} not)"))
}

fn series_annihilation() -> Outcome {
    let mut s = Sampler::new();
    let mut worst: Option<Exponent> = None;
    for i in 0..20 {
        let spec = s.draw(&series_spec(3, 8));
        let a = verify_series(&spec, 30).map_err(|e| format!("case {i}: {e}"))?;
        ensure(a.valuation >= Exponent::from_int(28), || {
            format!("case {i}: residual valuation {}", a.valuation)
        })?;
        if worst.as_ref().is_none_or(|w| &a.valuation < w) {
            worst = Some(a.valuation.clone());
        }
    }
    Ok(format!(
        "20 specs, minimum residual valuation {}",
        worst.unwrap()
    ))
}

fn newton_regression() -> Outcome {
    let p =
        newton_polygon(&build_operator(&spec(&["1/3", "1/5"], &[])).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let slopes: Vec<Exponent> = p.slopes.iter().map(|(s, _)| s.clone()).collect();
    ensure(slopes == vec![Exponent::new(1, 2)] && p.l == 2, || {
        format!("slopes {slopes:?}, l = {}", p.l)
    })?;
    let mut s = Sampler::new();
    let mut solved = 0;
    for i in 0..100 {
        let op = s.draw(&operator(6));
        let k = s.draw(&(0u32..4));
        let c = s.draw(&monomial());
        let a = newton_polygon(&op).map_err(|e| e.to_string())?;
        let b = newton_polygon(&twist_operator(&op, k, &QScalar::from_monomial(&c)))
            .map_err(|e| e.to_string())?;
        ensure(a.slopes == b.slopes && a.l == b.l, || {
            format!("operator {i}: slopes change under twist")
        })?;
        let order = Exponent::from_int(3);
        for idx in 0..a.slopes.len() {
            let Ok(sol) = puiseux_solve(&op, &order, Some(idx)) else {
                continue;
            };
            ensure(sol.residual_valuation >= order, || {
                format!(
                    "operator {i}, slope {idx}: residual valuation {}",
                    sol.residual_valuation
                )
            })?;
            ensure(
                untwisted_residual(&op, &sol.c, &sol.r, &sol.y).is_zero(),
                || format!("operator {i}, slope {idx}: independent residual is nonzero"),
            )?;
            solved += 1;
        }
    }
    Ok(format!(
        "2Φ0 slopes {{1/2}}, l = 2; 100 operators, {solved} solves checked"
    ))
}

fn telescoper_suite() -> Outcome {
    let m = |rows: &[&[&str]]| {
        MatrixOverRat::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|x| qdiff::parse::parse_zratfun(x).unwrap())
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    };
    let search = |a: &MatrixOverRat, mode, bound| {
        search_telescoper(&TelescoperQuery::new(a.clone(), mode, Some(bound)).unwrap())
            .map_err(|e| e.to_string())
    };
    let a = m(&[&["2", "1"], &["0", "q"]]);
    let r = search(&a, TelescoperMode::ContinuousProjective, 2)?;
    ensure(
        r.found && r.b.as_ref().is_some_and(MatrixOverRat::is_zero),
        || "constant A: B = 0 not found".into(),
    )?;
    let a = m(&[&["2", "0"], &["0", "q"]]);
    let r = search(&a, TelescoperMode::Discrete(1), 1)?;
    ensure(r.b.as_ref() == Some(&MatrixOverRat::identity(2)), || {
        "diagonal A: B = I not found".into()
    })?;
    let companion = MatrixOverRat::companion(
        &build_operator(&spec(&["1/3", "1/5"], &["1", "1/7"])).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    for bound in 0..=10 {
        let r = search(&companion, TelescoperMode::ContinuousProjective, bound)?;
        ensure(!r.found, || {
            format!("SL_2 companion: telescoper found at bound {bound}")
        })?;
    }
    let mut s = Sampler::new();
    let mut found = 0;
    for i in 0..40 {
        let a = s.draw(&invertible_matrix());
        let mode = s.draw(&telescoper_mode());
        let bound = s.draw(&(0u32..=2));
        let r = search(&a, mode, bound)?;
        if let Some(b) = &r.b {
            ensure(
                verify_telescoper(&a, mode, b) && telescoper_holds_entrywise(&a, mode, b),
                || format!("random case {i}: found B fails the equation"),
            )?;
            found += 1;
        }
    }
    Ok(format!(
        "B = 0, B = I, companion bounds 0..10 negative, {found}/40 random finds verified"
    ))
}

fn rank_one_verdicts() -> Outcome {
    let cases = [
        ("z - q^(1/2)", RankOneTag::FullGL1_Independent, None),
        (
            "3*z^2*(z - q)/(z - q^4)",
            RankOneTag::ProperSubgroupH_Dependent,
            Some(2),
        ),
        ("5", RankOneTag::SigmaQPrimeConstant, Some(0)),
    ];
    for (text, tag, m) in cases {
        let f = parse_factored(text).map_err(|e| e.to_string())?;
        let v = classify_rank_one(&f);
        ensure(v.tag == tag, || format!("{text}: {:?}", v.tag))?;
        ensure(v.witness.as_ref().map(|w| w.m) == m, || {
            format!("{text}: witness {:?}", v.witness)
        })?;
        if let Some(w) = &v.witness {
            ensure(coboundary_identity_at_points(&f, &w.c, w.m, &w.b), || {
                format!("{text}: witness identity fails")
            })?;
        }
    }
    Ok("3 verdicts".into())
}

fn regression_jobs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/regression.jobs")
}

fn cli_determinism() -> Outcome {
    let path = regression_jobs();
    let run_batch = || {
        Command::new(env!("CARGO_BIN_EXE_qdiff"))
            .arg("--jobs")
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run_batch()?, run_batch()?);
    ensure(a.status.success() && b.status.success(), || {
        "regression batch reported an error".into()
    })?;
    ensure(a.stdout == b.stdout, || "two runs differ".into())?;
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let jobs: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    for job in &jobs {
        let doc = parse_input(job).map_err(|e| format!("{job}: {e}"))?;
        let report = run(&doc).map_err(|e| format!("{job}: {e}"))?;
        let echo = serde_json::to_string(&report.input).unwrap();
        let again = build_document(report.command.name(), &echo, doc.options.clone())
            .map_err(|e| format!("{job}: {e}"))?;
        let report2 = run(&again).map_err(|e| format!("{job}: {e}"))?;
        ensure(report == report2, || {
            format!("{job}: report changes after re-parsing its echo")
        })?;
    }
    Ok(format!(
        "{} jobs, {} bytes identical, echoes re-parse",
        jobs.len(),
        a.stdout.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 10] = [
        ("coboundary round trip", coboundary_round_trip, Some(10)),
        (
            "q-divisor homomorphism and twisted products",
            divisor_properties,
            Some(10),
        ),
        (
            "balanced classifier against brute force",
            classifier_grid,
            Some(120),
        ),
        ("fixed classification verdicts", regression_verdicts, None),
        (
            "torus connectivity against refutation search",
            torus_regression,
            Some(5),
        ),
        (
            "series annihilation at order 30",
            series_annihilation,
            Some(30),
        ),
        (
            "Newton polygons and formal solutions",
            newton_regression,
            None,
        ),
        ("telescoper searches", telescoper_suite, Some(60)),
        ("rank-one verdicts", rank_one_verdicts, None),
        ("CLI determinism and round trip", cli_determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(detail), Some(secs)) if elapsed > Duration::from_secs(*secs) => {
                Err(format!("{detail}; took longer than the {secs} s limit"))
            }
            (o, _) => o,
        };
        let limit_text = limit.map_or(String::new(), |s| format!(" / {s} s"));
        match outcome {
            Ok(detail) => println!(
                "PASS {:>2} {name}: {detail} [{:.2} s{limit_text}]",
                i + 1,
                elapsed.as_secs_f64()
            ),
            Err(why) => {
                failures += 1;
                println!(
                    "FAIL {:>2} {name}: {why} [{:.2} s{limit_text}]",
                    i + 1,
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
