//! The twelve acceptance criteria, one PASS/FAIL line each. Runs as a plain
//! binary so the lines are always shown; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use qgauss_core::loperator::{build_evaluation_pair, EvalParams, LPair};
use qgauss_core::suite::pair_reports;
use qgauss_core::{
    run, with_field, Convention, Field, FieldTask, Mat, Param, RMatrix, RunConfig, Suite, TruncSeries, Verdict,
    VerificationReport,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn suite(n: usize, order: i64, suites: &[Suite]) -> Result<Vec<VerificationReport>, String> {
    let cfg = RunConfig { n, order, suites: suites.to_vec(), ..RunConfig::default() };
    run(&cfg).map_err(|e| format!("n={n}: {e}"))
}

fn all_pass(reports: &[VerificationReport]) -> Result<(), String> {
    match reports.iter().find(|r| r.verdict != Verdict::Pass) {
        Some(r) => Err(r.summary_line()),
        None => Ok(()),
    }
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> Result<T, String>) -> Result<(T, Duration), String> {
    let t = Instant::now();
    let v = f()?;
    let dt = t.elapsed();
    if dt > limit {
        return Err(format!("{what} took {dt:.1?}, limit {limit:?}"));
    }
    Ok((v, dt))
}

fn ybe() -> Outcome {
    let mut times = Vec::new();
    for n in 1..=3 {
        let (reports, dt) = timed(Duration::from_secs(30), &format!("ybe n={n}"), || suite(n, 2, &[Suite::Ybe]))?;
        all_pass(&reports)?;
        let r = &reports[0];
        if !r.notes.iter().any(|x| x.starts_with("literal convention")) {
            return Err(format!("n={n}: literal-convention diagnostic missing"));
        }
        times.push(format!("n={n} {dt:.2?}"));
    }
    Ok(times.join(", "))
}

fn unitarity() -> Outcome {
    let mut times = Vec::new();
    for n in 1..=3 {
        let (reports, dt) = timed(Duration::from_secs(30), &format!("unitarity n={n}"), || suite(n, 2, &[Suite::Unitarity]))?;
        let u: Vec<_> = reports.into_iter().filter(|r| r.check_id.starts_with("unitarity.")).collect();
        if u.len() != 1 {
            return Err(format!("n={n}: expected one unitarity report"));
        }
        all_pass(&u)?;
        times.push(format!("n={n} {dt:.2?}"));
    }
    Ok(times.join(", "))
}

fn r_at_one() -> Outcome {
    for n in 1..=4 {
        let reports = suite(n, 2, &[Suite::Unitarity])?;
        let r: Vec<_> = reports.into_iter().filter(|r| r.check_id.starts_with("r_at_one.")).collect();
        if r.len() != 1 {
            return Err(format!("n={n}: expected one R(1) report"));
        }
        all_pass(&r)?;
    }
    Ok("n=1..4".into())
}

/// The two settings used by the L-level criteria.
const SETTINGS: [(usize, i64); 2] = [(2, 6), (3, 4)];

fn per_setting(s: Suite, limit: Duration, check: impl Fn(&[VerificationReport]) -> Result<(), String>) -> Outcome {
    let mut parts = Vec::new();
    for (n, order) in SETTINGS {
        let (reports, dt) = timed(limit, &format!("{s} n={n}"), || suite(n, order, &[s]))?;
        all_pass(&reports)?;
        check(&reports)?;
        parts.push(format!("n={n} N={order}: {} checks {dt:.1?}", reports.len()));
    }
    Ok(parts.join(", "))
}

fn require(reports: &[VerificationReport], prefixes: &[&str]) -> Result<(), String> {
    for p in prefixes {
        if !reports.iter().any(|r| r.check_id.starts_with(p)) {
            return Err(format!("no check {p}*"));
        }
    }
    Ok(())
}

fn rll() -> Outcome {
    per_setting(Suite::Rll, Duration::from_secs(120), |r| require(r, &["rll.pp.", "rll.pm.", "rll.mm."]))
}

fn inverse() -> Outcome {
    per_setting(Suite::Inverse, Duration::from_secs(120), |r| {
        require(r, &["inverse.1.", "inverse.2.", "inverse.3.", "inverse.4.", "inverse.5.", "inverse.6."])
    })
}

fn gauss() -> Outcome {
    per_setting(Suite::Gauss, Duration::from_secs(120), |r| {
        let mut want = Vec::new();
        for sign in ["plus", "minus"] {
            for c in ["partial.recompose", "partial.uniqueness", "full", "inverse_blocks"] {
                want.push(format!("gauss.{c}.{sign}."));
            }
        }
        require(r, &want.iter().map(String::as_str).collect::<Vec<_>>())
    })
}

fn subalgebra() -> Outcome {
    per_setting(Suite::Subalgebra, Duration::from_secs(120), |r| {
        require(r, &["subalgebra.pp.", "subalgebra.pm.", "subalgebra.mm."])
    })
}

fn lemma() -> Outcome {
    per_setting(Suite::Lemma, Duration::from_secs(120), |r| {
        require(
            r,
            &[
                "lemma.kk.plus",
                "lemma.kk.mixed",
                "lemma.KE.",
                "lemma.KF.",
                "lemma.kE.",
                "lemma.kF.",
                "lemma.dressed.",
                "lemma.EE.",
                "lemma.FF.",
                "lemma.EF.",
            ],
        )
    })
}

fn zf() -> Outcome {
    per_setting(Suite::Zf, Duration::from_secs(120), |r| {
        require(r, &["zf.display1.", "zf.display4.", "zf.EbarEbar.", "zf.FF.", "zf.coherence."])
    })
}

fn hopf() -> Outcome {
    let reports = suite(2, 4, &[Suite::Hopf])?;
    all_pass(&reports)?;
    require(
        &reports,
        &["hopf.coproduct.rll.pp.", "hopf.coproduct.rll.pm.", "hopf.coproduct.rll.mm.", "hopf.coassociativity.", "hopf.antipode."],
    )?;
    Ok(format!("{} checks", reports.len()))
}

/// Adds one to a single coefficient of `L+` and reruns every suite that
/// acts on a pair.
struct Mutations {
    count: usize,
    seed: u64,
}

impl FieldTask for Mutations {
    type Output = Outcome;

    fn run<F: Field>(self, q: F, a: F, names: &[&str]) -> Outcome {
        let (n, order) = (2, 4);
        let r = RMatrix::build(n, Convention::Corrected, q).map_err(|e| e.to_string())?;
        let base = build_evaluation_pair(&EvalParams::new(n, a, order).map_err(|e| e.to_string())?, &r)
            .map_err(|e| e.to_string())?;
        let size = n * base.dim;
        let (lo, hi) = base.lplus.window();
        let mut cells: Vec<(usize, usize, i64)> =
            (0..size).flat_map(|i| (0..size).flat_map(move |j| (lo..=hi).map(move |k| (i, j, k)))).collect();
        cells.shuffle(&mut StdRng::seed_from_u64(self.seed));
        let (mut by_verdict, mut by_error) = (0, 0);
        for &(i, j, k) in cells.iter().take(self.count) {
            let lp = perturb(&base, i, j, k);
            let (mut caught, mut errors) = (Vec::new(), Vec::new());
            for s in [Suite::Rll, Suite::Inverse, Suite::Gauss, Suite::Hopf] {
                match pair_reports(&lp, &r, s, names) {
                    Ok(reports) => {
                        caught.extend(reports.into_iter().filter(|x| x.verdict == Verdict::Fail).map(|x| x.check_id))
                    }
                    Err(e) => errors.push(format!("{s}: {e}")),
                }
            }
            if !caught.is_empty() {
                by_verdict += 1;
            } else if !errors.is_empty() {
                by_error += 1;
            } else {
                return Err(format!("mutation of l+_{i}{j}[{k}] went undetected"));
            }
        }
        Ok(format!(
            "{}/{} mutations detected ({by_verdict} by a failed check, {by_error} by an arithmetic error)",
            by_verdict + by_error,
            self.count
        ))
    }
}

fn perturb<F: Field>(lp: &LPair<F>, i: usize, j: usize, k: i64) -> LPair<F> {
    let size = lp.lplus.terms().next().map(|(_, m)| m.rows()).unwrap_or(0);
    let mut coeffs: BTreeMap<i64, Mat<F>> = lp.lplus.terms().map(|(e, m)| (e, m.clone())).collect();
    let m = coeffs.entry(k).or_insert_with(|| Mat::zeros(size, size));
    let v = m.get(i, j).add(&F::one());
    m.set(i, j, v);
    let (lo, hi) = lp.lplus.window();
    let mut out = lp.clone();
    out.lplus = TruncSeries::new(lo, hi, lp.lplus.zero_below(), lp.lplus.zero_above(), coeffs);
    out
}

fn mutation() -> Outcome {
    with_field(&Param::Symbolic, &Param::Symbolic, Mutations { count: 24, seed: 0x5eed })
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qgauss");
    let once = || -> Result<(String, String), String> {
        let out = Command::new(bin)
            .args(["check", "all", "--n", "2", "--order", "6", "--format", "json"])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("exit status {}", out.status));
        }
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        let stripped = text.lines().filter(|l| !l.trim_start().starts_with("\"wall_time\"")).collect::<Vec<_>>().join("\n");
        Ok((text, stripped))
    };
    let ((raw, a), (_, b)) = (once()?, once()?);
    if a != b {
        return Err("reports differ".into());
    }
    let checks = serde_json::from_str::<serde_json::Value>(&raw)
        .ok()
        .and_then(|v| v.as_array().map(Vec::len))
        .ok_or("output is not a JSON array")?;
    Ok(format!("{checks} reports identical modulo wall_time"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("YBE", ybe),
        ("unitarity", unitarity),
        ("R(1) = P", r_at_one),
        ("RLL", rll),
        ("inverse relations", inverse),
        ("Gauss decompositions", gauss),
        ("subalgebra", subalgebra),
        ("Lemma", lemma),
        ("ZF", zf),
        ("Hopf", hopf),
        ("mutation sensitivity", mutation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match f() {
            Ok(d) => ("PASS", d),
            Err(e) => {
                failed += 1;
                ("FAIL", e)
            }
        };
        println!("{tag}  {:>2}. {name:<22} {detail}  ({:.1?})", k + 1, t.elapsed());
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}
