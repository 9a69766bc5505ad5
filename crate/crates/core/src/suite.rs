//! Running groups of checks from a single configuration.
//!
//! Suites share the objects they are built from (the evaluation pair, the
//! two-site currents); each is built once, on first use, and the checks run
//! on a rayon pool. Reports come back sorted by check id.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::currents::{build_zf, rescale_zf, check_lemma, check_subalgebra, check_zf, check_zf_coherence, extract_currents, CurrentSet, ZfData};
use crate::error::{EngineError, Result};
use crate::field::{Coeff, Field, Rational};
use crate::gauss::{check_full, check_inverse_blocks, check_recompose, partial_decompose, series_of, verify_uniqueness, Sign};
use crate::loperator::{
    build_evaluation_pair, check_antipode, check_coassociativity, check_defining_relations, check_inverse_relations,
    coproduct_pair, EvalParams, LPair,
};
use crate::ratfunc::RatFunc;
use crate::report::VerificationReport;
use crate::rmatrix::{check_permutation_at_one, check_unitarity, check_ybe, Convention, RMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Ybe,
    Unitarity,
    Rll,
    Inverse,
    Gauss,
    Hopf,
    Subalgebra,
    Lemma,
    Zf,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Ybe,
        Suite::Unitarity,
        Suite::Rll,
        Suite::Inverse,
        Suite::Gauss,
        Suite::Hopf,
        Suite::Subalgebra,
        Suite::Lemma,
        Suite::Zf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ybe => "ybe",
            Suite::Unitarity => "unitarity",
            Suite::Rll => "rll",
            Suite::Inverse => "inverse",
            Suite::Gauss => "gauss",
            Suite::Hopf => "hopf",
            Suite::Subalgebra => "subalgebra",
            Suite::Lemma => "lemma",
            Suite::Zf => "zf",
        }
    }

    /// Suites that only need the R-matrix.
    fn r_only(self) -> bool {
        matches!(self, Suite::Ybe | Suite::Unitarity)
    }

    fn needs_currents(self) -> bool {
        matches!(self, Suite::Subalgebra | Suite::Lemma | Suite::Zf)
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parameter that is either a formal indeterminate or a rational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Param {
    Symbolic,
    Value(Rational),
}

impl FromStr for Param {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "symbolic" {
            return Ok(Param::Symbolic);
        }
        Rational::parse(s).map(Param::Value).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Symbolic => f.write_str("symbolic"),
            Param::Value(v) => f.write_str(&v.to_text(&[])),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub n: usize,
    pub order: i64,
    pub convention: Convention,
    pub q: Param,
    pub a: Param,
    pub suites: Vec<Suite>,
    pub threads: Option<usize>,
    /// Largest `n` accepted while any parameter is symbolic.
    pub max_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 2,
            order: 8,
            convention: Convention::Corrected,
            q: Param::Symbolic,
            a: Param::Symbolic,
            suites: Suite::ALL.to_vec(),
            threads: None,
            max_n: 4,
        }
    }
}

impl RunConfig {
    /// Reasons the configuration cannot be run, as a usage message.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.n == 0 {
            return Err("n must be at least 1".into());
        }
        if self.order < 2 {
            return Err("order must be at least 2".into());
        }
        let symbolic = self.q == Param::Symbolic || self.a == Param::Symbolic;
        if symbolic && self.n > self.max_n {
            return Err(format!("n = {} exceeds the cap {} for symbolic runs", self.n, self.max_n));
        }
        if let Param::Value(q) = &self.q {
            // the only rational roots of unity are 1 and -1
            let abs = if q.inner() < &num_traits::Zero::zero() { q.neg() } else { q.clone() };
            if q.is_zero() || abs.is_one() {
                return Err(format!("q = {} is zero or a root of unity", q.to_text(&[])));
            }
        }
        if let Param::Value(a) = &self.a {
            if a.is_zero() {
                return Err("a must be nonzero".into());
            }
        }
        if self.suites.is_empty() {
            return Err("no suites selected".into());
        }
        if self.threads == Some(0) {
            return Err("thread count must be positive".into());
        }
        Ok(())
    }

    fn thread_count(&self) -> Option<usize> {
        self.threads.or_else(|| std::env::var("QGAUSS_THREADS").ok()?.parse().ok().filter(|&k| k > 0))
    }
}

/// Work generic over the scalar field chosen by the parameter modes.
pub trait FieldTask {
    type Output;
    /// `names` lists the indeterminates of `F`, outermost first.
    fn run<F: Field>(self, q: F, a: F, names: &[&str]) -> Self::Output;
}

/// Run `task` over the field for `(q, a)`: rational functions in the
/// symbolic parameters, `a` outermost, or the rationals when both are values.
pub fn with_field<T: FieldTask>(q: &Param, a: &Param, task: T) -> T::Output {
    type T2 = RatFunc<RatFunc<Rational>>;
    type S = RatFunc<Rational>;
    match (q, a) {
        (Param::Symbolic, Param::Symbolic) => task.run(T2::constant(S::var()), T2::var(), &["a", "q"]),
        (Param::Symbolic, Param::Value(a)) => task.run(S::var(), S::constant(a.clone()), &["q"]),
        (Param::Value(q), Param::Symbolic) => task.run(S::constant(q.clone()), S::var(), &["a"]),
        (Param::Value(q), Param::Value(a)) => task.run(q.clone(), a.clone(), &[]),
    }
}

/// Run every selected suite and return the reports sorted by check id.
pub fn run(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    cfg.validate().map_err(EngineError::Parse)?;
    let work = || -> Result<Vec<VerificationReport>> {
        let (r_suites, l_suites): (Vec<Suite>, Vec<Suite>) = cfg.suites.iter().partition(|s| s.r_only());
        let mut out = run_r_suites(cfg, &r_suites)?;
        out.extend(run_l_suites(cfg, &l_suites)?);
        out.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        Ok(out)
    };
    match cfg.thread_count() {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| EngineError::Parse(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn run_r_suites(cfg: &RunConfig, suites: &[Suite]) -> Result<Vec<VerificationReport>> {
    if suites.is_empty() {
        return Ok(Vec::new());
    }
    match &cfg.q {
        Param::Symbolic => r_reports(cfg, suites, RatFunc::<Rational>::var(), &["q"]),
        Param::Value(q) => r_reports(cfg, suites, q.clone(), &[]),
    }
}

fn r_reports<F: Field>(cfg: &RunConfig, suites: &[Suite], q: F, names: &[&str]) -> Result<Vec<VerificationReport>> {
    let r = RMatrix::build(cfg.n, cfg.convention, q.clone())?;
    let other = match cfg.convention {
        Convention::Corrected => Convention::Literal,
        Convention::Literal => Convention::Corrected,
    };
    let alt = RMatrix::build(cfg.n, other, q)?;
    let jobs: Vec<Suite> = suites.to_vec();
    let parts: Vec<Result<Vec<VerificationReport>>> = jobs
        .par_iter()
        .map(|s| match s {
            Suite::Ybe => {
                let main = check_ybe(&r, names)?;
                let side = check_ybe(&alt, names)?;
                Ok(vec![main.with_diagnostic(&format!("{} convention", other.name()), &side)])
            }
            Suite::Unitarity => Ok(vec![check_unitarity(&r, names)?, check_permutation_at_one(&r, names)?]),
            _ => Ok(Vec::new()),
        })
        .collect();
    flatten(parts)
}

fn flatten(parts: Vec<Result<Vec<VerificationReport>>>) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn run_l_suites(cfg: &RunConfig, suites: &[Suite]) -> Result<Vec<VerificationReport>> {
    if suites.is_empty() {
        return Ok(Vec::new());
    }
    type T = RatFunc<RatFunc<Rational>>;
    type S = RatFunc<Rational>;
    match (&cfg.q, &cfg.a) {
        (Param::Symbolic, Param::Symbolic) => {
            let zf = || zf_at_unit_scale(cfg, S::var());
            l_reports(cfg, suites, T::constant(S::var()), T::var(), &["a", "q"], Some(&zf))
        }
        (Param::Symbolic, Param::Value(a)) => l_reports(cfg, suites, S::var(), S::constant(a.clone()), &["q"], None),
        (Param::Value(q), Param::Symbolic) => {
            let zf = || zf_at_unit_scale(cfg, q.clone());
            l_reports(cfg, suites, S::constant(q.clone()), S::var(), &["a"], Some(&zf))
        }
        (Param::Value(q), Param::Value(a)) => l_reports(cfg, suites, q.clone(), a.clone(), &[], None),
    }
}

/// Second evaluation point of the two-site model, as a multiple of `a`.
const SECOND_POINT: (i64, i64) = (5, 2);

/// The two-site model depends on `z` and `a` only through `z/a`; with `a`
/// symbolic its ZF data is built at `a = 1` over the smaller field, where the
/// exact inversions are far cheaper.
fn zf_at_unit_scale<G: Field>(cfg: &RunConfig, q: G) -> Result<ZfData<RatFunc<G>>> {
    let r = RMatrix::build(cfg.n, cfg.convention, q)?;
    let at = |a: G| build_evaluation_pair(&EvalParams::new(cfg.n, a, cfg.order)?, &r);
    let b = G::from_rational(Rational::new(SECOND_POINT.0, SECOND_POINT.1).inner());
    let lp = coproduct_pair(&at(G::one())?, &at(b)?)?;
    rescale_zf(&build_zf(&lp.rational, lp.n, lp.dim, cfg.order)?, cfg.order)
}

type ZfBuilder<'a, F> = &'a (dyn Fn() -> Result<ZfData<F>> + Sync);

/// The two-site pair, its currents and the restricted R-matrix.
type Currents<F> = (LPair<F>, CurrentSet<F>, RMatrix<F>);

/// Objects shared by several suites, built at most once.
struct Context<'a, F: Field> {
    n: usize,
    order: i64,
    a: F,
    names: &'a [&'a str],
    r: RMatrix<F>,
    zf_builder: Option<ZfBuilder<'a, F>>,
    single: OnceLock<Result<LPair<F>>>,
    currents: OnceLock<Result<Currents<F>>>,
    zf: OnceLock<Result<ZfData<F>>>,
}

impl<F: Field> Context<'_, F> {
    fn pair_at(&self, a: &F, order: i64) -> Result<LPair<F>> {
        build_evaluation_pair(&EvalParams::new(self.n, a.clone(), order)?, &self.r)
    }

    fn single(&self) -> Result<&LPair<F>> {
        self.single.get_or_init(|| self.pair_at(&self.a, self.order)).as_ref().map_err(Clone::clone)
    }

    /// Second evaluation point of the two-site model.
    fn second_point(&self) -> F {
        self.a.mul(&F::from_rational(Rational::new(SECOND_POINT.0, SECOND_POINT.1).inner()))
    }

    fn currents(&self) -> Result<&Currents<F>> {
        self.currents
            .get_or_init(|| {
                let lp = coproduct_pair(self.single()?, &self.pair_at(&self.second_point(), self.order)?)?;
                let cs = currents_of(&lp, self.order)?;
                Ok((lp, cs, self.r.restrict_rbar()?))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    fn zf(&self) -> Result<&ZfData<F>> {
        self.zf
            .get_or_init(|| {
                if let Some(build) = self.zf_builder {
                    return build();
                }
                let (lp, _, _) = self.currents()?;
                build_zf(&lp.rational, lp.n, lp.dim, self.order)
            })
            .as_ref()
            .map_err(Clone::clone)
    }
}

/// Currents of an L-pair from the partial factors of both series.
pub fn currents_of<F: Field>(lp: &LPair<F>, order: i64) -> Result<CurrentSet<F>> {
    let size = lp.n * lp.dim;
    let fp = partial_decompose(&series_of(&lp.lplus, size, Sign::Plus), lp.n, lp.dim, Sign::Plus)?;
    let fm = partial_decompose(&series_of(&lp.lminus, size, Sign::Minus), lp.n, lp.dim, Sign::Minus)?;
    extract_currents(&fp, &fm, order)
}

/// Gauss checks for both signs of an L-pair.
pub fn gauss_reports<F: Field>(lp: &LPair<F>, names: &[&str]) -> Result<Vec<VerificationReport>> {
    let (n, d) = (lp.n, lp.dim);
    let mut out = Vec::new();
    for (s, sign) in [(&lp.lplus, Sign::Plus), (&lp.lminus, Sign::Minus)] {
        let l = series_of(s, n * d, sign);
        let fac = partial_decompose(&l, n, d, sign)?;
        out.push(check_recompose(&l, &fac, n, names)?);
        out.push(verify_uniqueness(&l, &fac, n, d, names)?);
        out.push(check_full(&l, n, d, sign, names)?);
        out.push(check_inverse_blocks(&l, &fac, n, names)?);
    }
    Ok(out)
}

/// RLL, inverse and Gauss checks for a given pair; used directly when the
/// pair comes from elsewhere (an import, a perturbation).
pub fn pair_reports<F: Field>(lp: &LPair<F>, r: &RMatrix<F>, suite: Suite, names: &[&str]) -> Result<Vec<VerificationReport>> {
    match suite {
        Suite::Rll => check_defining_relations(lp, r, names),
        Suite::Inverse => check_inverse_relations(lp, r, names),
        Suite::Gauss if lp.n >= 2 => gauss_reports(lp, names),
        Suite::Gauss => Ok(vec![VerificationReport::skipped(
            format!("gauss.n{}", lp.n),
            "L = (1 0; e 1)(K 0; 0 k)(1 f; 0 1)",
            "needs n >= 2",
        )]),
        Suite::Hopf => check_antipode(lp, names),
        _ => Err(EngineError::Parse(format!("suite {suite} does not act on a single pair"))),
    }
}

fn l_reports<'a, F: Field>(
    cfg: &RunConfig,
    suites: &[Suite],
    q: F,
    a: F,
    names: &'a [&'a str],
    zf_builder: Option<ZfBuilder<'a, F>>,
) -> Result<Vec<VerificationReport>> {
    let r = RMatrix::build(cfg.n, cfg.convention, q)?;
    let ctx = Context {
        n: cfg.n,
        order: cfg.order,
        a,
        names,
        r,
        zf_builder,
        single: OnceLock::new(),
        currents: OnceLock::new(),
        zf: OnceLock::new(),
    };
    let parts: Vec<Result<Vec<VerificationReport>>> =
        suites.par_iter().map(|&s| underflow_as_failure(s, cfg.n, suite_reports(&ctx, s))).collect();
    flatten(parts)
}

/// A window too small to compare anything is a failed check, not an
/// internal error.
fn underflow_as_failure(s: Suite, n: usize, r: Result<Vec<VerificationReport>>) -> Result<Vec<VerificationReport>> {
    match r {
        Err(EngineError::WindowUnderflow(m)) => Ok(vec![VerificationReport::failed(
            format!("{s}.n{n}"),
            s.name(),
            format!("window underflow: {m}"),
            std::time::Instant::now(),
        )]),
        other => other,
    }
}

fn suite_reports<F: Field>(ctx: &Context<'_, F>, s: Suite) -> Result<Vec<VerificationReport>> {
    let names = ctx.names;
    if s.needs_currents() && ctx.n < 2 {
        return Ok(vec![VerificationReport::skipped(format!("{s}.n{}", ctx.n), s.name(), "needs n >= 2")]);
    }
    match s {
        Suite::Rll | Suite::Inverse | Suite::Gauss => pair_reports(ctx.single()?, &ctx.r, s, names),
        Suite::Hopf => {
            let lp = ctx.single()?;
            let small = ctx.order.min(4);
            let b = ctx.pair_at(&ctx.second_point(), small)?;
            let co = coproduct_pair(&ctx.pair_at(&ctx.a, small)?, &b)?;
            let mut out: Vec<VerificationReport> = check_defining_relations(&co, &ctx.r, names)?
                .into_iter()
                .map(|mut x| {
                    x.check_id = format!("hopf.coproduct.{}", x.check_id);
                    x
                })
                .collect();
            let tiny = ctx.order.min(3);
            let c = ctx.pair_at(&ctx.a.mul(&F::from_int(3)), tiny)?;
            out.push(check_coassociativity(&ctx.pair_at(&ctx.a, tiny)?, &ctx.pair_at(&ctx.second_point(), tiny)?, &c, names)?);
            out.extend(check_antipode(lp, names)?);
            Ok(out)
        }
        Suite::Subalgebra => {
            let (_, cs, rbar) = ctx.currents()?;
            check_subalgebra(cs, rbar, names)
        }
        Suite::Lemma => {
            let (_, cs, rbar) = ctx.currents()?;
            check_lemma(cs, rbar, names)
        }
        Suite::Zf => {
            let (_, cs, rbar) = ctx.currents()?;
            let zd = ctx.zf()?;
            let mut out = vec![check_zf_coherence(cs, zd, names)?];
            out.extend(check_zf(cs, zd, rbar, names)?);
            Ok(out)
        }
        Suite::Ybe | Suite::Unitarity => Ok(Vec::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("all".parse::<Suite>().is_err());
    }

    #[test]
    fn params_parse() {
        assert_eq!("symbolic".parse::<Param>().unwrap(), Param::Symbolic);
        assert_eq!("3/2".parse::<Param>().unwrap(), Param::Value(Rational::new(3, 2)));
        assert!("x".parse::<Param>().is_err());
    }

    #[test]
    fn invalid_configs() {
        let ok = RunConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            RunConfig { n: 0, ..ok.clone() },
            RunConfig { order: 1, ..ok.clone() },
            RunConfig { n: 5, ..ok.clone() },
            RunConfig { q: Param::Value(Rational::new(-1, 1)), ..ok.clone() },
            RunConfig { a: Param::Value(Rational::new(0, 1)), ..ok.clone() },
            RunConfig { suites: vec![], ..ok.clone() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        let numeric = RunConfig { n: 5, q: Param::Value(Rational::new(3, 2)), a: Param::Value(Rational::new(2, 1)), ..ok };
        assert!(numeric.validate().is_ok());
    }
}
