//! Batch verification harness behind the `verify` binary.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::domains::{FlatDomain, FlatMethod, HermMethod, OmegaDomain};
use crate::error::{Error, Result};
use crate::numeric::c;
use crate::report::VerificationReport;
use crate::riesz::{converges, gamma_check, laplace_check, superbosonise_check, weighted_lt_check};
use crate::sfunc::StructuredFunction;
use crate::smat::MultiIndex;
use crate::{osc, properties, weights};

#[derive(Debug, Parser)]
#[command(name = "verify", version, about = "Numerical and exact checks of the superbosonisation identity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Flat integral vs. Ω integral vs. closed form.
    Sbos(RunArgs),
    /// Gindikin Γ of Ω, numeric vs. closed form.
    Gamma(RunArgs),
    /// Laplace transform of conical functions.
    Laplace(RunArgs),
    /// Weighted Laplace transform after the Cayley transform.
    Wtlap(RunArgs),
    /// Exact oscillator brackets and highest weight.
    Oscillator(RunArgs),
    /// Odd-reflection chain to the adapted Borel.
    Borel(RunArgs),
    /// Random-instance algebraic identities.
    Properties(RunArgs),
    /// Aggregate report files into a table.
    Summary { paths: Vec<PathBuf> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Quad,
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Even size(s), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub p: Vec<usize>,
    /// Odd size(s), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub q: Vec<usize>,
    /// Exponent(s) n; defaults to max(p, 1) per case.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<i64>,
    /// Multi-index, e.g. `--m 1,0`; repeat for several. Defaults per suite.
    #[arg(long)]
    pub m: Vec<String>,
    #[arg(long, value_enum, default_value = "quad")]
    pub method: Method,
    /// Radial/Laguerre node count for quadrature engines.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Monte Carlo samples, or instances per property suite.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the suite's default tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the JSON report array here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Sbos,
    Gamma,
    Laplace,
    Wtlap,
    Oscillator,
    Borel,
    Properties,
}

/// One validated run request.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub cases: Vec<(usize, usize, i64)>,
    pub m: Vec<MultiIndex>,
    pub method: Method,
    pub nodes: Option<usize>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

impl SuiteConfig {
    /// Expands the `p × q × n` grid and rejects unsupported combinations
    /// before anything runs.
    pub fn from_args(suite: Suite, a: &RunArgs) -> Result<Self> {
        let m = a.m.iter().map(|s| MultiIndex::parse(s)).collect::<Result<Vec<_>>>()?;
        let mut cases = Vec::new();
        for &p in &a.p {
            for &q in &a.q {
                if p > 2 || q > 2 {
                    return Err(Error::InvalidArgument(format!("(p,q) = ({p},{q}): only p, q ≤ 2 are supported")));
                }
                if p + q == 0 {
                    return Err(Error::InvalidArgument("p + q must be positive".into()));
                }
                let ns = if a.n.is_empty() { vec![p.max(1) as i64] } else { a.n.clone() };
                for n in ns {
                    cases.push((p, q, n));
                }
            }
        }
        let cfg = SuiteConfig {
            suite,
            cases,
            m,
            method: a.method,
            nodes: a.nodes,
            samples: a.samples,
            seed: a.seed,
            tol: a.tol,
            out: a.out.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes == Some(0) || self.samples == Some(0) {
            return Err(Error::InvalidArgument("--nodes and --samples must be positive".into()));
        }
        if self.tol.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::InvalidArgument("--tol must be positive".into()));
        }
        for &(p, q, n) in &self.cases {
            for m in &self.m {
                if m.len() != p + q {
                    return Err(Error::InvalidArgument(format!("m = {m} has {} entries, (p,q) = ({p},{q}) needs {}", m.len(), p + q)));
                }
            }
            match self.suite {
                Suite::Sbos => {
                    if n < p as i64 {
                        return Err(Error::Hypothesis(format!("superbosonisation needs n ≥ p, got n = {n} < p = {p}")));
                    }
                    if let Some(m) = self.m.iter().find(|m| !m.is_polynomial(p)) {
                        return Err(Error::InvalidArgument(format!("m = {m} is not in the polynomial cone")));
                    }
                }
                Suite::Gamma | Suite::Laplace => {
                    if let Some(m) = self.m.iter().find(|m| !converges(m, p)) {
                        return Err(Error::Divergent(format!("m = {m}: need m_j > j−1 for j ≤ {p}")));
                    }
                }
                Suite::Wtlap => {
                    if let Some(m) = self.m.iter().find(|m| !converges(&m.shifted(n), p)) {
                        return Err(Error::Divergent(format!("m + n = {} diverges", m.shifted(n))));
                    }
                }
                Suite::Oscillator => {
                    if !(1..=2).contains(&n) {
                        return Err(Error::InvalidArgument(format!("oscillator needs 1 ≤ n ≤ 2, got {n}")));
                    }
                }
                Suite::Borel => {
                    if n < 1 {
                        return Err(Error::InvalidArgument(format!("n must be positive, got {n}")));
                    }
                }
                Suite::Properties => {}
            }
        }
        Ok(())
    }

    fn mc(&self) -> bool {
        self.method == Method::Mc
    }

    fn flat(&self, p: usize, q: usize, n: i64) -> FlatDomain {
        let d = FlatDomain::quadrature(p, q, n as usize);
        match (self.mc(), d.method) {
            (true, _) => d.with_method(FlatMethod::MonteCarlo { samples: self.samples.unwrap_or(200_000), seed: self.seed }),
            (false, FlatMethod::Quadrature { sphere, .. }) => match self.nodes {
                Some(nodes) => d.with_method(FlatMethod::Quadrature { nodes, sphere }),
                None => d,
            },
            _ => d,
        }
    }

    fn omega(&self, p: usize, q: usize) -> OmegaDomain {
        if self.mc() && p > 0 {
            return OmegaDomain::monte_carlo(p, q, self.samples.unwrap_or(200_000), self.seed);
        }
        let mut d = OmegaDomain::quadrature(p, q);
        if let (Some(nodes), HermMethod::Quadrature { hermite, .. }) = (self.nodes, d.herm) {
            d.herm = HermMethod::Quadrature { laguerre: nodes, hermite };
        }
        d
    }

    fn tol(&self, p: usize) -> f64 {
        self.tol.unwrap_or(if self.mc() || p >= 2 { 1e-3 } else { 1e-6 })
    }

    fn indices(&self, default: impl FnOnce() -> Vec<MultiIndex>) -> Vec<MultiIndex> {
        if self.m.is_empty() {
            default()
        } else {
            self.m.clone()
        }
    }
}

/// Every `m ∈ [lo, hi]^{p+q}` for which the Γ integral converges.
pub fn convergent_box(p: usize, q: usize, lo: i64, hi: i64) -> Vec<MultiIndex> {
    let mut out = vec![Vec::new()];
    for _ in 0..p + q {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (lo..=hi).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(MultiIndex).filter(|m| converges(m, p)).collect()
}

/// Five positive diagonal points for the Laplace suite.
pub fn laplace_points(k: usize) -> Vec<Vec<f64>> {
    [0.6, 0.9, 1.0, 1.4, 2.1]
        .iter()
        .enumerate()
        .map(|(i, &b)| (0..k).map(|j| b * (1.0 + 0.3 * ((i + j) % 3) as f64)).collect())
        .collect()
}

/// Report for a check with no numeric left/right pair.
fn exact_report(identity: &str, (p, q, n): (usize, usize, i64), pass: bool, detail: serde_json::Value, note: Option<String>, t0: Instant) -> VerificationReport {
    let flag = c(if pass { 0.0 } else { 1.0 }, 0.0);
    VerificationReport {
        identity: identity.into(),
        p,
        q,
        n,
        m: None,
        method: "exact".into(),
        nodes: serde_json::Value::Null,
        seed: None,
        lhs: flag,
        rhs: c(0.0, 0.0),
        reference: None,
        abs_err: flag.re,
        rel_err: flag.re,
        pass,
        wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
        note,
        detail: Some(detail),
    }
}

/// Runs every case of the suite; errors are configuration errors.
pub fn run(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    for &(p, q, n) in &cfg.cases {
        let tol = cfg.tol(p);
        match cfg.suite {
            Suite::Sbos => {
                let (flat, omega) = (cfg.flat(p, q, n), cfg.omega(p, q));
                for m in cfg.indices(|| MultiIndex::cone(p, q, 2)) {
                    let f = StructuredFunction::conical(p, q, m, 1.0)?;
                    out.push(superbosonise_check(&f, n, &flat, &omega, tol)?);
                }
            }
            Suite::Gamma => {
                let dom = cfg.omega(p, q);
                for m in cfg.indices(|| convergent_box(p, q, -2, 3)) {
                    out.push(gamma_check(&m, p, q, &dom, tol)?);
                }
            }
            Suite::Laplace => {
                let dom = cfg.omega(p, q);
                let ms = cfg.indices(|| MultiIndex::cone(p, q, 2).into_iter().filter(|m| converges(m, p)).collect());
                for m in ms {
                    for x in laplace_points(p + q) {
                        out.push(laplace_check(&m, &x, p, q, &dom, tol)?);
                    }
                }
            }
            Suite::Wtlap => {
                let dom = cfg.omega(p, q);
                let ms = cfg.indices(|| MultiIndex::cone(p, q, 1).into_iter().filter(|m| converges(&m.shifted(n), p)).collect());
                for m in ms {
                    for t in [0.0, 0.3, 0.5] {
                        for weighted in [false, true] {
                            out.push(weighted_lt_check(p, q, n, &m, t, &dom, weighted, tol)?);
                        }
                    }
                }
            }
            Suite::Oscillator => {
                let t0 = Instant::now();
                let r = osc::commutator_check(p, q, n as usize, 3)?;
                out.push(exact_report("oscillator_brackets", (p, q, n), r.pass, json!(r), None, t0));
                let t0 = Instant::now();
                let from_ops = osc::highest_weight_from_operators(p, q, n as usize)?;
                let formula = osc::highest_weight(p, q, n as usize);
                let detail = json!({ "from_operators": from_ops, "formula": formula });
                out.push(exact_report("oscillator_highest_weight", (p, q, n), from_ops == formula, detail, Some(formula.to_string()), t0));
            }
            Suite::Borel => {
                let t0 = Instant::now();
                let chain = weights::borel_chain(p, q, Some(n as usize));
                let w = chain.weights.as_ref().expect("n given");
                let fin = weights::finite_dim_check(&w.lambda);
                let pass = chain.matches_target && fin.finite == (p == 0);
                let note = format!(
                    "{}; λ {} along the chain under the invariant form; standard-Borel highest weight {}",
                    chain.diagram.ascii(),
                    if w.lambda_invariant { "fixed" } else { "moves" },
                    w.standard_highest_weight
                );
                let detail = json!({ "chain": chain, "finite_dim": fin });
                out.push(exact_report("borel_chain", (p, q, n), pass, detail, Some(note), t0));
            }
            Suite::Properties => {
                let t0 = Instant::now();
                let tol = cfg.tol.unwrap_or(1e-10);
                for o in properties::run_all(cfg.samples.unwrap_or(128), cfg.seed, tol)? {
                    let mut r = exact_report(&o.name, (p, q, n), o.pass, json!(o), None, t0);
                    r.method = "random".into();
                    r.seed = Some(cfg.seed);
                    r.lhs = c(o.max_err, 0.0);
                    r.abs_err = o.max_err;
                    r.rel_err = o.max_err;
                    out.push(r);
                }
                // The suites draw their own shapes; one pass covers every (p, q).
                break;
            }
        }
    }
    Ok(out)
}

/// Per-identity pass counts and worst relative error.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub identity: String,
    pub passed: usize,
    pub total: usize,
    pub max_rel_err: f64,
}

pub fn summarize(reports: &[VerificationReport]) -> Vec<SummaryRow> {
    let mut rows: BTreeMap<&str, SummaryRow> = BTreeMap::new();
    for r in reports {
        let row = rows.entry(&r.identity).or_insert_with(|| SummaryRow {
            identity: r.identity.clone(),
            passed: 0,
            total: 0,
            max_rel_err: 0.0,
        });
        row.total += 1;
        row.passed += r.pass as usize;
        row.max_rel_err = row.max_rel_err.max(r.rel_err);
    }
    rows.into_values().collect()
}

pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = format!("{:<28} {:>9} {:>12}\n", "identity", "pass", "max_rel_err");
    for r in rows {
        s.push_str(&format!("{:<28} {:>9} {:>12.2e}\n", r.identity, format!("{}/{}", r.passed, r.total), r.max_rel_err));
    }
    s
}

pub fn read_reports(paths: &[PathBuf]) -> Result<Vec<VerificationReport>> {
    let mut all = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut reports: Vec<VerificationReport> =
            serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        all.append(&mut reports);
    }
    Ok(all)
}

/// Exit status: 0 all pass, 1 numeric failure, 2 invalid configuration or I/O.
pub fn main_with(cli: Cli) -> i32 {
    let (suite, args) = match cli.command {
        Command::Summary { paths } => {
            return match read_reports(&paths) {
                Ok(reports) => {
                    print!("{}", format_summary(&summarize(&reports)));
                    i32::from(!reports.iter().all(|r| r.pass))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            };
        }
        Command::Sbos(a) => (Suite::Sbos, a),
        Command::Gamma(a) => (Suite::Gamma, a),
        Command::Laplace(a) => (Suite::Laplace, a),
        Command::Wtlap(a) => (Suite::Wtlap, a),
        Command::Oscillator(a) => (Suite::Oscillator, a),
        Command::Borel(a) => (Suite::Borel, a),
        Command::Properties(a) => (Suite::Properties, a),
    };
    let reports = match SuiteConfig::from_args(suite, &args).and_then(|cfg| run(&cfg).map(|r| (cfg, r))) {
        Ok((cfg, reports)) => {
            for r in &reports {
                eprintln!("{}", r.line());
            }
            let text = serde_json::to_string_pretty(&reports).expect("reports serialise");
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return 2;
                    }
                }
                None => println!("{text}"),
            }
            reports
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    i32::from(!reports.iter().all(|r| r.pass))
}
