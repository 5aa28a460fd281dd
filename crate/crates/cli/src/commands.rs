use serde::Serialize;
use serde_json::{json, Value};

use tauber_core::correction::{default_order, CorrectionPair};
use tauber_core::dist::{empirical_tail, Distribution};
use tauber_core::ls_transform::{catalog_form, sign_check};
use tauber_core::mg1::{chain_oracle, mg1_tail_report, pi_coefficients, CoeffSource, Mg1Model};
use tauber_core::numerics::geomspace;
use tauber_core::tailbound::{
    appendix_asymptotics, decay_rate_estimate, fit_for_dist, korevaar_check, tail_profile, theorem_check,
    AppendixCase, BoundEngine, BoundParams, TheoremCheckOptions,
};
use tauber_core::verify::{run_suite, Suite};
use tauber_core::Error;

use crate::config::{ArrivalKind, CaseArg, Command, DistKind, FormArg, RunConfig, SuiteArg};

pub const SCHEMA: &str = "v1";

#[derive(Debug)]
pub enum Failure {
    /// Missing or out-of-range settings (exit 2).
    Config(String),
    /// The numerics broke down (exit 3).
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(msg) => Failure::Config(msg),
            e @ Error::Unstable { .. } => Failure::Config(e.to_string()),
            other => Failure::Numeric(other),
        }
    }
}

type Run<T> = Result<T, Failure>;

/// One tolerance actually achieved by the run.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerance {
    pub name: String,
    pub achieved: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Tolerance {
    fn at_most(name: impl Into<String>, achieved: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            pass: achieved <= limit,
            achieved,
            limit,
        }
    }
}

pub struct Outcome {
    pub json: Value,
    pub csv: String,
    pub tolerances: Vec<Tolerance>,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.tolerances.iter().all(|t| t.pass)
    }
}

fn need<T: Copy>(v: Option<T>, key: &str) -> Run<T> {
    v.ok_or_else(|| Failure::Config(format!("missing required key `{key}`")))
}

fn dist_of(cfg: &RunConfig) -> Run<Distribution> {
    let r = need(cfg.r, "r")?;
    Ok(match need(cfg.dist, "dist")? {
        DistKind::Pareto => Distribution::pareto(r)?,
        DistKind::ZetaDiff => {
            if r.fract() != 0.0 || r < 1.0 {
                return Err(Failure::Config(format!("zeta_diff needs a positive integer r, got {r}")));
            }
            Distribution::zeta_diff(r as u32)?
        }
    })
}

fn x_grid(cfg: &RunConfig, lo: f64, hi: f64, points: usize) -> Run<Vec<f64>> {
    let (lo, hi) = (cfg.x_min.unwrap_or(lo), cfg.x_max.unwrap_or(hi));
    let points = cfg.points.unwrap_or(points);
    if !(lo > 0.0 && hi > lo) || points < 2 {
        return Err(Failure::Config(format!("need 0 < x_min < x_max and points >= 2, got [{lo}, {hi}], {points}")));
    }
    Ok(geomspace(lo, hi, points))
}

pub fn run(cmd: Command, cfg: &RunConfig) -> Run<Outcome> {
    match cmd {
        Command::AnalyzeDist => analyze_dist(cfg),
        Command::FitSingularity => fit_singularity(cfg),
        Command::VerifyLemmas => verify_lemmas(cfg),
        Command::Bound => bound(cfg),
        Command::TheoremCheck => theorem(cfg),
        Command::Mg1 => mg1(cfg),
        Command::Appendix => appendix(cfg),
    }
}

fn analyze_dist(cfg: &RunConfig) -> Run<Outcome> {
    let dist = dist_of(cfg)?;
    let xs = x_grid(cfg, 10.0, 1e4, 31)?;
    let profile = tail_profile(&dist, &xs)?;
    let fit = decay_rate_estimate(&profile.iter().map(|p| (p.x, p.tail)).collect::<Vec<_>>()).ok();
    let empirical = match cfg.samples {
        Some(n) => {
            let sample = dist.sample(n, cfg.seed.unwrap_or(0))?;
            Some(xs.iter().map(|&x| empirical_tail(&sample, x)).collect::<Result<Vec<_>, _>>()?)
        }
        None => None,
    };
    let mut csv = String::from(if empirical.is_some() { "x,tail,slope,empirical_tail\n" } else { "x,tail,slope\n" });
    for (i, p) in profile.iter().enumerate() {
        csv.push_str(&format!("{:e},{:e},{:e}", p.x, p.tail, p.slope));
        if let Some(e) = &empirical {
            csv.push_str(&format!(",{:e}", e[i]));
        }
        csv.push('\n');
    }
    Ok(Outcome {
        json: json!({
            "dist": dist,
            "mean": dist.mean(),
            "singularity_distance": dist.singularity_distance(),
            "profile": profile,
            "decay_fit": fit,
            "empirical_tail": empirical,
            "seed": cfg.seed.unwrap_or(0),
        }),
        csv,
        tolerances: Vec::new(),
    })
}

fn fit_singularity(cfg: &RunConfig) -> Run<Outcome> {
    let dist = dist_of(cfg)?;
    let order = cfg.l.map_or(default_order(dist.r()), |l| l as usize);
    let window = match (cfg.fit_eps_min, cfg.fit_eps_max) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(Failure::Config("give both fit_eps_min and fit_eps_max or neither".into())),
    };
    let fit = fit_for_dist(&dist, order, window)?;
    let sc = sign_check(&fit.form);
    let exact = catalog_form(&dist, order)?;
    let alpha0_rel = ((fit.form.alpha[0] - exact.alpha[0]) / exact.alpha[0]).abs();
    let mut csv = String::from("k,alpha,beta,alpha_exact,beta_exact\n");
    for k in 0..order {
        csv.push_str(&format!(
            "{k},{:e},{:e},{:e},{:e}\n",
            fit.form.alpha[k], fit.form.beta[k], exact.alpha[k], exact.beta[k]
        ));
    }
    Ok(Outcome {
        tolerances: vec![
            Tolerance::at_most("r_recovered", (fit.form.r - dist.r()).abs(), 1e-9),
            Tolerance::at_most("alpha0_relative_error", alpha0_rel, 1e-3),
            Tolerance {
                name: "sign_check".into(),
                achieved: sc.alpha0,
                limit: 0.0,
                pass: sc.pass,
            },
        ],
        json: json!({ "dist": dist, "fit": fit, "sign_check": sc, "exact_form": exact }),
        csv,
    })
}

fn verify_lemmas(cfg: &RunConfig) -> Run<Outcome> {
    let suites: Vec<Suite> = match cfg.suite.unwrap_or(SuiteArg::All) {
        SuiteArg::Extremal => vec![Suite::Extremal],
        SuiteArg::Correction => vec![Suite::Correction],
        SuiteArg::Sign => vec![Suite::Sign],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let seed = cfg.seed.unwrap_or(0);
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(run_suite(s, seed)?);
    }
    let mut csv = String::from("suite,name,achieved,tolerance,pass\n");
    for c in &checks {
        let suite = serde_json::to_value(c.suite).expect("enum serializes");
        csv.push_str(&format!(
            "{},{},{:e},{:e},{}\n",
            suite.as_str().unwrap_or(""),
            c.name,
            c.achieved,
            c.tolerance,
            c.pass
        ));
    }
    Ok(Outcome {
        tolerances: checks
            .iter()
            .map(|c| Tolerance {
                name: c.name.clone(),
                achieved: c.achieved,
                limit: c.tolerance,
                pass: c.pass,
            })
            .collect(),
        json: json!({ "seed": seed, "checks": checks }),
        csv,
    })
}

fn bound(cfg: &RunConfig) -> Run<Outcome> {
    let dist = dist_of(cfg)?;
    let l = cfg.l.unwrap_or(default_order(dist.r()) as u32);
    let form = match cfg.form.unwrap_or(FormArg::Catalog) {
        FormArg::Catalog => catalog_form(&dist, l as usize)?,
        FormArg::Fitted => {
            let window = cfg.fit_eps_min.zip(cfg.fit_eps_max);
            fit_for_dist(&dist, l as usize, window)?.form
        }
    };
    let pair = CorrectionPair::build(&form, l as usize)?;
    let mut params = match cfg.delta {
        Some(d) => BoundParams::new(l, d)?,
        None => BoundParams::default_for(&dist, l)?,
    };
    if let Some(s) = &cfg.sigma2_schedule {
        params.sigma2_schedule = s.clone();
    }
    let engine = BoundEngine::new(&dist, pair.clone(), params.clone())?;
    let mut xs = x_grid(cfg, 10.0, 1e3, 7)?;
    if dist.is_discrete() {
        xs.iter_mut().for_each(|x| *x = x.round());
        xs.dedup();
    }
    let mut rows = Vec::new();
    let mut csv = String::from("x,lower,upper,tail,tail_inclusive,t1_upper,t2_upper\n");
    let mut violations = 0usize;
    for &x in &xs {
        let up = engine.upper(x)?;
        let lo = if l % 2 == 1 { Some(engine.lower(x)?) } else { None };
        let tail = dist.tail(x)?;
        let incl = dist.tail_inclusive(x)?;
        if up.value < incl * (1.0 - 1e-9) || lo.is_some_and(|b| b.value > tail * (1.0 + 1e-9)) {
            violations += 1;
        }
        csv.push_str(&format!(
            "{x:e},{},{:e},{tail:e},{incl:e},{:e},{:e}\n",
            lo.map_or(String::new(), |b| format!("{:e}", b.value)),
            up.value,
            up.t1,
            up.t2
        ));
        rows.push(json!({ "x": x, "upper": up, "lower": lo, "tail": tail, "tail_inclusive": incl }));
    }
    Ok(Outcome {
        tolerances: vec![Tolerance::at_most("sandwich_violations", violations as f64, 0.0)],
        json: json!({
            "dist": dist,
            "params": params,
            "pair": pair,
            "xi_at_zero": engine.xi_at_zero(),
            "rows": rows,
        }),
        csv,
    })
}

fn theorem(cfg: &RunConfig) -> Run<Outcome> {
    let dist = dist_of(cfg)?;
    let (lo, hi) = (cfg.x_min.unwrap_or(10.0), cfg.x_max.unwrap_or(1e4));
    let mut opts = TheoremCheckOptions::new((lo, hi));
    opts.l = cfg.l;
    opts.delta = cfg.delta;
    opts.fit_window = cfg.fit_eps_min.zip(cfg.fit_eps_max);
    opts.eta_tolerance = cfg.eta_tolerance;
    if let Some(p) = cfg.points {
        opts.points = p;
    }
    let rep = theorem_check(&dist, &opts)?;
    let ratio = if rep.scaled_lower_min > 0.0 {
        rep.scaled_upper_max / rep.scaled_lower_min
    } else {
        f64::INFINITY
    };
    Ok(Outcome {
        tolerances: vec![
            Tolerance::at_most("eta_error", (rep.eta_estimate + dist.r()).abs(), rep.eta_tolerance),
            Tolerance::at_most("sandwich_violations", rep.sandwich_violations as f64, 0.0),
            Tolerance::at_most("scaled_bound_ratio", ratio, 50.0),
            Tolerance::at_most("t2_ratio_top_decade", rep.t2_ratio_max, 0.5),
        ],
        csv: rep.to_csv(),
        json: json!({ "dist": dist, "report": rep }),
    })
}

fn mg1(cfg: &RunConfig) -> Run<Outcome> {
    let r = cfg.r.unwrap_or(3.0);
    if cfg.dist.is_some_and(|d| d != DistKind::ZetaDiff) || r.fract() != 0.0 || r < 2.0 {
        return Err(Failure::Config("mg1 needs dist = zeta_diff with integer r >= 2".into()));
    }
    let b = CoeffSource::ZetaDiff { r: r as u32 };
    let a = match cfg.arrivals.unwrap_or(ArrivalKind::Poisson) {
        ArrivalKind::Poisson => CoeffSource::Poisson { mean: cfg.arrivals_mean.unwrap_or(0.7) },
        ArrivalKind::Geometric => CoeffSource::Geometric { mean: cfg.arrivals_mean.unwrap_or(0.7) },
        ArrivalKind::ZetaDiff => CoeffSource::ZetaDiff { r: cfg.arrivals_r.unwrap_or(2) },
    };
    let model = Mg1Model::new(a, b)?;
    let n = cfg.n.unwrap_or(10_000);
    let rep = mg1_tail_report(&model, n)?;
    let mut tolerances = vec![Tolerance::at_most("mass_check", (rep.mass_check - 1.0).abs(), 1e-3)];
    let oracle_n = cfg.oracle_n.unwrap_or(1000);
    let mut oracle_diff = None;
    if oracle_n > 0 {
        // The augmented chain is π conditioned on {0..N}, so compare after
        // renormalizing the recursion output.
        let pi = pi_coefficients(&model, oracle_n)?;
        let total: f64 = pi.iter().sum();
        let oracle = chain_oracle(&model, oracle_n)?;
        let d = pi.iter().zip(&oracle).map(|(x, y)| (x / total - y).abs()).fold(0.0, f64::max);
        tolerances.push(Tolerance::at_most("oracle_max_norm", d, 1e-10));
        oracle_diff = Some(d);
    }
    let csv = rep.to_csv();
    let mut summary = serde_json::to_value(&rep).expect("report serializes");
    if let Value::Object(m) = &mut summary {
        m.remove("pi");
    }
    Ok(Outcome {
        tolerances,
        json: json!({ "model": model, "report": summary, "oracle_n": oracle_n, "oracle_max_norm": oracle_diff }),
        csv,
    })
}

fn appendix(cfg: &RunConfig) -> Run<Outcome> {
    let case = need(cfg.case, "case")?;
    if case == CaseArg::Korevaar {
        let dist = dist_of(cfg)?;
        let xs = x_grid(cfg, 10.0, 1e4, 7)?;
        let rep = korevaar_check(&dist, &xs)?;
        let mut csv = String::from("x,left,right\n");
        for i in 0..rep.x.len() {
            csv.push_str(&format!("{:e},{:e},{:e}\n", rep.x[i], rep.left[i], rep.right[i]));
        }
        return Ok(Outcome {
            tolerances: vec![Tolerance::at_most("relative_gap", rep.relative_gap, 2e-2)],
            json: json!({ "case": "korevaar", "dist": dist, "report": rep }),
            csv,
        });
    }
    let core_case = match case {
        CaseArg::A1 => AppendixCase::A1 { n1: cfg.n1.unwrap_or(2), n2: cfg.n2.unwrap_or(3) },
        _ => AppendixCase::A2 { k: cfg.k.unwrap_or(1.0), n: cfg.power.unwrap_or(0) },
    };
    let xs = x_grid(cfg, 10.0, 1e4, 13)?;
    let seq = appendix_asymptotics(core_case, &xs)?;
    let mut csv = String::from("x,scaled\n");
    for (x, v) in &seq {
        csv.push_str(&format!("{x:e},{v:e}\n"));
    }
    let last = seq.last().expect("grid has points").1;
    let mut tolerances = Vec::new();
    let mut slope = None;
    match core_case {
        AppendixCase::A1 { .. } => {
            // Boundedness: no trend on the top decade.
            let fit = decay_rate_estimate(&seq)?;
            tolerances.push(Tolerance::at_most("top_decade_slope", fit.eta.abs(), 0.02));
            slope = Some(fit);
        }
        AppendixCase::A2 { k, .. } => {
            tolerances.push(Tolerance::at_most("relative_error_vs_1_over_k", (last * k - 1.0).abs(), 1e-2));
        }
    }
    Ok(Outcome {
        tolerances,
        json: json!({ "case": core_case, "sequence": seq, "top_decade_fit": slope }),
        csv,
    })
}
