//! `rdiv`: Hilbert functions, volumes, sigma-decompositions and theorem
//! checks for real divisors on toric varieties and Hirzebruch surfaces.
//!
//! Exit codes: 0 success, 2 domain error, 3 parse error, 4 counterexample
//! candidate or violated example.

mod output;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use rdiv_core::exec::configure_threads;
use rdiv_core::problem::{build_divisor, parse_samples, parse_terms, Divisor, Model};
use rdiv_core::surface::{self, SurfaceModel};
use rdiv_core::theorems::{self, CheckOptions, Instance, TheoremReport};
use rdiv_core::toric::BplusOptions;
use rdiv_core::{Execution, Fan, ProblemFile, Scalar};

use output::{Format, Output};

#[derive(Parser)]
#[command(name = "rdiv", version, about = "Exact divisor computations on toric varieties and Hirzebruch surfaces")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for sample grids and corpora (1 = sequential).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Toric preset: P1..P6, P1xP1, F<e>.
    #[arg(long, conflicts_with_all = ["problem", "surface"])]
    preset: Option<String>,
    /// Problem file (JSON); `--divisor` then names one of its divisors.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Hirzebruch surface F_e with labeled fibers (see `--fibers`).
    #[arg(long, value_name = "E")]
    surface: Option<u32>,
    /// Fiber labels for `--surface`.
    #[arg(long, value_delimiter = ',', default_value = "p1,p2,p3,p4")]
    fibers: Vec<String>,
    /// Divisor as `name:coef,...`, or a divisor name from `--problem`.
    #[arg(long, default_value = "")]
    divisor: String,
    /// Discriminant `d` for `sqrt(d)` literals.
    #[arg(long, env = "RDIV_DISC")]
    disc: Option<u64>,
}

#[derive(Args, Clone)]
struct BplusArgs {
    #[arg(long, default_value_t = BplusOptions::default().max_steps)]
    max_steps: u32,
    #[arg(long, default_value_t = BplusOptions::default().stable_run)]
    stable_run: u32,
}

impl BplusArgs {
    fn options(&self) -> BplusOptions {
        BplusOptions { max_steps: self.max_steps, stable_run: self.stable_run }
    }
}

#[derive(Args, Clone)]
struct Check {
    #[command(flatten)]
    src: Source,
    /// Effective divisor E, as terms or a name from `--problem`.
    #[arg(long = "effective", short = 'e', default_value = "")]
    effective: String,
    /// Sampled m values (default 1,2,3,5/2 and sqrt(disc)).
    #[arg(long)]
    samples: Option<String>,
    /// Sampled r values for clause iii) of Theorem B.
    #[arg(long, default_value = "1,1/2")]
    r_grid: String,
    #[arg(long, default_value_t = 2)]
    shifts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    bplus: BplusArgs,
}

#[derive(Subcommand)]
enum Command {
    /// h^0(floor(mD)) at one scale or along a sample list.
    H0 {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value = "1")]
        scale: String,
        #[arg(long)]
        samples: Option<String>,
    },
    /// Table of m, h^0(mD) and n! h^0(mD) / m^n.
    Hilbert {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value = "1,2,3,4,5,10")]
        samples: String,
    },
    /// vol(D).
    Volume {
        #[command(flatten)]
        src: Source,
    },
    /// sigma_r(D) for every prime component, or for `--ray`.
    Sigma {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        ray: Option<String>,
    },
    /// Negative and positive parts of the sigma-decomposition.
    Nsigma {
        #[command(flatten)]
        src: Source,
    },
    /// Divisorial augmented base locus.
    Bplus {
        #[command(flatten)]
        src: Source,
        #[command(flatten)]
        bplus: BplusArgs,
    },
    /// Whether D is nef.
    Nef {
        #[command(flatten)]
        src: Source,
    },
    /// Whether D is big.
    Big {
        #[command(flatten)]
        src: Source,
    },
    /// D^{n-1} . E for nef big D and effective E.
    Intersect {
        #[command(flatten)]
        src: Source,
        #[arg(long = "with")]
        with: String,
    },
    /// Zariski decomposition on a Hirzebruch surface.
    Zariski {
        #[command(flatten)]
        src: Source,
    },
    /// Check the equivalences of Theorem A for (D, E).
    CheckA(Check),
    /// Check the equivalences of Theorem B for (D, E).
    CheckB(Check),
    /// Run both checkers on a seeded random corpus.
    Corpus {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        count: u64,
        #[command(flatten)]
        bplus: BplusArgs,
    },
    /// The sqrt(2) fiber example on F_e.
    PaperExample {
        #[arg(long, default_value_t = 1)]
        e: u32,
        #[arg(long, default_value = "1,2,5/2,sqrt(2),3,7")]
        samples: String,
    },
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Domain(String),
    Parse(String),
    Counterexample(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 2,
            Failure::Parse(_) => 3,
            Failure::Counterexample(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Parse(m) | Failure::Counterexample(m) => m,
        }
    }
}

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn parse(e: impl std::fmt::Display) -> Failure {
    Failure::Parse(e.to_string())
}

type Res<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let exec = match cli.jobs {
        Some(n) if n > 1 => {
            configure_threads(n);
            Execution::Parallel
        }
        _ => Execution::Sequential,
    };
    match run(cli.command, exec) {
        Ok(out) => {
            print!("{}", out.render(cli.format));
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

/// The model and problem file selected by a [`Source`].
struct Loaded {
    model: Model,
    problem: Option<ProblemFile>,
    disc: Option<u64>,
}

impl Source {
    fn load(&self) -> Res<Loaded> {
        if let Some(path) = &self.problem {
            let bytes = std::fs::read(path).map_err(|e| parse(format!("{}: {e}", path.display())))?;
            let problem = rdiv_core::parse_problem(&bytes, self.disc).map_err(parse)?;
            let disc = problem.disc;
            return Ok(Loaded { model: problem.model().clone(), problem: Some(problem), disc });
        }
        let model = match (&self.preset, self.surface) {
            (Some(p), _) => Model::Toric(Arc::new(Fan::preset(p).map_err(parse)?)),
            (None, Some(e)) => Model::Surface(SurfaceModel::new(e, self.fibers.clone()).map_err(parse)?),
            (None, None) => return Err(parse("one of --preset, --surface or --problem is required")),
        };
        Ok(Loaded { model, problem: None, disc: self.disc })
    }

    fn divisor(&self) -> Res<(Loaded, Divisor)> {
        let loaded = self.load()?;
        let d = loaded.divisor(&self.divisor, "divisor")?;
        Ok((loaded, d))
    }
}

impl Loaded {
    /// Terms `a:1,b:2` or, with a problem file, a divisor name.
    fn divisor(&self, spec: &str, what: &str) -> Res<Divisor> {
        if let Some(p) = &self.problem {
            if !spec.contains(':') && !spec.trim().is_empty() {
                return p.divisor(spec.trim()).map_err(parse);
            }
        }
        let terms = parse_terms(spec).map_err(parse)?;
        if let Some(d) = self.disc {
            if let Some((k, a)) = terms.iter().find(|(_, a)| a.disc() != 0 && a.disc() != d) {
                return Err(parse(format!("{what}.{k}: {a} does not use sqrt({d})")));
            }
        }
        let terms: Vec<(&str, Scalar)> = terms.iter().map(|(k, a)| (k.as_str(), a.clone())).collect();
        build_divisor(&self.model, &terms, what).map_err(parse)
    }

    fn names(&self) -> Vec<String> {
        match &self.model {
            Model::Toric(f) => f.ray_names().to_vec(),
            Model::Surface(m) => ["E", "C"].iter().map(|s| s.to_string()).chain(m.fibers().iter().cloned()).collect(),
        }
    }
}

fn samples(text: &str) -> Res<Vec<Scalar>> {
    let s = parse_samples(text).map_err(parse)?;
    if let Some(m) = s.iter().find(|m| !m.is_positive()) {
        return Err(domain(format!("sample m = {m} must be positive")));
    }
    Ok(s)
}

fn scalar(text: &str) -> Res<Scalar> {
    text.trim().parse().map_err(parse)
}

fn surface_of(loaded: &Loaded, d: &Divisor) -> Res<(SurfaceModel, rdiv_core::SDivisor)> {
    match (d, &loaded.model) {
        (Divisor::Surface(s), Model::Surface(m)) => Ok((m.clone(), s.clone())),
        (Divisor::Toric(t), _) => {
            let model = SurfaceModel::from_fan(t.fan()).map_err(domain)?;
            let s = model.divisor_from_toric(t).map_err(domain)?;
            Ok((model, s))
        }
        _ => Err(domain("divisor does not match the variety")),
    }
}

fn h0_of(d: &Divisor, model: &Model, m: &Scalar) -> Res<u64> {
    match (d, model) {
        (Divisor::Toric(t), _) => t.h0_at(m).map_err(domain),
        (Divisor::Surface(s), Model::Surface(sm)) => sm.h0_at(s, m).map_err(domain),
        _ => unreachable!("surface divisors come with surface models"),
    }
}

fn run(cmd: Command, exec: Execution) -> Res<Output> {
    match cmd {
        Command::H0 { src, scale, samples: list } => {
            let (loaded, d) = src.divisor()?;
            match list {
                None => {
                    let m = scalar(&scale)?;
                    if !m.is_positive() {
                        return Err(domain(format!("scale m = {m} must be positive")));
                    }
                    Ok(Output::value("h0", h0_of(&d, &loaded.model, &m)?.to_string()))
                }
                Some(list) => {
                    let ms = samples(&list)?;
                    let counts: Vec<Res<u64>> = exec.map(&ms, |m| h0_of(&d, &loaded.model, m));
                    let rows = ms
                        .iter()
                        .zip(counts)
                        .map(|(m, h)| Ok(vec![m.to_string(), h?.to_string()]))
                        .collect::<Res<Vec<_>>>()?;
                    Ok(Output::table(&["m", "h0"], rows))
                }
            }
        }
        Command::Hilbert { src, samples: list } => {
            let (loaded, d) = src.divisor()?;
            let ms = samples(&list)?;
            let rows = match (&d, &loaded.model) {
                (Divisor::Toric(t), _) => t
                    .hilbert_table(&ms, exec)
                    .map_err(domain)?
                    .into_iter()
                    .map(|r| (r.m, r.h0, r.normalized))
                    .collect::<Vec<_>>(),
                (Divisor::Surface(s), Model::Surface(m)) => ms
                    .iter()
                    .map(|x| {
                        let h = m.h0_at(s, x).map_err(domain)?;
                        let norm = Scalar::from_int(2 * h as i64).try_div(&x.pow(2)).map_err(domain)?;
                        Ok((x.clone(), h, norm))
                    })
                    .collect::<Res<Vec<_>>>()?,
                _ => unreachable!(),
            };
            Ok(Output::hilbert(rows))
        }
        Command::Volume { src } => {
            let (loaded, d) = src.divisor()?;
            let v = match &d {
                Divisor::Toric(t) => t.volume(),
                Divisor::Surface(_) => {
                    let (m, s) = surface_of(&loaded, &d)?;
                    m.volume(&s).map_err(domain)?
                }
            };
            Ok(Output::value("volume", v.to_string()))
        }
        Command::Sigma { src, ray } => {
            let (loaded, d) = src.divisor()?;
            let names = loaded.names();
            let values: Vec<Scalar> = match &d {
                Divisor::Toric(t) => t.sigma_decomposition().map_err(domain)?.nsigma.coeffs().to_vec(),
                Divisor::Surface(_) => {
                    let (m, s) = surface_of(&loaded, &d)?;
                    let n = m.nsigma(&s).map_err(domain)?;
                    let mut v = vec![n.c_e, n.c_c];
                    v.extend(n.fibers);
                    v
                }
            };
            match ray {
                Some(r) => {
                    let i = names
                        .iter()
                        .position(|n| *n == r)
                        .or_else(|| match &d {
                            Divisor::Toric(t) => t.fan().ray_index(&r),
                            Divisor::Surface(_) => None,
                        })
                        .ok_or_else(|| parse(format!("unknown component {r:?}")))?;
                    Ok(Output::value("sigma", values[i].to_string()))
                }
                None => {
                    let rows = names.into_iter().zip(values).map(|(n, v)| vec![n, v.to_string()]).collect();
                    Ok(Output::table(&["component", "sigma"], rows))
                }
            }
        }
        Command::Nsigma { src } => {
            let (loaded, d) = src.divisor()?;
            let (n, p) = match &d {
                Divisor::Toric(t) => {
                    let dec = t.sigma_decomposition().map_err(domain)?;
                    (dec.nsigma.to_string(), dec.psigma.to_string())
                }
                Divisor::Surface(_) => {
                    let (m, s) = surface_of(&loaded, &d)?;
                    let n = m.nsigma(&s).map_err(domain)?;
                    let p = s.try_sub(&n).map_err(domain)?;
                    let (ns, ps) = (n.display(&m).to_string(), p.display(&m).to_string());
                    (ns, ps)
                }
            };
            Ok(Output::table(&["part", "divisor"], vec![vec!["N".into(), n], vec!["P".into(), p]]))
        }
        Command::Bplus { src, bplus } => {
            let (loaded, d) = src.divisor()?;
            let set: BTreeSet<String> = match &d {
                Divisor::Toric(t) => t
                    .bplus_div(bplus.options())
                    .map_err(domain)?
                    .into_iter()
                    .map(|r| t.fan().ray_name(r).to_string())
                    .collect(),
                Divisor::Surface(_) => {
                    let (m, s) = surface_of(&loaded, &d)?;
                    m.bplus_div(&s).map_err(domain)?.into_iter().map(|c| m.component_name(c).to_string()).collect()
                }
            };
            Ok(Output::list("bplus", set.into_iter().collect()))
        }
        Command::Nef { src } => {
            let (loaded, d) = src.divisor()?;
            let b = match &d {
                Divisor::Toric(t) => t.is_nef().map_err(domain)?,
                Divisor::Surface(_) => {
                    let (m, s) = surface_of(&loaded, &d)?;
                    m.is_nef(&s).map_err(domain)?
                }
            };
            Ok(Output::value("nef", b.to_string()))
        }
        Command::Big { src } => {
            let (loaded, d) = src.divisor()?;
            let b = match &d {
                Divisor::Toric(t) => t.is_big(),
                Divisor::Surface(_) => {
                    let (m, s) = surface_of(&loaded, &d)?;
                    m.is_big(&s).map_err(domain)?
                }
            };
            Ok(Output::value("big", b.to_string()))
        }
        Command::Intersect { src, with } => {
            let (loaded, d) = src.divisor()?;
            let e = loaded.divisor(&with, "with")?;
            let v = match (&d, &e) {
                (Divisor::Toric(t), Divisor::Toric(u)) => t.intersection_nef_div(u).map_err(domain)?,
                (Divisor::Surface(s), Divisor::Surface(u)) => {
                    let (m, _) = surface_of(&loaded, &d)?;
                    m.intersect_divisors(s, u).map_err(domain)?
                }
                _ => return Err(domain("divisors live on different varieties")),
            };
            Ok(Output::value("intersection", v.to_string()))
        }
        Command::Zariski { src } => {
            let (loaded, d) = src.divisor()?;
            let (m, s) = surface_of(&loaded, &d)?;
            let z = m.zariski(&s).map_err(domain)?;
            Ok(Output::table(
                &["P_E", "P_F", "N_E", "volume"],
                vec![vec![
                    z.positive.x.to_string(),
                    z.positive.y.to_string(),
                    z.negative_e.to_string(),
                    z.volume.to_string(),
                ]],
            ))
        }
        Command::CheckA(c) => check(c, true),
        Command::CheckB(c) => check(c, false),
        Command::Corpus { seed, count, bplus } => {
            let opts = CheckOptions { bplus: bplus.options(), ..CheckOptions::default() };
            let summary = theorems::corpus_run(seed, count, &opts, exec);
            let value = serde_json::to_value(&summary).expect("summary serializes");
            if summary.counterexample_candidates > 0 {
                eprintln!("{}", summary.to_json());
                return Err(Failure::Counterexample(format!(
                    "{} counterexample candidate(s) in corpus seed {seed}",
                    summary.counterexample_candidates
                )));
            }
            let csv = vec![
                vec!["seed".into(), seed.to_string()],
                vec!["count".into(), count.to_string()],
                vec!["consistent".into(), summary.consistent.to_string()],
                vec!["counterexample_candidates".into(), "0".into()],
                vec!["errors".into(), summary.errors.to_string()],
                vec!["theorem_a_agree".into(), summary.theorem_a.agree.to_string()],
                vec!["theorem_b_agree".into(), summary.theorem_b.agree.to_string()],
                vec!["nef_instances".into(), summary.nef_instances.to_string()],
            ];
            Ok(Output::Custom { csv: Box::new(Output::table(&["key", "value"], csv)), json: value })
        }
        Command::PaperExample { e, samples: list } => {
            let ms = parse_samples(&list).map_err(parse)?;
            let rows = surface::paper_example(e, &ms).map_err(|err| match err {
                surface::SurfaceError::ExampleViolated { .. } => Failure::Counterexample(err.to_string()),
                other => domain(other),
            })?;
            let table = rows
                .into_iter()
                .map(|r| {
                    vec![
                        r.m.to_string(),
                        r.floor_dot_e.to_string(),
                        r.h0_shifted.to_string(),
                        r.h0_section.to_string(),
                        (r.h0_shifted < r.h0_section).to_string(),
                    ]
                })
                .collect();
            Ok(Output::table(&["m", "floor_dot_e", "h0_shifted", "h0_section", "strict"], table))
        }
    }
}

fn check(c: Check, theorem_a: bool) -> Res<Output> {
    let (loaded, d) = c.src.divisor()?;
    let e = loaded.divisor(&c.effective, "effective")?;
    let inst = match (d, e, &loaded.model) {
        (Divisor::Toric(d), Divisor::Toric(e), _) => Instance::Toric { d, e },
        (Divisor::Surface(d), Divisor::Surface(e), Model::Surface(m)) => Instance::Surface { model: m.clone(), d, e },
        _ => return Err(domain("divisors live on different varieties")),
    };
    let mut opts = CheckOptions::with_disc(loaded.disc.unwrap_or(2));
    if let Some(s) = &c.samples {
        opts.m_grid = samples(s)?;
    }
    opts.r_grid = samples(&c.r_grid)?;
    opts.shifts = c.shifts;
    opts.seed = c.seed;
    opts.bplus = c.bplus.options();
    let report = if theorem_a { theorems::check_theorem_a(&inst, &opts) } else { theorems::check_theorem_b(&inst, &opts) }
        .map_err(domain)?;
    let out = report_output(&report);
    if !report.is_consistent() {
        print!("{}", out.render(Format::Json));
        return Err(Failure::Counterexample(format!(
            "counterexample candidate for theorem {:?}: {}",
            report.theorem,
            ProblemFile::from_instance(&inst).to_canonical_json().trim()
        )));
    }
    Ok(out)
}

fn report_output(r: &TheoremReport) -> Output {
    let witness = |c| r.witnesses.get(c).map(|w| serde_json::to_string(w).expect("witness serializes"));
    let rows = r
        .clauses
        .iter()
        .map(|(c, v)| {
            let value = serde_json::to_value(v).expect("clause serializes");
            let status = value["status"].as_str().unwrap_or_default().to_string();
            let detail = match v {
                theorems::ClauseValue::NoCounterexample { samples } => format!("{samples} samples"),
                theorems::ClauseValue::Skipped { reason } => reason.clone(),
                _ => witness(c).unwrap_or_default(),
            };
            let name = serde_json::to_value(c).expect("clause serializes");
            vec![name.as_str().unwrap_or_default().to_string(), status, detail]
        })
        .chain(std::iter::once(vec!["verdict".to_string(), format!("{:?}", r.verdict), String::new()]))
        .collect();
    let json: Value = serde_json::to_value(r).expect("report serializes");
    Output::Custom { csv: Box::new(Output::table(&["clause", "status", "detail"], rows)), json }
}
