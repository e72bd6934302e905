//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property violation, 2 input error, 3 solver
//! failure, 4 class infeasible.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cost::CostSpec;
use crate::disintegration::{class_distance, classes_equal, disintegrate, map_from_class_plan, pushforward_meta, second_marginal, DisintegrationMap};
use crate::error::{Error, Result};
use crate::io;
use crate::kantorovich::{check_cyclical_monotonicity, check_twist, fmt_point, solve_mk, wasserstein, TransportPlan};
use crate::matrix::Matrix;
use crate::measure::{DiscreteMeasure, Point};
use crate::random;
use crate::scalar::{ratio, Mode, Rational, Scalar, Tolerances};
use crate::transport_class::{diagnose_existence, generalized_barycenter, meta_wasserstein, solve_class_problem, MetaMeasure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CLASS_INFEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "otclass", version, about = "Discrete optimal transport, disintegrations and transport classes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Numeric mode for loaded measures.
    #[arg(long, global = true, default_value = "float")]
    pub mode: Mode,
    /// Output format (default: table on a terminal, JSON otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Duality / violation threshold used for pass-fail decisions.
    #[arg(long, global = true, default_value_t = Tolerances::DEFAULT.dual)]
    pub eps_dual: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal plan, value and duals for MK(c, mu, nu).
    Solve {
        #[arg(long, default_value = "euclidean:1")]
        cost: String,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
    },
    /// Partition plans over a shared source into transport classes.
    Classify {
        #[arg(long = "plan", required = true)]
        plans: Vec<PathBuf>,
    },
    /// Class-constrained problem for a meta-measure Lambda.
    ClassSolve {
        #[arg(long, default_value = "euclidean:1")]
        cost: String,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        lambda: PathBuf,
    },
    /// Walk through the split-mass class example on x = (0,1,2), y = (0,1).
    Demo {
        /// Directory for the DOT figures.
        #[arg(long, default_value = ".")]
        dot_dir: PathBuf,
    },
    /// Run a randomized invariant suite.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Cost for the twist suite.
        #[arg(long, default_value = "sqeuclidean")]
        cost: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Duality,
    Monotonicity,
    BarycenterLipschitz,
    Twist,
    PushLemma,
}

/// A rendered report and the exit code it implies.
struct Report {
    json: Value,
    table: String,
    csv: String,
    code: i32,
}

/// Runs with JSON as the default format.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(args, out, err, false)
}

/// `terminal` selects the table format when `--format` is absent.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, terminal: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{e}");
            return code;
        }
    };
    let format = cli.format.unwrap_or(if terminal { Format::Table } else { Format::Json });
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report.json).expect("serializable")),
        Format::Csv => report.csv,
        Format::Table => report.table,
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: cannot write output: {e}");
        return EXIT_INPUT;
    }
    report.code
}

/// Maps library errors onto the exit-code contract.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::Unbounded | Error::NumericalFailure(_) | Error::BudgetExceeded(_) => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

fn execute(cli: &Cli) -> Result<Report> {
    if !(cli.eps_dual > 0.0 && cli.eps_dual.is_finite()) {
        return Err(Error::parse("--eps-dual", "must be positive"));
    }
    match &cli.command {
        Command::Solve { cost, mu, nu } => match cli.mode {
            Mode::Float => cmd_solve::<f64>(cost, mu, nu),
            Mode::Rational => cmd_solve::<Rational>(cost, mu, nu),
        },
        Command::Classify { plans } => match cli.mode {
            Mode::Float => cmd_classify::<f64>(plans),
            Mode::Rational => cmd_classify::<Rational>(plans),
        },
        Command::ClassSolve { cost, mu, lambda } => match cli.mode {
            Mode::Float => cmd_class_solve::<f64>(cost, mu, lambda),
            Mode::Rational => cmd_class_solve::<Rational>(cost, mu, lambda),
        },
        Command::Demo { dot_dir } => cmd_demo(dot_dir),
        Command::Check {
            suite,
            seed,
            trials,
            cost,
        } => cmd_check(*suite, *seed, *trials, cost, cli.eps_dual),
    }
}

fn load_measure<S: Scalar>(path: &Path, flag: &str) -> Result<DiscreteMeasure<S>> {
    io::measure_from_json(&io::read_json(path)?, flag)
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(headers.to_vec());
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

fn fmt_values<S: Scalar>(v: &[S]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_measure<S: Scalar>(m: &DiscreteMeasure<S>) -> String {
    let parts: Vec<String> = m
        .atoms()
        .iter()
        .zip(m.weights())
        .map(|(p, w)| format!("{w}·δ{}", fmt_point(p)))
        .collect();
    parts.join(" + ")
}

fn cmd_solve<S: Scalar>(cost: &str, mu: &Path, nu: &Path) -> Result<Report> {
    let c: CostSpec<S> = io::parse_cost_arg(cost)?;
    let mu: DiscreteMeasure<S> = load_measure(mu, "--mu")?;
    let nu: DiscreteMeasure<S> = load_measure(nu, "--nu")?;
    let sol = solve_mk(&c, &mu, &nu)?;
    let table_c = c.table(mu.atoms(), nu.atoms())?;
    let dual = sol.dual_value();
    let gap = (sol.value.clone() - dual.clone()).abs().canonical();
    let support = sol.plan.support();

    let triples: Vec<Value> = support
        .iter()
        .map(|&(i, j)| {
            json!({
                "i": i,
                "j": j,
                "mass": io::scalar_to_json(&sol.plan.matrix()[(i, j)]),
                "cost": io::scalar_to_json(&table_c[(i, j)]),
            })
        })
        .collect();
    let json = json!({
        "mode": S::MODE.as_str(),
        "cost": io::cost_to_json(&c),
        "value": io::scalar_to_json(&sol.value),
        "dual_value": io::scalar_to_json(&dual),
        "duality_gap": io::scalar_to_json(&gap),
        "iterations": sol.iterations,
        "plan": triples,
        "dual_source": io::potential_to_json(&sol.dual_source),
        "dual_target": io::potential_to_json(&sol.dual_target),
    });
    let mut text = format!(
        "value        {}\ndual value   {}\nduality gap  {}\niterations   {}\n\n",
        sol.value, dual, gap, sol.iterations
    );
    let rows: Vec<Vec<String>> = support
        .iter()
        .map(|&(i, j)| {
            vec![
                i.to_string(),
                j.to_string(),
                sol.plan.matrix()[(i, j)].to_string(),
                table_c[(i, j)].to_string(),
            ]
        })
        .collect();
    text.push_str(&table(&["i", "j", "mass", "cost"], &rows));
    let _ = writeln!(text, "\ndual source  {}", fmt_values(sol.dual_source.values()));
    let _ = writeln!(text, "dual target  {}", fmt_values(sol.dual_target.values()));
    Ok(Report {
        json,
        table: text,
        csv: sol.plan.to_csv(&c)?,
        code: EXIT_OK,
    })
}

/// Groups plans by class; each plan joins the first class whose
/// representative it matches.
fn partition<S: Scalar>(plans: &[TransportPlan<S>]) -> Result<(Vec<Vec<usize>>, Matrix<S>)> {
    let n = plans.len();
    let mut dist = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            let d = class_distance(&plans[a], &plans[b])?;
            dist[(a, b)] = d.clone();
            dist[(b, a)] = d;
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for p in 0..n {
        match classes.iter_mut().find(|cls| classes_equal(&plans[cls[0]], &plans[p]).unwrap_or(false)) {
            Some(cls) => cls.push(p),
            None => classes.push(vec![p]),
        }
    }
    Ok((classes, dist))
}

fn cmd_classify<S: Scalar>(paths: &[PathBuf]) -> Result<Report> {
    let labels: Vec<String> = paths
        .iter()
        .map(|p| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()))
        .collect();
    let plans = paths
        .iter()
        .map(|p| io::plan_from_json::<S>(&io::read_json(p)?, &p.display().to_string()))
        .collect::<Result<Vec<_>>>()?;
    let (classes, dist) = partition(&plans)?;
    Ok(render_partition(&labels, &classes, &dist))
}

fn render_partition<S: Scalar>(labels: &[String], classes: &[Vec<usize>], dist: &Matrix<S>) -> Report {
    let named: Vec<Vec<&str>> = classes
        .iter()
        .map(|c| c.iter().map(|&k| labels[k].as_str()).collect())
        .collect();
    let json = json!({
        "plans": labels,
        "classes": named,
        "meta_distances": io::matrix_to_json(dist),
    });
    let groups: Vec<String> = named.iter().map(|c| format!("{{{}}}", c.join(", "))).collect();
    let mut text = format!("classes  {}\n\n", groups.join(" "));
    let mut headers = vec![""];
    headers.extend(labels.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = (0..labels.len())
        .map(|a| {
            let mut row = vec![labels[a].clone()];
            row.extend((0..labels.len()).map(|b| dist[(a, b)].to_string()));
            row
        })
        .collect();
    text.push_str(&table(&headers, &rows));
    let mut csv = String::from("a,b,meta_distance,same_class\n");
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            let same = classes.iter().any(|c| c.contains(&a) && c.contains(&b));
            let _ = writeln!(csv, "{},{},{},{}", labels[a], labels[b], dist[(a, b)], same);
        }
    }
    Report {
        json,
        table: text,
        csv,
        code: EXIT_OK,
    }
}

fn cmd_class_solve<S: Scalar>(cost: &str, mu: &Path, lambda: &Path) -> Result<Report> {
    let c: CostSpec<S> = io::parse_cost_arg(cost)?;
    let mu: DiscreteMeasure<S> = load_measure(mu, "--mu")?;
    let lambda: MetaMeasure<S> = io::meta_from_json(&io::read_json(lambda)?, "--lambda")?;
    let report = solve_class_problem(&c, &mu, &lambda)?;
    let diagnosis = match c {
        CostSpec::InnerProduct | CostSpec::Separable { .. } => Some(diagnose_existence(&c, &mu, &lambda)?),
        _ => None,
    };
    let opt = |v: &Option<S>| v.as_ref().map_or(Value::String("inf".into()), io::scalar_to_json);
    let opt_text = |v: &Option<S>| v.as_ref().map_or_else(|| "+inf".to_string(), ToString::to_string);
    let flags: Vec<Value> = report
        .degeneracy_flags
        .iter()
        .map(|f| json!({"pair": [f.pair.0, f.pair.1], "difference": io::scalar_to_json(&f.difference)}))
        .collect();
    let pairs: Vec<Value> = diagnosis
        .iter()
        .flat_map(|d| &d.pairs)
        .map(|p| {
            let disc = match &p.discriminant {
                crate::transport_class::Discriminant::Barycenter(v) => Value::Array(v.iter().map(io::scalar_to_json).collect()),
                crate::transport_class::Discriminant::Integral(x) => io::scalar_to_json(x),
            };
            json!({"pair": [p.pair.0, p.pair.1], "discriminant": disc, "degenerate": p.degenerate})
        })
        .collect();
    let mut json = json!({
        "mode": S::MODE.as_str(),
        "relaxed_value": io::scalar_to_json(&report.relaxed_value),
        "map_value": opt(&report.map_value),
        "plan_integral_value": opt(&report.plan_integral_value),
        "values_agree": report.values_agree,
        "gap": opt(&report.gap),
        "feasible_maps_exist": report.feasible_maps_exist,
        "optimal_assignment": report.optimal_assignment.as_ref().map(|t| t.as_slice().to_vec()),
        "degeneracy_flags": flags,
    });
    if let Some(d) = &diagnosis {
        json["discriminants"] = Value::Array(pairs);
        json["tie_degenerate"] = Value::Bool(d.tie_degenerate);
        json["feasible_map_costs_tied"] = Value::Bool(d.ties.all_tied);
    }

    let mut text = String::new();
    let _ = writeln!(text, "relaxed value        {}", report.relaxed_value);
    let _ = writeln!(text, "map value            {}", opt_text(&report.map_value));
    let _ = writeln!(text, "plan-integral value  {}", opt_text(&report.plan_integral_value));
    let _ = writeln!(text, "gap                  {}", opt_text(&report.gap));
    let _ = writeln!(text, "feasible maps        {}", report.feasible_maps_exist);
    let assignment = report
        .optimal_assignment
        .as_ref()
        .map_or_else(|| "none".to_string(), |t| format!("{:?}", t.as_slice()));
    let _ = writeln!(text, "assignment           {assignment}");
    for f in &report.degeneracy_flags {
        let _ = writeln!(
            text,
            "degenerate pair      ({}, {}): lifted-cost difference constant = {}",
            f.pair.0, f.pair.1, f.difference
        );
    }
    if let Some(d) = &diagnosis {
        for p in d.pairs.iter().filter(|p| p.degenerate) {
            let _ = writeln!(text, "vanishing discriminant for meta-atoms ({}, {})", p.pair.0, p.pair.1);
        }
        if d.tie_degenerate {
            let _ = writeln!(text, "tie-degenerate       all {} feasible maps tie: {}", d.ties.feasible_maps, d.ties.all_tied);
        }
    }
    let mut csv = String::from("atom,meta_atom\n");
    if let Some(t) = &report.optimal_assignment {
        for (i, k) in t.as_slice().iter().enumerate() {
            let _ = writeln!(csv, "{i},{k}");
        }
    }
    Ok(Report {
        json,
        table: text,
        csv,
        code: if report.feasible_maps_exist { EXIT_OK } else { EXIT_CLASS_INFEASIBLE },
    })
}

/// The four plans of the split-mass example: mass split at x₁, at x₂, and
/// two plans splitting at both x₁ and x₂ with different travelling masses.
pub fn split_mass_plans() -> Vec<(&'static str, TransportPlan<Rational>)> {
    let x: Vec<Point<Rational>> = (0..3).map(|k| vec![ratio(k, 1)]).collect();
    let y: Vec<Point<Rational>> = (0..2).map(|k| vec![ratio(k, 1)]).collect();
    let mu = DiscreteMeasure::uniform(x).expect("valid");
    let nu = DiscreteMeasure::new(y, vec![ratio(1, 6), ratio(5, 6)]).expect("valid");
    let plan = |rows: [[(i64, i64); 2]; 3]| {
        let m = rows.iter().map(|r| r.iter().map(|&(p, q)| ratio(p, q)).collect()).collect();
        TransportPlan::new(mu.clone(), nu.clone(), Matrix::from_rows(m).expect("rectangular")).expect("feasible")
    };
    vec![
        ("f", plan([[(1, 6), (1, 6)], [(0, 1), (1, 3)], [(0, 1), (1, 3)]])),
        ("g", plan([[(0, 1), (1, 3)], [(1, 6), (1, 6)], [(0, 1), (1, 3)]])),
        ("h", plan([[(3, 30), (7, 30)], [(2, 30), (8, 30)], [(0, 1), (1, 3)]])),
        ("k", plan([[(1, 30), (9, 30)], [(4, 30), (6, 30)], [(0, 1), (1, 3)]])),
    ]
}

fn figure_dot(title: &str, plans: &[&(&str, TransportPlan<Rational>)]) -> String {
    let mut out = format!("digraph \"{title}\" {{\n  rankdir=LR;\n");
    for (name, p) in plans {
        let _ = writeln!(out, "  subgraph cluster_{name} {{\n    label=\"{name}\";");
        for i in 0..p.source().len() {
            let _ = writeln!(out, "    {name}_x{i} [label=\"x{}\"];", i + 1);
        }
        for j in 0..p.target().len() {
            let _ = writeln!(out, "    {name}_y{j} [label=\"y{}\"];", j + 1);
        }
        for (i, j) in p.support() {
            let w = &p.matrix()[(i, j)];
            let pen = 1.0 + 8.0 * w.to_f64_lossy();
            let _ = writeln!(out, "    {name}_x{i} -> {name}_y{j} [label=\"{w}\", penwidth={pen:.3}];");
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

fn cmd_demo(dot_dir: &Path) -> Result<Report> {
    let plans = split_mass_plans();
    let c = CostSpec::<Rational>::euclidean(1.0)?;
    let mu = plans[0].1.source().clone();
    let nu = plans[0].1.target().clone();
    let labels: Vec<String> = plans.iter().map(|(n, _)| n.to_string()).collect();
    let bare: Vec<TransportPlan<Rational>> = plans.iter().map(|(_, p)| p.clone()).collect();
    let (classes, dist) = partition(&bare)?;

    let eq = |a: usize, b: usize| classes_equal(&bare[a], &bare[b]);
    let f_g = eq(0, 1)?;
    let f_h = eq(0, 2)?;
    let h_k = eq(2, 3)?;
    let mut marginals_ok = true;
    let mut plan_json = serde_json::Map::new();
    let mut text = String::new();
    let _ = writeln!(text, "mu  {}", fmt_measure(&mu));
    let _ = writeln!(text, "nu  {}\n", fmt_measure(&nu));
    let mut metas = Vec::new();
    for (name, p) in &plans {
        let f: DisintegrationMap<Rational> = disintegrate(p)?;
        let meta = pushforward_meta(&f)?;
        let marginal = second_marginal(p)?;
        marginals_ok &= marginal == nu;
        let cost = p.cost(&c)?;
        let splits = map_from_class_plan(p)?.splitting_atoms;
        let _ = writeln!(text, "plan {name}   cost {cost}   splitting atoms {splits:?}");
        for (i, cond) in f.conditionals().iter().enumerate() {
            let _ = writeln!(text, "  {name}(x{}) = {}", i + 1, fmt_measure(cond));
        }
        let meta_parts: Vec<String> = meta
            .atoms()
            .iter()
            .zip(meta.weights())
            .map(|(a, w)| format!("{w}·δ[{}]", fmt_measure(a)))
            .collect();
        let _ = writeln!(text, "  {name}_#mu = {}", meta_parts.join(" + "));
        let _ = writeln!(text, "  second marginal = {}\n", fmt_measure(&marginal));
        plan_json.insert(
            name.to_string(),
            json!({
                "matrix": io::matrix_to_json(p.matrix()),
                "conditionals": f.conditionals().iter().map(io::measure_to_json).collect::<Vec<_>>(),
                "pushforward": io::meta_to_json(&meta),
                "second_marginal": io::measure_to_json(&marginal),
                "cost": io::scalar_to_json(&cost),
                "splitting_atoms": splits,
            }),
        );
        metas.push(meta);
    }
    let mk = solve_mk(&c, &mu, &nu)?.value;

    // The class named by Dirac meta-atoms shares ν as barycenter but is a
    // different element of P(P(Y)) than the push-forward of f.
    let dirac_class = MetaMeasure::new(
        nu.atoms().iter().map(|y| DiscreteMeasure::dirac(y.clone())).collect::<Result<Vec<_>>>()?,
        nu.weights().to_vec(),
    )?;
    let dirac_gap = meta_wasserstein(&metas[0], &dirac_class)?;
    let same_barycenter = generalized_barycenter(&dirac_class)? == generalized_barycenter(&metas[0])?;

    std::fs::create_dir_all(dot_dir).map_err(|e| Error::parse("--dot-dir", e.to_string()))?;
    let figures = [
        ("split_mass_same_class.dot", "one split mass", [&plans[0], &plans[1]]),
        ("split_mass_two_splits.dot", "two split masses", [&plans[2], &plans[3]]),
    ];
    let mut dot_files = Vec::new();
    for (file, title, members) in figures {
        let path = dot_dir.join(file);
        std::fs::write(&path, figure_dot(title, &members)).map_err(|e| Error::parse("--dot-dir", e.to_string()))?;
        dot_files.push(file);
    }

    let named: Vec<Vec<&str>> = classes
        .iter()
        .map(|c| c.iter().map(|&k| labels[k].as_str()).collect())
        .collect();
    let groups: Vec<String> = named.iter().map(|c| format!("{{{}}}", c.join(", "))).collect();
    let _ = writeln!(text, "classes  {}", groups.join(" "));
    let _ = writeln!(text, "f ~ g: {f_g}   f ~ h: {f_h}   h ~ k: {h_k}");
    let _ = writeln!(text, "all second marginals equal nu: {marginals_ok}");
    let _ = writeln!(text, "MK(c, mu, nu) with c = |x - y|: {mk}");
    let _ = writeln!(
        text,
        "Dirac-atom class 1/6·δ[δ(0)] + 5/6·δ[δ(1)]: meta distance to f_#mu = {dirac_gap}, same barycenter: {same_barycenter}"
    );
    let _ = writeln!(text, "figures: {}", dot_files.join(", "));

    let ok = f_g && !f_h && !h_k && marginals_ok;
    let json = json!({
        "mu": io::measure_to_json(&mu),
        "nu": io::measure_to_json(&nu),
        "plans": plan_json,
        "classes": named,
        "meta_distances": io::matrix_to_json(&dist),
        "checks": {
            "f_equals_g": f_g,
            "f_equals_h": f_h,
            "h_equals_k": h_k,
            "second_marginals_equal_nu": marginals_ok,
        },
        "mk_value": io::scalar_to_json(&mk),
        "dirac_class": {
            "lambda": io::meta_to_json(&dirac_class),
            "meta_distance_to_f": io::scalar_to_json(&dirac_gap),
            "same_barycenter": same_barycenter,
        },
        "dot_files": dot_files,
    });
    let mut csv = String::from("plan,class,cost\n");
    for (k, (name, p)) in plans.iter().enumerate() {
        let class = classes.iter().position(|c| c.contains(&k)).unwrap_or(0);
        let _ = writeln!(csv, "{name},{class},{}", p.cost(&c)?);
    }
    Ok(Report {
        json,
        table: text,
        csv,
        code: if ok { EXIT_OK } else { EXIT_VIOLATION },
    })
}

/// Outcome of one randomized suite.
struct SuiteResult {
    max_violation: f64,
    violations: usize,
    witness: Option<Value>,
    extra: Value,
}

fn cmd_check(suite: Suite, seed: u64, trials: usize, cost: &str, eps: f64) -> Result<Report> {
    if trials == 0 {
        return Err(Error::parse("--trials", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (name, r) = match suite {
        Suite::Duality => ("duality", suite_duality(&mut rng, trials, eps)?),
        Suite::Monotonicity => ("monotonicity", suite_monotonicity(&mut rng, trials, eps)?),
        Suite::BarycenterLipschitz => ("barycenter-lipschitz", suite_lipschitz(&mut rng, trials, eps)?),
        Suite::Twist => ("twist", suite_twist(&mut rng, trials, cost)?),
        Suite::PushLemma => ("push-lemma", suite_push_lemma(&mut rng, trials)?),
    };
    let pass = r.violations == 0;
    let mut json = json!({
        "suite": name,
        "seed": seed,
        "trials": trials,
        "max_violation": r.max_violation,
        "violations": r.violations,
        "pass": pass,
        "details": r.extra,
    });
    if let Some(w) = &r.witness {
        json["witness"] = w.clone();
    }
    let mut text = format!(
        "suite          {name}\nseed           {seed}\ntrials         {trials}\nmax violation  {:e}\nviolations     {}\nresult         {}\n",
        r.max_violation,
        r.violations,
        if pass { "pass" } else { "FAIL" }
    );
    if let Some(w) = &r.witness {
        let _ = writeln!(text, "witness        {w}");
    }
    let csv = format!(
        "suite,seed,trials,max_violation,violations,pass\n{name},{seed},{trials},{:e},{},{pass}\n",
        r.max_violation, r.violations
    );
    Ok(Report {
        json,
        table: text,
        csv,
        code: if pass { EXIT_OK } else { EXIT_VIOLATION },
    })
}

fn float_points<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Vec<Point<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-10.0..10.0)).collect()).collect()
}

/// `|primal − dual|` and the most negative reduced cost on random float
/// instances up to 12 × 12, alternating Euclidean and matrix costs.
fn suite_duality<R: Rng>(rng: &mut R, trials: usize, eps: f64) -> Result<SuiteResult> {
    let mut out = SuiteResult {
        max_violation: 0.0,
        violations: 0,
        witness: None,
        extra: Value::Null,
    };
    let mut max_gap: f64 = 0.0;
    for t in 0..trials {
        let (m, n) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let mu = DiscreteMeasure::normalized(float_points(rng, m, 2), random::weights(rng, m))?;
        let nu = DiscreteMeasure::normalized(float_points(rng, n, 2), random::weights(rng, n))?;
        let c = if t % 2 == 0 {
            CostSpec::euclidean(1.0)?
        } else {
            random::cost_matrix(rng, mu.len(), nu.len(), 20)
        };
        let sol = solve_mk(&c, &mu, &nu)?;
        let table_c = c.table(mu.atoms(), nu.atoms())?;
        let gap = (sol.value - sol.dual_value()).abs();
        let worst_rc = table_c
            .iter()
            .map(|(i, j, cij)| cij - sol.dual_source.values()[i] - sol.dual_target.values()[j])
            .fold(0.0, f64::min);
        let violation = gap.max(-worst_rc);
        max_gap = max_gap.max(gap);
        let limit = eps * (mu.len() + nu.len()) as f64;
        if violation > out.max_violation {
            out.max_violation = violation;
        }
        if violation > limit {
            out.violations += 1;
            out.witness.get_or_insert_with(|| {
                json!({"trial": t, "m": mu.len(), "n": nu.len(), "gap": gap, "min_reduced_cost": worst_rc,
                       "mu": io::measure_to_json(&mu), "nu": io::measure_to_json(&nu), "cost": io::cost_to_json(&c)})
            });
        }
    }
    out.extra = json!({"max_gap": max_gap});
    Ok(out)
}

/// Exhaustive 3-cycle search on supports of optimal squared-Euclidean plans.
fn suite_monotonicity<R: Rng>(rng: &mut R, trials: usize, eps: f64) -> Result<SuiteResult> {
    let mut out = SuiteResult {
        max_violation: 0.0,
        violations: 0,
        witness: None,
        extra: Value::Null,
    };
    let c = CostSpec::SquaredEuclidean;
    for t in 0..trials {
        let (m, n) = (rng.gen_range(2..=5), rng.gen_range(2..=5));
        let mu = DiscreteMeasure::normalized(float_points(rng, m, 2), random::weights(rng, m))?;
        let nu = DiscreteMeasure::normalized(float_points(rng, n, 2), random::weights(rng, n))?;
        let sol = solve_mk(&c, &mu, &nu)?;
        let support = sol.plan.support();
        let r = check_cyclical_monotonicity(&c, mu.atoms(), nu.atoms(), &support, 3)?;
        if let Some(w) = r.violating_cycle {
            out.max_violation = out.max_violation.max(w.improvement);
            if w.improvement > eps {
                out.violations += 1;
                out.witness.get_or_insert_with(|| {
                    json!({"trial": t, "pairs": w.pairs.iter().map(|&k| support[k]).collect::<Vec<_>>(),
                           "sigma": w.sigma, "improvement": w.improvement})
                });
            }
        }
    }
    Ok(out)
}

/// `W₁(β(N₁), β(N₂)) ≤ W_meta(N₁, N₂)` on random meta-measure pairs.
fn suite_lipschitz<R: Rng>(rng: &mut R, trials: usize, eps: f64) -> Result<SuiteResult> {
    let mut out = SuiteResult {
        max_violation: f64::NEG_INFINITY,
        violations: 0,
        witness: None,
        extra: Value::Null,
    };
    let mut min_slack = f64::INFINITY;
    for t in 0..trials {
        let (k1, k2) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let n1: MetaMeasure<f64> = random::meta_measure(rng, k1, 5, 2, 6);
        let n2: MetaMeasure<f64> = random::meta_measure(rng, k2, 5, 2, 6);
        let outer = meta_wasserstein(&n1, &n2)?;
        let inner = wasserstein(1.0, &generalized_barycenter(&n1)?, &generalized_barycenter(&n2)?)?;
        let slack = outer - inner;
        min_slack = min_slack.min(slack);
        out.max_violation = out.max_violation.max(-slack);
        if -slack > eps {
            out.violations += 1;
            out.witness.get_or_insert_with(|| {
                json!({"trial": t, "meta_distance": outer, "barycenter_distance": inner,
                       "n1": io::meta_to_json(&n1), "n2": io::meta_to_json(&n2)})
            });
        }
    }
    out.extra = json!({"min_slack": min_slack});
    Ok(out)
}

/// Finite-difference twist check on a random planar grid.
fn suite_twist<R: Rng>(rng: &mut R, trials: usize, cost: &str) -> Result<SuiteResult> {
    let c: CostSpec<f64> = io::parse_cost_arg(cost)?;
    let mut out = SuiteResult {
        max_violation: 0.0,
        violations: 0,
        witness: None,
        extra: Value::Null,
    };
    let mut checked = 0usize;
    for t in 0..trials {
        let (grid, ys) = match &c {
            CostSpec::Separable { a, b } => (
                (0..a.len()).map(|k| vec![k as f64]).collect::<Vec<_>>(),
                (0..b.len()).map(|k| vec![k as f64]).collect::<Vec<_>>(),
            ),
            _ => (float_points(rng, 8, 2), float_points(rng, 4, 2)),
        };
        if ys.len() < 2 {
            return Err(Error::InvalidArgument("twist check needs at least two targets".into()));
        }
        let pairs: Vec<(usize, usize)> = (0..ys.len()).flat_map(|a| (a + 1..ys.len()).map(move |b| (a, b))).collect();
        let v = check_twist(&c, &grid, &ys, &pairs, None)?;
        checked += grid.len() * pairs.len();
        out.violations += v.len();
        if let Some(first) = v.first() {
            out.max_violation = 1.0;
            out.witness.get_or_insert_with(|| {
                let (a, b) = pairs[first.pair_index];
                json!({"trial": t, "x": grid[first.x_index], "y1": ys[a], "y2": ys[b], "gradient_norm": first.gradient_norm})
            });
        }
    }
    out.extra = json!({"points_checked": checked, "cost": io::cost_to_json(&c)});
    Ok(out)
}

/// Same-class plan pairs (conditionals permuted across equal-weight atoms)
/// have equal second marginals; the product-vs-map pair shows the converse fails.
fn suite_push_lemma<R: Rng>(rng: &mut R, trials: usize) -> Result<SuiteResult> {
    use rand::seq::SliceRandom;
    let mut out = SuiteResult {
        max_violation: 0.0,
        violations: 0,
        witness: None,
        extra: Value::Null,
    };
    for t in 0..trials {
        let m = rng.gen_range(2..=5);
        let n = rng.gen_range(2..=4);
        let mu: DiscreteMeasure<Rational> = random::uniform(rng, m, 1, 6);
        let targets = random::points::<Rational, _>(rng, n, 1, 6);
        let gamma = random::plan(rng, &mu, &targets);
        let f = disintegrate(&gamma)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        let g = DisintegrationMap::new(mu.clone(), order.iter().map(|&k| f.conditional(k).clone()).collect())?;
        let eta = crate::disintegration::recombine(&g, &mu)?;
        let same = classes_equal(&gamma, &eta)?;
        let marginals = second_marginal(&gamma)? == second_marginal(&eta)?;
        if !(same && marginals) {
            out.violations += 1;
            out.max_violation = 1.0;
            out.witness.get_or_insert_with(|| {
                json!({"trial": t, "classes_equal": same, "marginals_equal": marginals,
                       "gamma": io::plan_to_json(&gamma), "eta": io::plan_to_json(&eta)})
            });
        }
    }
    let (product, map_plan) = converse_counterexample();
    let marginals = second_marginal(&product)? == second_marginal(&map_plan)?;
    let same = classes_equal(&product, &map_plan)?;
    let certified = marginals && !same;
    if !certified {
        out.violations += 1;
        out.max_violation = 1.0;
        out.witness.get_or_insert_with(|| json!({"converse_counterexample": "not certified"}));
    }
    out.extra = json!({"converse_failure_certified": certified});
    Ok(out)
}

/// `μ ⊗ ν` and `(Id × t)_# μ` for `μ = ν = ½δ₀ + ½δ₁`, `t = id`: equal second
/// marginals, different classes.
pub fn converse_counterexample() -> (TransportPlan<Rational>, TransportPlan<Rational>) {
    let mu = DiscreteMeasure::uniform(vec![vec![ratio(0, 1)], vec![ratio(1, 1)]]).expect("valid");
    let product = TransportPlan::new(mu.clone(), mu.clone(), Matrix::from_fn(2, 2, |_, _| ratio(1, 4))).expect("feasible");
    let map_plan = TransportPlan::from_map(mu.clone(), mu, &crate::measure::IndexMap::identity(2)).expect("feasible");
    (product, map_plan)
}
