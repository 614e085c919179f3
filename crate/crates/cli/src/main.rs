mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcalc_core::figures::{self, FigureId};
use qcalc_core::format::csv_num;
use qcalc_core::identities::application::Levels;
use qcalc_core::identities::montecarlo::{monte_carlo_crosscheck, VerifierTarget};
use qcalc_core::identities::{ApplicationKind, IdentityReport, TestFunction, Tolerances};
use qcalc_core::numerics::grid::uniform_open;
use qcalc_core::orders::{implication_suite, Verdict, DEFAULT_GRID, DEFAULT_TOL};
use qcalc_core::registry::{Registry, VerifyArgs};
use qcalc_core::risk::RiskCurve;
use qcalc_core::unitlaw::{golden_fixed_point, lift_xl, psi_l, UnitVariable};
use qcalc_core::{Error, QuantileModel};

const DEFAULT_POINTS: usize = 513;

#[derive(Parser)]
#[command(
    name = "qcalc",
    version,
    about = "Quantile calculus: unit laws, risk measures, orders and identity checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density of X^L or Z^L = Psi^L(X, Y) on a grid.
    Density(DensityArgs),
    /// Regenerate a figure's curves.
    Figure(FigureArgs),
    /// Check an identity numerically.
    Verify(VerifyCmd),
    /// Check a stochastic order, an aging class, or the implication suite.
    Order(OrderArgs),
    /// Evaluate a risk measure.
    Risk(RiskArgs),
    /// Locate the power-family exponent with X equal in law to X^L.
    Golden,
    /// List registered names.
    List,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Svg
    }

    fn svg(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Lift,
    Psi,
}

/// A model given as `family:p1,p2`, or as a bare family name with named
/// parameter flags.
#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// Model spec, e.g. `exp:1`, `lomax:2,1`, `tab:file.csv`, `residual:0.5@exp:1`.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

impl ModelArgs {
    fn named(&self, name: &str) -> Option<f64> {
        match name {
            "lambda" => self.lambda,
            "alpha" => self.alpha,
            "beta" => self.beta,
            "a" => self.a,
            "c" => self.c,
            "gamma" => self.gamma,
            "delta" => self.delta,
            _ => None,
        }
    }

    fn model(&self, reg: &Registry) -> Result<Option<QuantileModel>, Error> {
        let Some(spec) = &self.family else {
            return Ok(None);
        };
        if spec.contains(':') || spec.contains('@') {
            return reg.families.parse(spec).map(Some);
        }
        let factory = reg.families.factory(spec)?;
        let values = factory
            .parameters()
            .iter()
            .map(|p| {
                self.named(p)
                    .map(|v| v.to_string())
                    .ok_or_else(|| Error::InvalidParameter(format!("{spec} needs --{p}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        factory.build(&values.join(",")).map(Some)
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; CSV goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Shorthand for `--construction lift`.
    #[arg(long)]
    lift: bool,
    #[arg(long, value_enum)]
    construction: Option<Construction>,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    /// Interior points `i/(N+1)`.
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FigureArgs {
    /// `1`, `2a`, `2b`, `3` or `all`.
    id: String,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    grid: usize,
    #[arg(long, value_enum, default_value = "both")]
    format: Format,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyCmd {
    /// Identity id (taylor1, taylorN, corollary, mvt, proportional, app-nbu, ...).
    id: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    /// Test function, e.g. `pow:2`, `exp`, `const`.
    #[arg(long)]
    g: Option<String>,
    /// `φ` for the proportional identity.
    #[arg(long)]
    phi: Option<String>,
    /// Expansion order for taylorN and corollary.
    #[arg(long)]
    n: Option<usize>,
    /// Exponent for the corollary (`g = u^α`).
    #[arg(long = "power")]
    power: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long)]
    w: Option<f64>,
    /// Check only the fixed-level hypothesis for application identities.
    #[arg(long)]
    local: bool,
    #[arg(long, default_value_t = Tolerances::default().abs)]
    tol_abs: f64,
    #[arg(long, default_value_t = Tolerances::default().rel)]
    tol_rel: f64,
    /// Also estimate both sides from this many draws.
    #[arg(long)]
    monte_carlo: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct OrderArgs {
    /// Relation (st, hr, rh, lr, star, ps, rps), class (nbu, ifr, xtau, pnbu,
    /// pifr) or `implications`.
    name: String,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    y: Option<String>,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct RiskArgs {
    /// Measure (var, cvar, avar, right-spread, pcvar).
    measure: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Comma-separated levels; defaults to the grid.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command: usage errors exit 2, failed checks exit 1.
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::HypothesisFailed { .. }
            | Error::NotStochasticallyOrdered { .. }
            | Error::EqualMeans(_)
            | Error::NonMonotonePhi(_)
            | Error::NonConvergence(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<bool, Failure>;

/// Writes through a sibling temporary file so readers never see a partial
/// file.
fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

fn need_model(reg: &Registry, spec: &Option<String>, flag: &str) -> Result<QuantileModel, Failure> {
    let spec = spec
        .as_ref()
        .ok_or_else(|| Failure::Usage(format!("missing --{flag}")))?;
    Ok(reg.families.parse(spec)?)
}

fn grid_points(n: usize) -> Result<Vec<f64>, Failure> {
    if n == 0 {
        return Err(Failure::Usage("--grid must be at least 1".into()));
    }
    Ok(uniform_open(n))
}

fn density(reg: &Registry, a: DensityArgs) -> CmdResult {
    let u = grid_points(a.grid)?;
    let construction = match (a.lift, a.construction) {
        (true, Some(Construction::Psi)) => {
            return Err(Failure::Usage(
                "--lift conflicts with --construction psi".into(),
            ))
        }
        (true, _) => Construction::Lift,
        (false, Some(c)) => c,
        (false, None) => return Err(Failure::Usage("choose --lift or --construction".into())),
    };
    let law: UnitVariable = match construction {
        Construction::Lift => {
            let x = match a.model.model(reg)? {
                Some(m) => m,
                None => need_model(reg, &a.x, "family")?,
            };
            lift_xl(&x)?
        }
        Construction::Psi => psi_l(&need_model(reg, &a.x, "x")?, &need_model(reg, &a.y, "y")?)?,
    };
    let values: Vec<f64> = u.iter().map(|&p| law.density(p)).collect();
    let mut csv = String::from("u,density\n");
    for (p, d) in u.iter().zip(&values) {
        csv.push_str(&format!("{},{}\n", csv_num(*p), csv_num(*d)));
    }
    let title = law.provenance().to_string();
    emit(&a.output, &csv, || {
        svg::line_plot(
            &title,
            "u",
            "density",
            &[svg::Series {
                label: &title,
                x: &u,
                y: &values,
            }],
        )
    })?;
    Ok(true)
}

fn emit(out: &OutputArgs, csv: &str, plot: impl FnOnce() -> String) -> Result<(), Failure> {
    match &out.out {
        None => {
            if out.format.svg() {
                return Err(Failure::Usage("--format svg/both needs --out".into()));
            }
            io::stdout().write_all(csv.as_bytes())?;
        }
        Some(path) => {
            if out.format.csv() {
                write_atomic(&path.with_extension("csv"), csv)?;
            }
            if out.format.svg() {
                write_atomic(&path.with_extension("svg"), &plot())?;
            }
        }
    }
    Ok(())
}

fn figure(a: FigureArgs) -> CmdResult {
    let ids: Vec<FigureId> = if a.id.eq_ignore_ascii_case("all") {
        FigureId::ALL.to_vec()
    } else {
        vec![a.id.parse()?]
    };
    grid_points(a.grid)?;
    fs::create_dir_all(&a.out_dir)?;
    let mut ok = true;
    for id in ids {
        let fig = figures::render(id, a.grid)?;
        for c in &fig.curves {
            if a.format.csv() {
                let name = format!("{id}_{}.csv", c.label.replace([',', '='], "_"));
                write_atomic(&a.out_dir.join(name), &c.to_csv())?;
            }
        }
        if a.format.svg() {
            let series: Vec<svg::Series> = fig
                .curves
                .iter()
                .map(|c| svg::Series {
                    label: &c.label,
                    x: &c.u,
                    y: &c.density,
                })
                .collect();
            let plot = svg::line_plot(fig.spec.title, "u", "density", &series);
            write_atomic(&a.out_dir.join(format!("{id}.svg")), &plot)?;
        }
        for line in fig.summary() {
            println!("{line}");
        }
        ok &= fig.pass();
    }
    Ok(ok)
}

fn parse_g(s: &Option<String>) -> Result<Option<TestFunction>, Failure> {
    s.as_deref()
        .map(str::parse::<TestFunction>)
        .transpose()
        .map_err(Failure::from)
}

fn verify(reg: &Registry, a: VerifyCmd) -> CmdResult {
    let x = match a.model.model(reg)? {
        Some(m) => Some(m),
        None => a.x.as_ref().map(|s| reg.families.parse(s)).transpose()?,
    };
    let args = VerifyArgs {
        x,
        y: a.y.as_ref().map(|s| reg.families.parse(s)).transpose()?,
        g: parse_g(&a.g)?,
        phi: parse_g(&a.phi)?,
        order: a.n,
        alpha: a.power,
        levels: Levels {
            p: a.p,
            r: a.r,
            v: a.v,
            w: a.w,
        },
        local: a.local,
        tolerances: Tolerances {
            abs: a.tol_abs,
            rel: a.tol_rel,
        },
    };
    let verifier = reg.verifier(&a.id)?;
    let reports: Vec<IdentityReport> = match a.monte_carlo {
        None => reg.verify(verifier.id(), &args)?,
        Some(n) => {
            let target = mc_target(verifier.id(), &args)?;
            vec![monte_carlo_crosscheck(&target, n, a.seed)?.with_tolerances(args.tolerances)]
        }
    };
    println!("{}", IdentityReport::CSV_HEADER);
    for r in &reports {
        println!("{}", r.csv_row());
        for n in &r.notes {
            eprintln!("# {n}");
        }
        for d in &r.density_checks {
            eprintln!(
                "# {}: max relative deviation {} at u = {} ({} points)",
                d.formula,
                csv_num(d.max_rel_deviation),
                csv_num(d.worst_u),
                d.points
            );
        }
        if let Some(m) = &r.monte_carlo {
            eprintln!(
                "# monte carlo lhs {} ± {}, rhs {} ± {}",
                csv_num(m.lhs.mean),
                csv_num(m.lhs.std_error),
                csv_num(m.rhs.mean),
                csv_num(m.rhs.std_error)
            );
        }
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn mc_target(id: &str, a: &VerifyArgs) -> Result<VerifierTarget, Failure> {
    let x = || a.x(id).cloned().map_err(Failure::from);
    let g = || a.g(id).cloned().map_err(Failure::from);
    Ok(match id {
        "taylor1" => VerifierTarget::Taylor1 { x: x()?, g: g()? },
        "taylorN" => VerifierTarget::TaylorN {
            x: x()?,
            g: g()?,
            n: a.order
                .ok_or_else(|| Failure::Usage("taylorN needs --n".into()))?,
        },
        "corollary" => VerifierTarget::Corollary {
            x: x()?,
            alpha: a
                .alpha
                .ok_or_else(|| Failure::Usage("corollary needs --power".into()))?,
            n: a.order.unwrap_or(1),
        },
        "mvt" => VerifierTarget::Mvt {
            x: x()?,
            y: a.y(id)?.clone(),
            g: g()?,
        },
        "proportional" => VerifierTarget::Proportional {
            phi: a
                .phi
                .clone()
                .ok_or_else(|| Failure::Usage("proportional needs --phi".into()))?,
            g: g()?,
        },
        app => VerifierTarget::Application {
            x: x()?,
            kind: ApplicationKind::from_id(app, a.levels)?,
            g: g()?,
        },
    })
}

const VERDICT_HEADER: &str = "relation,status,grid,tol,location,quantity,violation";

fn verdict_row(v: &Verdict) -> String {
    let (loc, quantity, violation) = match &v.witness {
        Some(w) => (
            w.location
                .iter()
                .map(|&l| csv_num(l))
                .collect::<Vec<_>>()
                .join(";"),
            format!("\"{}\"", w.quantity.replace('"', "'")),
            csv_num(w.violation),
        ),
        None => (String::new(), String::new(), String::new()),
    };
    format!(
        "{},{},{},{},{},{},{}",
        v.relation,
        v.status,
        v.grid_size,
        csv_num(v.tolerance),
        loc,
        quantity,
        violation
    )
}

fn order(reg: &Registry, a: OrderArgs) -> CmdResult {
    if a.grid < 2 {
        return Err(Failure::Usage("--grid must be at least 2".into()));
    }
    let name = a.name.to_ascii_lowercase();
    if name == "implications" {
        let report = implication_suite(&need_model(reg, &a.x, "x")?, &need_model(reg, &a.y, "y")?)?;
        println!("{VERDICT_HEADER}");
        for i in &report.implications {
            println!("{}", verdict_row(&i.antecedent));
            for (_, v) in &i.consequents {
                println!("{}", verdict_row(v));
            }
        }
        for (_, tight, loose) in &report.equivalence {
            println!("{}", verdict_row(tight));
            println!("{}", verdict_row(loose));
        }
        let violations = report.violations();
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Ok(violations.is_empty());
    }
    let verdict = if let Ok(check) = reg.class(&name) {
        let x = match a.model.model(reg)? {
            Some(m) => m,
            None => need_model(reg, &a.x, "family")?,
        };
        check.check(&x, a.grid, a.tol)?
    } else {
        let checker = reg.order(&name)?;
        checker.check(
            &need_model(reg, &a.x, "x")?,
            &need_model(reg, &a.y, "y")?,
            a.grid,
            a.tol,
        )?
    };
    println!("{VERDICT_HEADER}");
    println!("{}", verdict_row(&verdict));
    Ok(true)
}

fn risk(reg: &Registry, a: RiskArgs) -> CmdResult {
    let measure = reg.measure(&a.measure)?;
    let x = a
        .model
        .model(reg)?
        .ok_or_else(|| Failure::Usage("risk needs --family".into()))?;
    let levels = if a.p.is_empty() {
        grid_points(a.grid)?
    } else {
        a.p.clone()
    };
    let curve = RiskCurve::evaluate(&x, measure, &levels)?;
    let csv = curve.to_csv();
    match a.out {
        Some(path) => write_atomic(&path, &csv)?,
        None => io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(true)
}

fn golden() -> CmdResult {
    let g = golden_fixed_point()?;
    println!("quantity,value");
    println!("alpha,{}", csv_num(g.alpha));
    println!("printed_value,{}", csv_num(g.printed_value));
    println!("matches_printed,{}", g.matches_printed);
    println!("sup_lorenz_gap,{}", csv_num(g.sup_distance));
    println!("mean_gap,{}", csv_num(g.mean_gap));
    if !g.matches_printed {
        eprintln!(
            "note: the root is (1+sqrt5)/2; the printed value (sqrt5-1)/2 = {} has the opposite sign on the 1",
            csv_num(g.printed_value)
        );
    }
    Ok(true)
}

fn list(reg: &Registry) -> CmdResult {
    println!("families: {}", reg.families.names().join(" "));
    println!("identities: {}", reg.verifier_ids().join(" "));
    println!("orders: st hr rh lr star ps rps implications");
    println!("classes: {}", reg.class_names().join(" "));
    println!("risk measures: {}", reg.measure_names().join(" "));
    println!("figures: 1 2a 2b 3 all");
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let reg = Registry::standard();
    let result = match cli.command {
        Command::Density(a) => density(&reg, a),
        Command::Figure(a) => figure(a),
        Command::Verify(a) => verify(&reg, a),
        Command::Order(a) => order(&reg, a),
        Command::Risk(a) => risk(&reg, a),
        Command::Golden => golden(),
        Command::List => list(&reg),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
