mod file;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use spherule::cohomology::{reduce_to_nbc, reduce_to_nbc_at, standard_form, CohomClass, LambdaPoint};
use spherule::connection::{gm_matrix, theta, wronskian_trace, ParamOneForm};
use spherule::contiguity::{gamma_tilde, mult_fj};
use spherule::indices::{admissible_sets, basis, dimension};
use spherule::suites::{run_suite, Suite};
use spherule::verify::{chambers_1d, integrate, Integrand};
use spherule::{Arrangement, IndexSet, Scalar, Sym};

use file::{parse_rational, ArrangementFile};

#[derive(Parser)]
#[command(name = "spherule", version, about = "Exact twisted-cohomology computations for hypersphere arrangements")]
struct Cli {
    /// Arrangement file (TOML).
    #[arg(short, long, global = true)]
    file: Option<PathBuf>,
    /// Also write `key,entry,value` rows to this CSV file.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Pos,
    Neg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Exact,
    Quadrature,
    GaussManin,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Squared radii, squared center distances and the general-position hypotheses.
    Check,
    /// A signed Cayley–Menger minor; `0` and `*` are the two extra symbols.
    Minor {
        #[arg(long, value_delimiter = ',')]
        rows: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        cols: Vec<String>,
    },
    /// Admissible index sets, or with `--nbc` the cohomology basis.
    Basis {
        #[arg(long)]
        nbc: bool,
    },
    /// Coefficients of `W₀(J)ϖ` in `(2λ_∞ + n)ϖ`.
    StandardForm {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// `F_J` rewritten on the basis (`--lambda` is needed only for the empty set).
    Reduce {
        #[arg(long)]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
    },
    /// The invariant 1-form `θ_J`.
    Theta {
        #[arg(long)]
        set: String,
    },
    /// Multiplication by `f_j` (`pos`) or `(λ_j − 1) f_j^{-1}` (`neg`) applied to `F_J`.
    Contiguity {
        #[arg(long, value_enum)]
        dir: Direction,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// The connection matrix, or one entry / column of it.
    Gm {
        #[arg(long = "K")]
        k: Option<String>,
        #[arg(long = "J")]
        j: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Trace of the connection against `d log W` for two spheres.
    Wronskian {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Bounded chambers of a one-dimensional arrangement.
    Chambers,
    /// Chamber integrals of `Π|f_j|^{λ_j} F_J` (one-dimensional arrangements).
    Integrate {
        #[arg(long)]
        set: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Prints the arrangement file in canonical form.
    Format {
        /// Rewrite every sphere as raw coefficients.
        #[arg(long)]
        alpha: bool,
    },
    /// Seeded verification suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
}

struct Row {
    key: String,
    entry: String,
    value: String,
}

#[derive(Default)]
struct Table {
    rows: Vec<Row>,
    /// Set when an identity check failed.
    failed: bool,
    /// Printed verbatim instead of the table (used by `format`).
    raw: Option<String>,
}

impl Table {
    fn push(&mut self, key: impl ToString, entry: impl ToString, value: impl ToString) {
        self.rows.push(Row { key: key.to_string(), entry: entry.to_string(), value: value.to_string() });
    }

    fn push_form(&mut self, key: impl ToString, form: &ParamOneForm) {
        let key = key.to_string();
        if form.is_zero() {
            self.push(&key, "", "0");
        }
        for (d, c) in form.terms() {
            self.push(&key, d, c);
        }
    }

    fn push_class(&mut self, cls: &CohomClass, entry: &str) {
        if cls.is_zero() {
            self.push("{}", entry, "0");
        }
        for (k, c) in cls.terms() {
            self.push(k, entry, c);
        }
    }

    fn render(&self) -> String {
        if let Some(r) = &self.raw {
            return r.clone();
        }
        let w = |f: fn(&Row) -> &String| self.rows.iter().map(|r| f(r).chars().count()).max().unwrap_or(0);
        let (wk, we) = (w(|r| &r.key).max(3), w(|r| &r.entry).max(5));
        let mut out = format!("{:<wk$}  {:<we$}  value\n", "key", "entry");
        for r in &self.rows {
            out.push_str(format!("{:<wk$}  {:<we$}  {}", r.key, r.entry, r.value).trim_end());
            out.push('\n');
        }
        out
    }

    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(["key", "entry", "value"])?;
        for r in &self.rows {
            w.write_record([&r.key, &r.entry, &r.value])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_set(s: &str) -> Result<IndexSet> {
    let t = s.trim().trim_start_matches('{').trim_end_matches('}');
    if t.trim().is_empty() {
        return Ok(IndexSet::EMPTY);
    }
    let mut out = IndexSet::EMPTY;
    for part in t.split(',') {
        let j: usize = part.trim().parse().map_err(|_| anyhow!("'{}' is not a sphere index", part.trim()))?;
        if j == 0 || j > spherule::indices::MAX_INDEX {
            bail!("sphere index {j} is out of range");
        }
        out = out.with(j);
    }
    Ok(out)
}

fn parse_lambda(s: &str, m: usize) -> Result<LambdaPoint> {
    let v: Vec<Scalar> = s.split(',').map(parse_rational).collect::<Result<_>>()?;
    if v.len() != m {
        bail!("--lambda has {} components, the arrangement has m = {m}", v.len());
    }
    Ok(LambdaPoint::new(v))
}

fn parse_syms(v: &[String]) -> Result<Vec<Sym>> {
    v.iter().map(|s| s.parse::<Sym>().map_err(|e| anyhow!(e))).collect()
}

fn check_spheres(arr: &Arrangement, set: IndexSet) -> Result<()> {
    if let Some(j) = set.max() {
        if j > arr.m() {
            bail!("sphere {j} does not exist (m = {})", arr.m());
        }
    }
    Ok(())
}

fn load(path: &Option<PathBuf>) -> Result<(ArrangementFile, Arrangement)> {
    let path = path.as_ref().ok_or_else(|| anyhow!("this command needs an arrangement file (--file)"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let f = ArrangementFile::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let a = f.to_arrangement()?;
    Ok((f, a))
}

fn execute(cli: &Cli) -> Result<Table> {
    let mut t = Table::default();
    if let Command::Verify { suite, seed, tol } = &cli.command {
        let s = match suite {
            SuiteArg::Exact => Suite::Exact,
            SuiteArg::Quadrature => Suite::Quadrature,
            SuiteArg::GaussManin => Suite::GaussManin,
            SuiteArg::All => Suite::All,
        };
        let rep = run_suite(s, *seed, *tol);
        t.push("seed", "", seed);
        for l in &rep.lines {
            t.push(&l.name, if l.passed { "PASS" } else { "FAIL" }, &l.detail);
        }
        t.failed = !rep.passed();
        return Ok(t);
    }
    let (f, arr) = load(&cli.file)?;
    let (n, m) = (arr.n(), arr.m());
    match &cli.command {
        Command::Verify { .. } => unreachable!(),
        Command::Check => {
            for j in 1..=m {
                t.push(format!("sphere {j}"), "r2", arr.r2(j));
            }
            for j in 1..=m {
                for k in j + 1..=m {
                    t.push(format!("spheres {j},{k}"), "rho2", arr.rho2(j, k));
                }
            }
            let rep = arr.check_hypotheses();
            t.push("H1", "", if rep.h1() { "holds" } else { "fails" });
            for v in &rep.h1_violations {
                t.push("H1", v, "B(0J) vanishes");
            }
            t.push("H2", "", if rep.h2() { "holds" } else { "fails" });
            for v in &rep.h2_violations {
                t.push("H2", v, "B(0*J) vanishes");
            }
        }
        Command::Minor { rows, cols } => {
            let (r, c) = (parse_syms(rows)?, parse_syms(cols)?);
            if let Some(j) = r.iter().chain(&c).find_map(|s| match s {
                Sym::S(j) if *j == 0 || *j > m => Some(*j),
                _ => None,
            }) {
                bail!("sphere {j} does not exist (m = {m})");
            }
            if r.len() != c.len() {
                bail!("a minor needs as many rows as columns");
            }
            let key = format!("{}/{}", rows.join(""), cols.join(""));
            t.push(key, "B", arr.minor(&r, &c));
        }
        Command::Basis { nbc } => {
            let sets = if *nbc { basis(m, n) } else { admissible_sets(m, n) };
            for s in &sets {
                t.push(s, "weight", s.len());
            }
            t.push("dimension", "", dimension(m, n));
        }
        Command::StandardForm { lambda } => {
            let lam = parse_lambda(lambda, m)?;
            t.push_class(&standard_form(&arr, &lam)?, "W0");
        }
        Command::Reduce { set, lambda } => {
            let j = parse_set(set)?;
            check_spheres(&arr, j)?;
            let cls = CohomClass::f(j);
            let r = match lambda {
                Some(l) => reduce_to_nbc_at(&arr, &parse_lambda(l, m)?, &cls)?,
                None => reduce_to_nbc(&arr, &cls)?,
            };
            t.push_class(&r, "F");
        }
        Command::Theta { set } => {
            let j = parse_set(set)?;
            check_spheres(&arr, j)?;
            t.push_form(j, &theta(&arr, j)?);
        }
        Command::Contiguity { dir, j, set, lambda } => {
            let s = parse_set(set)?;
            check_spheres(&arr, s.with(*j))?;
            if *j == 0 {
                bail!("sphere indices start at 1");
            }
            let lam = parse_lambda(lambda, m)?;
            let cls = match dir {
                Direction::Pos => mult_fj(&arr, &lam, *j, s)?,
                Direction::Neg => gamma_tilde(&arr, &lam, *j, s)?,
            };
            t.push_class(&cls, "F");
        }
        Command::Gm { k, j, lambda } => {
            let lam = parse_lambda(lambda, m)?;
            let g = gm_matrix(&arr, &lam)?;
            let pick = |s: &Option<String>| -> Result<Vec<IndexSet>> {
                match s {
                    None => Ok(g.basis.clone()),
                    Some(s) => {
                        let set = parse_set(s)?;
                        if !g.basis.contains(&set) {
                            bail!("{set} is not a basis element");
                        }
                        Ok(vec![set])
                    }
                }
            };
            let (rows, cols) = (pick(k)?, pick(j)?);
            for &c in &cols {
                for &r in &rows {
                    t.push_form(format!("K={r} J={c}"), &g.get(r, c));
                }
            }
        }
        Command::Wronskian { lambda } => {
            let lam = parse_lambda(lambda, m)?;
            let (trace, closed) = wronskian_trace(&arr, &lam)?;
            t.push_form("trace", &trace);
            t.push_form("dlogW", &closed);
            let same = trace == closed;
            t.push("agree", "", same);
            t.failed = !same;
        }
        Command::Chambers => {
            for (i, c) in chambers_1d(&arr)?.iter().enumerate() {
                for (side, e) in [("left", c.left), ("right", c.right)] {
                    let which = if e.upper { "upper" } else { "lower" };
                    t.push(i + 1, side, format!("{} (sphere {}, {which} root)", e.x, e.sphere));
                }
            }
        }
        Command::Integrate { set, lambda } => {
            let s = parse_set(set)?;
            check_spheres(&arr, s)?;
            let lam = parse_lambda(lambda, m)?.to_f64();
            let phi = Integrand::f(m, s);
            for (i, c) in chambers_1d(&arr)?.iter().enumerate() {
                let r = integrate(&arr, &lam, &phi, c)?;
                t.push(i + 1, "value", r.value);
                t.push(i + 1, "error", format!("{:.1e}", r.error_estimate));
            }
        }
        Command::Format { alpha } => {
            let out = if *alpha { ArrangementFile::from_arrangement(&arr) } else { f };
            t.raw = Some(out.to_toml());
        }
    }
    Ok(t)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SPHERULE_THREADS") {
        let k: usize = v.trim().parse().map_err(|_| anyhow!("SPHERULE_THREADS must be a positive integer"))?;
        if k == 0 {
            bail!("SPHERULE_THREADS must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| {
        let t = execute(&cli)?;
        if let Some(p) = &cli.csv {
            t.write_csv(p)?;
        }
        Ok(t)
    });
    match result {
        Ok(t) => {
            print!("{}", t.render());
            if t.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<spherule::Error>() {
                Some(spherule::Error::IdentityFailed(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
