//! Command-line driver: spectrum/scatter/transport sweeps as deterministic
//! CSV (or JSON), bound-state and EP inspection, and the validation suite.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ptwell::boundstates::BoundState;
use ptwell::scattering::scattering_coefficients;
use ptwell::spectrum::{
    default_n_seeds, find_real_roots, trace_spectrum, IMAG_TOL,
};
use ptwell::transport::{bound_flux, TransportProfile};
use ptwell::validate::{self, Level};
use ptwell::WellParams;

#[derive(Parser)]
#[command(name = "ptwell", version, about = "PT-symmetric square well with a central delta potential: spectra, scattering, transport")]
struct Cli {
    /// Optional key=value config file; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads for sweeps (default: PTWELL_JOBS or all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct WellArgs {
    /// Reduced real well depth v0 = 2m V0 / hbar^2.
    #[arg(long, default_value_t = 9.0)]
    v0: f64,
    /// Reduced imaginary potential magnitude v_I.
    #[arg(long, default_value_t = 15.0)]
    vi: f64,
    /// Half-width of the well.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Reduced delta strength Lambda.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
}

impl WellArgs {
    fn params(&self) -> Result<WellParams> {
        Ok(WellParams::new(self.v0, self.vi, self.b, self.lambda)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the bound-state branches over a Lambda range (Fig.-1-style data).
    Spectrum {
        #[command(flatten)]
        well: WellArgs,
        /// Sweep start.
        #[arg(long, default_value_t = 0.0)]
        lambda_start: f64,
        /// Sweep stop.
        #[arg(long, default_value_t = 8.0)]
        lambda_stop: f64,
        /// Continuation step in Lambda.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Root search window (0, k_max].
        #[arg(long, default_value_t = 12.0)]
        k_max: f64,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// EP records CSV path (default: <out>.ep.csv).
        #[arg(long)]
        ep_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Scattering coefficients over a k grid (Fig.-4-style data).
    Scatter {
        #[command(flatten)]
        well: WellArgs,
        #[arg(long, default_value_t = 1e-2)]
        k_start: f64,
        #[arg(long, default_value_t = 10.0)]
        k_stop: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Transport profile of one bound state (Fig.-5-style data).
    Transport {
        #[command(flatten)]
        well: WellArgs,
        /// Pick the n-th bound state (0-based, ascending k).
        #[arg(long, conflicts_with = "k_value")]
        k_index: Option<usize>,
        /// Or give the root k directly.
        #[arg(long)]
        k_value: Option<f64>,
        #[arg(long, default_value_t = 2001)]
        points: usize,
        /// Half-width of the sampling window (default: b + 8/alpha_R).
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// List the bound states at fixed parameters.
    Boundstates {
        #[command(flatten)]
        well: WellArgs,
        #[arg(long, default_value_t = 12.0)]
        k_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Locate exceptional points over a Lambda range.
    Ep {
        #[command(flatten)]
        well: WellArgs,
        #[arg(long, default_value_t = 0.0)]
        lambda_start: f64,
        #[arg(long, default_value_t = 8.0)]
        lambda_stop: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 12.0)]
        k_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the validation suite (quick skips the eigensolver checks).
    Validate {
        #[arg(long, value_enum, default_value_t = ValidateLevel::Quick)]
        level: ValidateLevel,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidateLevel {
    Quick,
    Full,
}

/// 17 significant digits, locale-independent; identical inputs give
/// byte-identical files.
fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

struct Table {
    comment: Option<String>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render_csv(&self) -> String {
        let mut out = String::new();
        if let Some(c) = &self.comment {
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn render_json(&self) -> String {
        let mut out = String::from("{\n");
        if let Some(c) = &self.comment {
            out.push_str(&format!("  \"meta\": \"{}\",\n", c.trim_start_matches("# ")));
        }
        out.push_str("  \"columns\": {\n");
        for (j, name) in self.header.iter().enumerate() {
            let vals: Vec<&str> = self.rows.iter().map(|r| r[j].as_str()).collect();
            let quoted: Vec<String> = vals
                .iter()
                .map(|v| {
                    if v.parse::<f64>().is_ok() && !v.contains("nan") {
                        v.to_string()
                    } else {
                        format!("\"{v}\"")
                    }
                })
                .collect();
            out.push_str(&format!("    \"{name}\": [{}]", quoted.join(", ")));
            out.push_str(if j + 1 < self.header.len() { ",\n" } else { "\n" });
        }
        out.push_str("  }\n}\n");
        out
    }

    fn write(&self, path: &PathBuf, format: Format) -> Result<()> {
        let body = match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        };
        let mut f = fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        f.write_all(body.as_bytes())?;
        Ok(())
    }

    fn print(&self, format: Format) {
        match format {
            Format::Csv => print!("{}", self.render_csv()),
            Format::Json => print!("{}", self.render_json()),
        }
    }
}

fn main() -> Result<()> {
    let argv = merge_config_args(std::env::args().collect())?;
    let cli = Cli::parse_from(argv);
    let jobs = cli
        .jobs
        .or_else(|| std::env::var("PTWELL_JOBS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match cli.command {
        Command::Spectrum {
            well,
            lambda_start,
            lambda_stop,
            step,
            k_max,
            out,
            ep_out,
            format,
        } => cmd_spectrum(&well.params()?, (lambda_start, lambda_stop), step, k_max, &out, ep_out, format),
        Command::Scatter { well, k_start, k_stop, steps, out, format } => {
            cmd_scatter(&well.params()?, k_start, k_stop, steps, &out, format)
        }
        Command::Transport { well, k_index, k_value, points, x_max, out, format } => {
            cmd_transport(&well.params()?, k_index, k_value, points, x_max, &out, format)
        }
        Command::Boundstates { well, k_max, out, format } => {
            cmd_boundstates(&well.params()?, k_max, out, format)
        }
        Command::Ep { well, lambda_start, lambda_stop, step, k_max, out, format } => {
            cmd_ep(&well.params()?, (lambda_start, lambda_stop), step, k_max, out, format)
        }
        Command::Validate { level } => cmd_validate(level),
    }
}

/// Splice `key=value` lines from the config file in front of the user's
/// subcommand flags; later occurrences win, so explicit flags override the
/// file.
fn merge_config_args(argv: Vec<String>) -> Result<Vec<String>> {
    let mut config_path = None;
    let mut i = 0;
    while i < argv.len() {
        if argv[i] == "--config" && i + 1 < argv.len() {
            config_path = Some(argv[i + 1].clone());
            i += 2;
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            config_path = Some(p.to_string());
            i += 1;
        } else {
            i += 1;
        }
    }
    let Some(path) = config_path else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).with_context(|| format!("cannot read config {path}"))?;
    let mut injected = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {} is not key=value: {line}", ln + 1);
        };
        injected.push(format!("--{}", key.trim()));
        injected.push(value.trim().to_string());
    }
    // insert right after the subcommand token (first non-flag argument
    // beyond the binary name that is not the --config value)
    let mut out = Vec::new();
    let mut placed = injected.is_empty();
    let mut skip_value = false;
    let mut it = argv.into_iter();
    out.push(it.next().unwrap_or_default());
    for a in it {
        if skip_value {
            skip_value = false;
            out.push(a);
            continue;
        }
        if a == "--config" {
            skip_value = true;
            out.push(a);
            continue;
        }
        if !placed && !a.starts_with('-') {
            out.push(a);
            out.extend(injected.iter().cloned());
            placed = true;
            continue;
        }
        out.push(a);
    }
    Ok(out)
}

fn cmd_spectrum(
    p: &WellParams,
    range: (f64, f64),
    step: f64,
    k_max: f64,
    out: &PathBuf,
    ep_out: Option<PathBuf>,
    format: Format,
) -> Result<()> {
    let trace = trace_spectrum(p, range, step, k_max)?;
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    let mut rows = Vec::new();
    for br in &trace.branches {
        for &(lambda, k) in &br.samples {
            let e = k * k;
            let j0 = if k.im.abs() <= IMAG_TOL {
                BoundState::new(&p.with_lambda(lambda), k.re)
                    .map(|s| bound_flux(&s, 0.0))
                    .unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            rows.push((
                lambda,
                br.branch_id,
                vec![
                    fmt(lambda),
                    br.branch_id.to_string(),
                    fmt(k.re),
                    fmt(k.im),
                    fmt(e.re),
                    fmt(e.im),
                    fmt(j0),
                ],
            ));
        }
    }
    rows.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
    let table = Table {
        comment: None,
        header: vec!["lambda", "branch_id", "k_re", "k_im", "e_re", "e_im", "j_d_at_0"],
        rows: rows.into_iter().map(|r| r.2).collect(),
    };
    table.write(out, format)?;
    let ep_path = ep_out.unwrap_or_else(|| {
        let mut s = out.clone().into_os_string();
        s.push(".ep.csv");
        PathBuf::from(s)
    });
    let ep_table = Table {
        comment: None,
        header: vec!["lambda_star", "k_star", "kappa_bound", "chi", "residual", "branch_a", "branch_b"],
        rows: trace
            .eps
            .iter()
            .map(|ep| {
                vec![
                    fmt(ep.lambda_star),
                    fmt(ep.k_star),
                    fmt(ep.kappa_bound),
                    fmt(ep.lambda_star * ep.k_star),
                    fmt(ep.residual),
                    ep.branch_pair.0.to_string(),
                    ep.branch_pair.1.to_string(),
                ]
            })
            .collect(),
    };
    ep_table.write(&ep_path, format)?;
    eprintln!(
        "{} branches, {} EPs -> {} / {}",
        trace.branches.len(),
        trace.eps.len(),
        out.display(),
        ep_path.display()
    );
    Ok(())
}

fn cmd_scatter(
    p: &WellParams,
    k_start: f64,
    k_stop: f64,
    steps: usize,
    out: &PathBuf,
    format: Format,
) -> Result<()> {
    if steps < 2 || !(k_stop > k_start) || !(k_start > 0.0) {
        bail!("scatter sweep needs 0 < k_start < k_stop and steps >= 2");
    }
    let ks: Vec<f64> = (0..steps)
        .map(|i| k_start + (k_stop - k_start) * i as f64 / (steps - 1) as f64)
        .collect();
    let mut rows: Vec<(usize, Vec<String>)> = ks
        .par_iter()
        .enumerate()
        .map(|(i, &k)| {
            let row = match scattering_coefficients(p, k) {
                Ok(d) => vec![
                    fmt(k),
                    fmt(d.transmission),
                    fmt(d.r_plus_abs2),
                    fmt(d.r_minus_abs2),
                    fmt((d.r_plus * d.r_minus).norm()),
                    fmt(d.unitarity_residual),
                    d.sign_used.to_string(),
                    u8::from(d.singular).to_string(),
                ],
                Err(_) => vec![
                    fmt(k),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    fmt(f64::NAN),
                    "0".to_string(),
                    "1".to_string(),
                ],
            };
            (i, row)
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    let table = Table {
        comment: None,
        header: vec![
            "k",
            "t",
            "r_plus",
            "r_minus",
            "abs_r_prod",
            "unitarity_residual",
            "sign_used",
            "singular_flag",
        ],
        rows: rows.into_iter().map(|r| r.1).collect(),
    };
    table.write(out, format)?;
    Ok(())
}

fn cmd_transport(
    p: &WellParams,
    k_index: Option<usize>,
    k_value: Option<f64>,
    points: usize,
    x_max: Option<f64>,
    out: &PathBuf,
    format: Format,
) -> Result<()> {
    let k = match (k_index, k_value) {
        (_, Some(k)) => k,
        (idx, None) => {
            let roots = find_real_roots(p, 12.0, default_n_seeds(p, 12.0))?;
            let i = idx.unwrap_or(0);
            *roots.get(i).ok_or_else(|| {
                anyhow::anyhow!("only {} bound states below k = 12, index {i} out of range", roots.len())
            })?
        }
    };
    let s = BoundState::new(p, k)?;
    let span = x_max.unwrap_or(p.b + 8.0 / s.alpha.alpha_r);
    let profile = TransportProfile::compute(&s, -span, span, points)?;
    let mut rows = Vec::with_capacity(points);
    for i in 0..profile.grid.len() {
        rows.push(vec![
            fmt(profile.grid[i]),
            fmt(profile.rho_d[i]),
            fmt(profile.j_d[i]),
            fmt(profile.q_d[i]),
            fmt(profile.rho_e1[i]),
            fmt(profile.rho_e2[i]),
            fmt(profile.j_e[i]),
            fmt(profile.q_e[i]),
        ]);
    }
    let table = Table {
        comment: Some(format!(
            "# delta_point_mass={} c1_sq={} k={}",
            fmt(profile.delta_point_mass),
            fmt(profile.c1_sq),
            fmt(s.k)
        )),
        header: vec!["x", "rho_d", "j_d", "q_d", "rho_e1", "rho_e2_smooth", "j_e", "q_e"],
        rows,
    };
    table.write(out, format)?;
    Ok(())
}

fn cmd_boundstates(p: &WellParams, k_max: f64, out: Option<PathBuf>, format: Format) -> Result<()> {
    let roots = find_real_roots(p, k_max, default_n_seeds(p, k_max))?;
    let mut rows = Vec::new();
    for (i, &k) in roots.iter().enumerate() {
        let s = BoundState::new(p, k)?;
        rows.push(vec![
            i.to_string(),
            fmt(k),
            fmt(s.energy),
            fmt(s.c1_sq),
            fmt(s.alpha.alpha_r),
            fmt(s.alpha.alpha_i),
            fmt(bound_flux(&s, 0.0)),
        ]);
    }
    let table = Table {
        comment: None,
        header: vec!["index", "k", "e", "c1_sq", "alpha_r", "alpha_i", "j_d_at_0"],
        rows,
    };
    match out {
        Some(path) => table.write(&path, format)?,
        None => table.print(format),
    }
    Ok(())
}

fn cmd_ep(
    p: &WellParams,
    range: (f64, f64),
    step: f64,
    k_max: f64,
    out: Option<PathBuf>,
    format: Format,
) -> Result<()> {
    let trace = trace_spectrum(p, range, step, k_max)?;
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    let table = Table {
        comment: None,
        header: vec!["lambda_star", "k_star", "kappa_bound", "chi", "residual", "branch_a", "branch_b"],
        rows: trace
            .eps
            .iter()
            .map(|ep| {
                vec![
                    fmt(ep.lambda_star),
                    fmt(ep.k_star),
                    fmt(ep.kappa_bound),
                    fmt(ep.lambda_star * ep.k_star),
                    fmt(ep.residual),
                    ep.branch_pair.0.to_string(),
                    ep.branch_pair.1.to_string(),
                ]
            })
            .collect(),
    };
    match out {
        Some(path) => table.write(&path, format)?,
        None => table.print(format),
    }
    Ok(())
}

fn cmd_validate(level: ValidateLevel) -> Result<()> {
    let level = match level {
        ValidateLevel::Quick => Level::Quick,
        ValidateLevel::Full => Level::Full,
    };
    let checks = validate::run(level);
    let mut failures = 0;
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        if !c.passed {
            failures += 1;
        }
        println!(
            "{status}  {:<42} residual {:>10.3e}  (tol {:.1e})  {}",
            c.name, c.residual, c.threshold, c.detail
        );
    }
    println!("{} checks, {failures} failures", checks.len());
    if failures > 0 {
        std::process::exit(1);
    }
    Ok(())
}
