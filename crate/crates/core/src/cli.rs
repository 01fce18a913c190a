//! Command-line front end. Each subcommand writes a CSV table (to `--out` or
//! stdout) and a JSON run record (to `<out>.json` or stderr).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::acceptance::{self, Fixture};
use crate::asymptotic::{self, AsymptoticOptions, BosonDenominator, ScalingParams};
use crate::calibration::{self, Calibration, DiskCalibration, PhaseCell};
use crate::error::{Error, Result};
use crate::exactrep::{self, ExactRepParams, FieldKind, QuadSpec, TheoremOneInstance};
use crate::gue::{self, SpectralParams};
use crate::hciz::{self, DiskGrid, HcizInput, HeatKernelInput, PseudoSignature};
use crate::kahler::{self, CosetSpace, DhGrid};
use crate::linalg::C64;
use crate::rng::RngStream;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const CHECK_MAP: &str = "\
Subcommand to check:
  sample-gue     GUE density exp(-N/2 Tr H^2): eigenvalue histogram vs the semicircle
  correlator     characteristic-polynomial correlator by Monte Carlo, by the exact
                 eigenvalue-integral representation, or by the large-N formula
  hciz           Itzykson-Zuber integral over U(N) or U(n1,n2): determinant kernel,
                 Weyl-group sum, Haar Monte Carlo, or rank-1 disk quadrature
  dh-check       Duistermaat-Heckman localization on CP1 and the unit disk
  kernel-check   diffusion kernel on the Cartan subalgebra of U(n1,n2)
  theorem1       vector-to-Gram-matrix change of variables, real and complex
  acceptance     every acceptance criterion with its margin
  calibrate      regenerate calibration.toml (phase cells, disk measure factor)

Complex numbers are written as 1.5, 2i, 0.3+1i or 0.3-1i; lists are comma separated.";

#[derive(Debug, Parser)]
#[command(name = "rmtlab", version, about = "Random-matrix and group-integral numerical checks", after_help = CHECK_MAP)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// RNG seed for every Monte Carlo path.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Quadrature grid as RADIALxANGULAR (e.g. 400x256), or a single count.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Relative tolerance of the exact-representation quadrature.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// CSV output path; the JSON record goes next to it with a .json extension.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with defaults for the flags above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

/// Flag defaults read from `--config`.
#[derive(Debug, Clone, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub samples: Option<usize>,
    pub grid: Option<(usize, usize)>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 20261016;

impl Settings {
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let cfg = match &args.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidInput(format!("cannot read {}: {e}", p.display()))
                })?;
                toml::from_str::<ConfigFile>(&text)
                    .map_err(|e| Error::InvalidInput(format!("config {}: {e}", p.display())))?
            }
            None => ConfigFile::default(),
        };
        let grid = args
            .grid
            .clone()
            .or(cfg.grid)
            .map(|g| parse_grid(&g))
            .transpose()?;
        Ok(Self {
            seed: args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
            samples: args.samples.or(cfg.samples),
            grid,
            tol: args.tol.or(cfg.tol),
            out: args.out.clone().or(cfg.out),
            threads: args.threads.or(cfg.threads),
        })
    }
}

pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || {
        Error::InvalidInput(format!(
            "grid `{s}` is not RADIALxANGULAR or a positive count"
        ))
    };
    let (a, b) = match s.split_once(['x', 'X']) {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let n: usize = s.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let t = s.trim().replace(' ', "");
    C64::from_str(&t).map_err(|_| format!("`{s}` is not a complex number (try 0.3+1i)"))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GUE eigenvalue histogram against the semicircle.
    SampleGue {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
    },
    /// Characteristic-polynomial correlator.
    Correlator(CorrelatorArgs),
    /// Itzykson-Zuber integral.
    Hciz(HcizArgs),
    /// Duistermaat-Heckman: numeric integral, fixed-point sum and closed form.
    DhCheck {
        #[arg(long, value_enum, default_value_t = SpaceArg::Cp1)]
        space: SpaceArg,
        /// Values of t.
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, default_value = "0.5,1,2,5")]
        t: Vec<C64>,
    },
    /// Diffusion kernel value, heat-equation residual and block antisymmetry.
    KernelCheck {
        #[arg(long, default_value_t = 2)]
        n1: usize,
        #[arg(long, default_value_t = 1)]
        n2: usize,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0.8,-0.9,0.2"
        )]
        alpha: Vec<f64>,
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            default_value = "0.9,-0.7,0.1"
        )]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 0.8)]
        t: f64,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Gram-matrix change of variables on a Gaussian test function, plus Wishart moments.
    Theorem1 {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, value_enum, default_value_t = FieldArg::Complex)]
        field: FieldArg,
    },
    /// Run the acceptance criteria.
    Acceptance {
        /// Criterion ids to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Regenerate calibration.toml from Monte Carlo and the disk quadrature.
    Calibrate {
        /// Matrix sizes whose parity cells are calibrated.
        #[arg(long, value_delimiter = ',', default_value = "6,7")]
        sizes: Vec<usize>,
        /// Largest n_F calibrated (n_B = 1).
        #[arg(long, default_value_t = 2)]
        max_nf: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Mc,
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Group {
    Unitary,
    Pseudo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Det,
    Weyl,
    Mc,
    Quad,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Cp1,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DenominatorArg {
    Printed,
    AllPairs,
}

#[derive(Debug, Args)]
pub struct CorrelatorArgs {
    #[arg(long, value_enum, default_value_t = Mode::Mc)]
    pub mode: Mode,
    /// Matrix size (for asymptotic mode: the N used in the prefactor).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Bosonic points in the upper half-plane.
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub mu_1b: Vec<C64>,
    /// Bosonic points in the lower half-plane.
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub mu_2b: Vec<C64>,
    /// Fermionic points (an even number).
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub mu_f: Vec<C64>,
    /// Read the fermionic points as rotated arguments (numerator at -i mu_F).
    #[arg(long)]
    pub rotated: bool,
    /// Bulk point for asymptotic mode.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega_1b: Vec<C64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega_2b: Vec<C64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega_f: Vec<C64>,
    #[arg(long, value_enum, default_value_t = DenominatorArg::Printed)]
    pub denominator: DenominatorArg,
}

#[derive(Debug, Args)]
pub struct HcizArgs {
    #[arg(long, value_enum, default_value_t = Group::Unitary)]
    pub group: Group,
    #[arg(long, value_enum, default_value_t = Method::Det)]
    pub method: Method,
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, required = true)]
    pub x: Vec<C64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true, required = true)]
    pub y: Vec<C64>,
    /// Size of the first block for --group pseudo (default: half, rounded up).
    #[arg(long)]
    pub n1: Option<usize>,
}

/// Output of one run: CSV header and rows plus a JSON payload.
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub record: serde_json::Value,
    /// False when a numeric check failed (exit code 1).
    pub ok: bool,
}

impl Report {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
            record: json!({}),
            ok: true,
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }
}

fn f(v: f64) -> String {
    format!("{v:.17e}")
}

fn cx(z: C64) -> [String; 2] {
    [f(z.re), f(z.im)]
}

pub fn execute(cli: &Cli) -> Result<(Report, Settings)> {
    let st = Settings::resolve(&cli.common)?;
    let report = match &cli.command {
        Command::SampleGue { n, bins } => sample_gue(&st, *n, *bins)?,
        Command::Correlator(a) => correlator(&st, a)?,
        Command::Hciz(a) => hciz_cmd(&st, a)?,
        Command::DhCheck { space, t } => dh_check(&st, *space, t)?,
        Command::KernelCheck {
            n1,
            n2,
            alpha,
            beta,
            t,
            step,
        } => kernel_check(*n1, *n2, alpha, beta, *t, *step)?,
        Command::Theorem1 { n, m, field } => theorem1(&st, *n, *m, *field)?,
        Command::Acceptance { only } => acceptance_cmd(only)?,
        Command::Calibrate { sizes, max_nf } => calibrate(&st, sizes, *max_nf)?,
    };
    Ok((report, st))
}

fn sample_gue(st: &Settings, n: usize, bins: usize) -> Result<Report> {
    let samples = st.samples.unwrap_or(1000);
    let h = gue::spectral_histogram(n, samples, bins, &RngStream::new(st.seed, 0))?;
    let mut r = Report::new(&["center", "density", "semicircle_bin_average"]);
    let w = h.width();
    for (k, d) in h.density.iter().enumerate() {
        let (a, b) = (h.lo + k as f64 * w, h.lo + (k + 1) as f64 * w);
        let avg = (gue::semicircle_cdf(b) - gue::semicircle_cdf(a)) / w;
        r.push(vec![f(h.center(k)), f(*d), f(avg)]);
    }
    r.record = json!({
        "n": n, "samples": samples, "bins": bins,
        "in_range": h.in_range, "out_of_range": h.out_of_range,
        "sup_distance_inner": h.semicircle_distance(-1.5, 1.5),
    });
    Ok(r)
}

fn correlator(st: &Settings, a: &CorrelatorArgs) -> Result<Report> {
    let mut r = Report::new(&["mode", "n", "re", "im", "err_re", "err_im"]);
    match a.mode {
        Mode::Mc | Mode::Exact => {
            let sp =
                SpectralParams::new(a.mu_1b.clone(), a.mu_2b.clone(), a.mu_f.clone(), a.rotated)?;
            if sp.min_bosonic_damping() < 0.1 {
                eprintln!(
                    "warning: |Im mu_B| = {:.3} < 0.1; ratio estimates can be heavy-tailed here",
                    sp.min_bosonic_damping()
                );
            }
            if a.mode == Mode::Mc {
                let samples = st.samples.unwrap_or(100_000);
                let e = gue::correlator_mc(&sp, a.n, samples, &RngStream::new(st.seed, 0))?;
                let [re, im] = cx(e.mean);
                r.push(vec![
                    "mc".into(),
                    a.n.to_string(),
                    re,
                    im,
                    f(e.stderr_real),
                    f(e.stderr_imag),
                ]);
                r.record = json!({ "params": sp, "estimate": e });
            } else {
                let mut p = ExactRepParams::new(a.n, sp)?;
                p.quadrature = QuadSpec {
                    tol: st.tol.unwrap_or(p.quadrature.tol),
                    ..p.quadrature
                };
                let e = exactrep::correlator_exact(&p)?;
                let [re, im] = cx(e.value);
                r.push(vec![
                    "exact".into(),
                    a.n.to_string(),
                    re,
                    im,
                    f(e.error_estimate),
                    f(e.error_estimate),
                ]);
                r.ok = e.converged;
                r.record = json!({ "params": p, "result": e });
            }
        }
        Mode::Asymptotic => {
            let p = ScalingParams::new(
                a.mu,
                a.omega_1b.clone(),
                a.omega_2b.clone(),
                a.omega_f.clone(),
            )?;
            let denominator = match a.denominator {
                DenominatorArg::Printed => BosonDenominator::Printed,
                DenominatorArg::AllPairs => BosonDenominator::AllPairs,
            };
            let opts = AsymptoticOptions { denominator };
            let v = asymptotic::asymptotic_correlator(&p, a.n, &opts)?;
            let [re, im] = cx(v);
            r.push(vec![
                "asymptotic".into(),
                a.n.to_string(),
                re,
                im,
                f(0.0),
                f(0.0),
            ]);
            r.record = json!({ "params": p, "options": opts });
        }
    }
    Ok(r)
}

fn hciz_cmd(st: &Settings, a: &HcizArgs) -> Result<Report> {
    let inp = HcizInput::new(a.x.clone(), a.y.clone())?;
    let n = inp.n();
    let mut r = Report::new(&["group", "method", "re", "im", "err_re", "err_im"]);
    let sig = match a.group {
        Group::Unitary => None,
        Group::Pseudo => {
            let n1 = a.n1.unwrap_or(n.div_ceil(2));
            if n1 > n {
                return Err(Error::InvalidInput(format!("n1 = {n1} exceeds N = {n}")));
            }
            Some(PseudoSignature::new(n1, n - n1)?)
        }
    };
    let mut extra = json!({});
    let (value, err) = match (a.method, sig) {
        (Method::Det, None) => (hciz::hciz_compact_det(&inp)?, C64::new(0.0, 0.0)),
        (Method::Det, Some(s)) => {
            let p = hciz::hciz_pseudo_det(&inp, s)?;
            extra = json!({ "converges": p.converges });
            (p.value, C64::new(0.0, 0.0))
        }
        (Method::Weyl, None) => (
            hciz::weyl_sum(&inp, &[n])? * hciz::compact_constant(n),
            C64::new(0.0, 0.0),
        ),
        (Method::Weyl, Some(s)) => {
            let sign = if s.n1 * s.n2 % 2 == 0 { 1.0 } else { -1.0 };
            (
                hciz::weyl_sum(&inp, &s.blocks())? * sign,
                C64::new(0.0, 0.0),
            )
        }
        (Method::Mc, None) => {
            let e = hciz::haar_mc_hciz(
                &inp,
                st.samples.unwrap_or(100_000),
                &RngStream::new(st.seed, 0),
            )?;
            (e.mean, C64::new(e.stderr_real, e.stderr_imag))
        }
        (Method::Mc, Some(_)) => {
            return Err(Error::Unsupported(
                "Haar Monte Carlo exists only for the compact group".into(),
            ));
        }
        (Method::Quad, Some(s)) if s.n1 == 1 && s.n2 == 1 => {
            let grid = st
                .grid
                .map(|(radial, angular)| DiskGrid { radial, angular })
                .unwrap_or_default();
            let q = hciz::disk_quadrature_rank1(&inp, grid)?;
            extra =
                json!({ "grid": grid, "measure_factor": q.measure_factor, "warnings": q.warnings });
            (q.value, C64::new(0.0, 0.0))
        }
        (Method::Quad, _) => {
            return Err(Error::Unsupported(
                "quadrature is implemented for U(1,1) only (--group pseudo, N = 2)".into(),
            ));
        }
    };
    let group = if sig.is_some() { "pseudo" } else { "unitary" };
    let method = format!("{:?}", a.method).to_lowercase();
    let [re, im] = cx(value);
    r.push(vec![group.into(), method, re, im, f(err.re), f(err.im)]);
    r.record = json!({ "input": inp, "signature": sig, "details": extra });
    Ok(r)
}

fn space_of(s: SpaceArg) -> CosetSpace {
    match s {
        SpaceArg::Cp1 => CosetSpace::CompactCp1,
        SpaceArg::Disk => CosetSpace::NoncompactDisk,
    }
}

fn dh_check(st: &Settings, space: SpaceArg, ts: &[C64]) -> Result<Report> {
    let space = space_of(space);
    let grid = st
        .grid
        .map(|(radial, angular)| DhGrid { radial, angular })
        .unwrap_or_default();
    let mut r = Report::new(&[
        "t_re",
        "t_im",
        "numeric_re",
        "numeric_im",
        "fixed_point_re",
        "fixed_point_im",
        "closed_re",
        "closed_im",
    ]);
    let mut worst: f64 = 0.0;
    for &t in ts {
        let a = kahler::dh_integral_numeric(space, t, grid)?;
        let b = kahler::dh_fixed_point_sum(space, t)?;
        let c = kahler::dh_closed_form(space, t);
        worst = worst.max((a - c).norm()).max((b - c).norm());
        let mut row = Vec::new();
        for z in [t, a, b, c] {
            row.extend(cx(z));
        }
        r.push(row);
    }
    r.record = json!({ "space": space.name(), "grid": grid, "max_abs_error": worst });
    Ok(r)
}

fn kernel_check(
    n1: usize,
    n2: usize,
    alpha: &[f64],
    beta: &[f64],
    t: f64,
    step: f64,
) -> Result<Report> {
    let sig = PseudoSignature::new(n1, n2)?;
    let inp = HeatKernelInput {
        alpha: alpha.to_vec(),
        beta: beta.to_vec(),
        t,
    };
    let k = hciz::heat_kernel(&inp, sig)?;
    let res = hciz::heat_residual(&inp, sig, step)?;
    let mut r = Report::new(&["kernel", "residual", "relative_residual", "block_swap_sum"]);
    let swap = if n1 >= 2 {
        let mut a = inp.alpha.clone();
        a.swap(0, 1);
        k + hciz::heat_kernel(
            &HeatKernelInput {
                alpha: a,
                ..inp.clone()
            },
            sig,
        )?
    } else {
        f64::NAN
    };
    r.push(vec![f(k), f(res), f(res / k.abs()), f(swap)]);
    r.record = json!({ "input": inp, "signature": sig, "step": step });
    Ok(r)
}

fn theorem1(st: &Settings, n: usize, m: usize, field: FieldArg) -> Result<Report> {
    let field = match field {
        FieldArg::Real => FieldKind::Real,
        FieldArg::Complex => FieldKind::Complex,
    };
    let inst = TheoremOneInstance::new(n, m, field)?;
    let (lhs, rhs) = exactrep::theorem1_check_gaussian(&inst);
    let samples = st.samples.unwrap_or(100_000);
    let w = exactrep::wishart_mc_check(&inst, samples, &RngStream::new(st.seed, 0))?;
    let mut r = Report::new(&[
        "lhs",
        "rhs",
        "relative_error",
        "trace_mean",
        "trace_stderr",
        "trace_expected",
        "det_mean",
        "det_stderr",
        "det_expected",
    ]);
    r.push(vec![
        f(lhs),
        f(rhs),
        f((lhs - rhs).abs() / lhs.abs()),
        f(w.trace.0),
        f(w.trace.1),
        f(w.trace_expected),
        f(w.det.0),
        f(w.det.1),
        f(w.det_expected),
    ]);
    r.ok = w.all_psd;
    r.record =
        json!({ "instance": inst, "constant": exactrep::theorem1_constant(&inst), "wishart": w });
    Ok(r)
}

fn acceptance_cmd(only: &[usize]) -> Result<Report> {
    let fx = Fixture::default();
    let ids: Vec<usize> = if only.is_empty() {
        (1..=acceptance::CRITERIA).collect()
    } else {
        only.to_vec()
    };
    let mut r = Report::new(&[
        "id", "name", "pass", "worst", "limit", "margin", "seconds", "detail",
    ]);
    let mut rows = Vec::new();
    for id in ids {
        let row = acceptance::run(id, &fx)?;
        eprintln!("{}", row.line());
        r.ok &= row.pass;
        r.push(vec![
            row.id.to_string(),
            format!("\"{}\"", row.name),
            row.pass.to_string(),
            f(row.worst),
            f(row.limit),
            f(row.margin()),
            format!("{:.3}", row.seconds),
            format!("\"{}\"", row.detail.replace('"', "'")),
        ]);
        rows.push(row);
    }
    r.record = json!({ "rows": rows, "passed": rows.iter().filter(|x| x.pass).count(), "total": rows.len() });
    Ok(r)
}

/// Fourth root of unity nearest to `z`.
fn nearest_quarter_turn(z: C64) -> C64 {
    match ((z.arg() / std::f64::consts::FRAC_PI_2).round() as i32).rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

fn calibrate(st: &Settings, sizes: &[usize], max_nf: usize) -> Result<Report> {
    let samples = st.samples.unwrap_or(400_000);
    let mut r = Report::new(&[
        "kind", "n", "n_b", "n_f", "ratio_re", "ratio_im", "stderr", "phase_re", "phase_im",
    ]);
    let mut cells: Vec<PhaseCell> = Vec::new();
    for &n in sizes {
        for n_f in 0..=max_nf {
            let c = exactrep::calibrate_phase(n, 1, n_f, samples, st.seed)?;
            // |ratio| near 1 is the consistency check on the printed modulus.
            let rel_se = c.mc.stderr() / c.exact_unphased.norm();
            if (c.ratio.norm() - 1.0).abs() > 5.0 * rel_se + 1e-3 {
                return Err(Error::NoConvergence(format!(
                    "calibration at N={n}, n_F={n_f}: |ratio| = {:.4} is not 1 within {:.4}",
                    c.ratio.norm(),
                    5.0 * rel_se
                )));
            }
            r.push(vec![
                "phase".into(),
                n.to_string(),
                "1".into(),
                n_f.to_string(),
                f(c.ratio.re),
                f(c.ratio.im),
                f(rel_se),
                f(c.phase.re),
                f(c.phase.im),
            ]);
            if let Some(prev) = cells.iter().find(|p| p.n_parity == n % 2 && p.n_f == n_f) {
                if C64::new(prev.re, prev.im) != nearest_quarter_turn(c.phase) {
                    return Err(Error::NoConvergence(format!("phase for N={n}, n_F={n_f} disagrees with an earlier size of the same parity")));
                }
                continue;
            }
            let phase = nearest_quarter_turn(c.phase);
            cells.push(PhaseCell {
                n_parity: n % 2,
                n_b: 1,
                n_f,
                re: phase.re,
                im: phase.im,
                calibration_n: Some(n),
                ratio_re: Some(c.ratio.re),
                ratio_im: Some(c.ratio.im),
                stderr: Some(rel_se),
            });
        }
    }
    let inp = HcizInput::new(
        vec![C64::new(0.0, 2.0), C64::new(0.0, 0.0)],
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    )?;
    let (raw, _) = hciz::disk_quadrature_raw(&inp, DiskGrid::default())?;
    let closed = hciz::hciz_pseudo_det(&inp, PseudoSignature::new(1, 1)?)?.value;
    let factor = nearest_quarter_turn(closed / raw);
    r.push(vec![
        "disk".into(),
        "2".into(),
        "".into(),
        "".into(),
        f((closed / raw).re),
        f((closed / raw).im),
        f(0.0),
        f(factor.re),
        f(factor.im),
    ]);
    let mut generated_by = format!("rmtlab calibrate --samples {samples} --seed {}", st.seed);
    if sizes != [6, 7] {
        let list: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
        let _ = write!(generated_by, " --sizes {}", list.join(","));
    }
    if max_nf != 2 {
        let _ = write!(generated_by, " --max-nf {max_nf}");
    }
    let cal = Calibration {
        version: calibration::get().version,
        generated_by,
        disk: DiskCalibration {
            factor_re: factor.re,
            factor_im: factor.im,
            input: "x = (2i, 0), y = (1, 0)".into(),
            raw_re: Some(raw.re),
            raw_im: Some(raw.im),
        },
        phase: cells,
    };
    r.record = json!({ "calibration_toml": cal.to_toml() });
    Ok(r)
}

fn json_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Parses arguments, runs the command and writes its outputs. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.common.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        // A second build in the same process fails harmlessly; the first pool stays.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let t0 = Instant::now();
    let (report, st) = match execute(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return match e {
                Error::InvalidInput(_)
                | Error::Domain(_)
                | Error::Unsupported(_)
                | Error::TooLarge(_) => EXIT_USAGE,
                Error::Degenerate(_) | Error::Divergent(_) | Error::NoConvergence(_) => {
                    EXIT_NUMERIC
                }
            };
        }
    };
    let cal = calibration::get();
    let record = json!({
        "command": std::env::args().collect::<Vec<_>>(),
        "settings": st,
        "wall_seconds": t0.elapsed().as_secs_f64(),
        "calibration": { "version": cal.version, "generated_by": cal.generated_by },
        "ok": report.ok,
        "result": report.record,
        "table": { "header": report.header, "rows": report.rows },
    });
    let record_text = serde_json::to_string_pretty(&record).expect("JSON record serialises");
    let written = match &st.out {
        Some(path) => std::fs::write(path, report.csv())
            .and_then(|_| std::fs::write(json_path(path), &record_text)),
        None => {
            print!("{}", report.csv());
            eprintln!("{record_text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_NUMERIC;
    }
    if let (Command::Calibrate { .. }, Some(path)) = (&cli.command, &st.out) {
        if let Some(text) = report
            .record
            .get("calibration_toml")
            .and_then(|v| v.as_str())
        {
            let toml_path = path.with_extension("toml");
            if let Err(e) = std::fs::write(&toml_path, text) {
                eprintln!("error: cannot write {}: {e}", toml_path.display());
                return EXIT_NUMERIC;
            }
            eprintln!("wrote {}", toml_path.display());
        }
    }
    if report.ok {
        EXIT_OK
    } else {
        EXIT_NUMERIC
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("400x256").unwrap(), (400, 256));
        assert_eq!(parse_grid("64").unwrap(), (64, 64));
        assert!(parse_grid("0x3").is_err());
        assert!(parse_grid("ax3").is_err());
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.3+1i").unwrap(), C64::new(0.3, 1.0));
        assert_eq!(parse_complex("-2i").unwrap(), C64::new(0.0, -2.0));
        assert_eq!(parse_complex("1.5").unwrap(), C64::new(1.5, 0.0));
        assert!(parse_complex("one").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(main_with_args(["rmtlab", "no-such-command"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["rmtlab", "hciz", "--x", "1,2", "--y", "1"]),
            EXIT_USAGE
        );
        assert_eq!(
            main_with_args(["rmtlab", "kernel-check", "--n1", "2", "--n2", "1", "--t=-1"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn config_file_supplies_defaults() {
        let dir = std::env::temp_dir().join(format!("rmtlab-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.toml");
        std::fs::write(&p, "seed = 7\nsamples = 500\ngrid = \"40x8\"\n").unwrap();
        let args = CommonArgs {
            config: Some(p.clone()),
            samples: Some(900),
            ..Default::default()
        };
        let st = Settings::resolve(&args).unwrap();
        assert_eq!(
            (st.seed, st.samples, st.grid),
            (7, Some(900), Some((40, 8)))
        );
        std::fs::write(&p, "sede = 7\n").unwrap();
        assert!(Settings::resolve(&args).is_err());
    }

    #[test]
    fn csv_has_header_and_re_im_columns() {
        let cli =
            Cli::try_parse_from(["rmtlab", "hciz", "--x", "0.2,-0.9", "--y", "1.3,0.4"]).unwrap();
        let (rep, _) = execute(&cli).unwrap();
        let csv = rep.csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "group,method,re,im,err_re,err_im");
        assert!(lines.next().unwrap().starts_with("unitary,det,"));
    }

    #[test]
    fn help_lists_every_subcommand() {
        for name in [
            "sample-gue",
            "correlator",
            "hciz",
            "dh-check",
            "kernel-check",
            "theorem1",
            "acceptance",
            "calibrate",
        ] {
            assert!(CHECK_MAP.contains(name), "{name}");
        }
    }
}
