mod config;

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clarkrif::clark::{verify_clark_identity, Alpha, ClarkMeasureModel, DEFAULT_GRID_N as CLARK_DEFAULT};
use clarkrif::compare::{compare, Answer, CompareOptions};
use clarkrif::groebner::{buchberger, MonomialOrder};
use clarkrif::polyalg::{parse_coeff, parse_poly, Axis, Coeff, ExactPoly, Exp};
use clarkrif::spaces::{h2_classify, HbOptions, MembershipClass, RationalFunction, DEFAULT_ORTHO_TOL};
use clarkrif::{Error, RationalInnerFunction, Result};
use config::{Config, GlobalArgs, Output, CLARK_GRID_N, DEFAULT_IDENTITY_TOL, FOURIER_GRID_N};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Clark measures of rational inner functions on the bidisc.
///
/// Exit status: 0 on success or Yes, 2 on No, 3 on Unknown or
/// Inconclusive, 1 on error.
#[derive(Parser, Debug)]
#[command(name = "clarkrif", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct AlphaArgs {
    /// Unimodular exact constant, e.g. `-1`, `i`, `3/5 + 4/5*i`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Float constant `e^{iθ}`.
    #[arg(long, allow_negative_numbers = true)]
    alpha_theta: Option<f64>,
}

impl AlphaArgs {
    fn resolve(&self) -> Result<Alpha> {
        match (&self.alpha, self.alpha_theta) {
            (Some(s), _) => Alpha::exact(parse_coeff(s)?),
            (None, Some(t)) => Ok(Alpha::from_angle(t)),
            (None, None) => Err(Error::InvalidArgument("missing --alpha".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the reflection `p̃` of `p` at bidegree `--deg`.
    Reflect {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_parser = parse_deg)]
        deg: Exp,
    },
    /// Validate `p̃/p` as a rational inner function.
    RifCheck {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_parser = parse_deg)]
        deg: Exp,
    },
    /// Build the Clark measure model of `p̃/p` at `α`.
    Clark {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_parser = parse_deg)]
        deg: Exp,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Write curve samples as CSV to this path.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
    /// Check the Poisson identity of the Clark model at seeded interior points.
    PoissonVerify {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(long, value_parser = parse_deg)]
        deg: Exp,
        #[command(flatten)]
        alpha: AlphaArgs,
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Classify `q/p ∈ H²(𝔻²)`; pass `q / p` with a standalone slash.
    H2 {
        #[arg(allow_hyphen_values = true)]
        q: String,
        #[arg(value_parser = ["/"])]
        slash: String,
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(long, default_value_t = clarkrif::spaces::DEFAULT_MAX_LEVEL)]
        max_level: usize,
    },
    /// Reduced Gröbner basis of `g1;g2;…`.
    Groebner {
        #[arg(allow_hyphen_values = true)]
        gens: String,
        #[arg(long, default_value = "grevlex:z1,z2")]
        order: String,
    },
    /// Normal form of `q` modulo the ideal generated by `--basis g1;g2;…`.
    Nf {
        #[arg(allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        basis: String,
        #[arg(long, default_value = "grevlex:z1,z2")]
        order: String,
    },
    /// Decide `σ¹ ≪ σ²` with `dσ¹/dσ² ∈ L²(σ²)`.
    Compare {
        #[arg(allow_hyphen_values = true)]
        p1: String,
        #[arg(long, value_parser = parse_deg)]
        deg1: Exp,
        #[arg(allow_hyphen_values = true)]
        p2: String,
        #[arg(long, value_parser = parse_deg)]
        deg2: Exp,
        #[command(flatten)]
        alpha: AlphaArgs,
        /// Run the certificate path even when the exact path decides.
        #[arg(long)]
        cross_check: bool,
        /// Kernel point `w1;w2` (repeatable); replaces the default set.
        #[arg(long = "w", allow_hyphen_values = true)]
        w: Vec<String>,
        #[arg(long, default_value = "grevlex:z1,z2")]
        order: String,
    },
}

fn parse_deg(s: &str) -> std::result::Result<Exp, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected d1,d2, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<u32>().map_err(|_| format!("bad degree {x:?}"));
    Ok((p(a)?, p(b)?))
}

enum Outcome {
    Success,
    No,
    Unknown,
}

impl Outcome {
    fn code(&self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::No => 2,
            Outcome::Unknown => 3,
        }
    }
}

fn poly(s: &str) -> Result<ExactPoly> {
    Ok(parse_poly(s)?)
}

fn polys(s: &str) -> Result<Vec<ExactPoly>> {
    s.split(';').filter(|g| !g.trim().is_empty()).map(poly).collect()
}

fn rif(p: &str, d: Exp) -> Result<RationalInnerFunction> {
    RationalInnerFunction::build(poly(p)?, d, clarkrif::rif::DEFAULT_GRID_N)
}

fn point(s: &str) -> Result<(Complex64, Complex64)> {
    let (a, b) = s
        .split_once(';')
        .ok_or_else(|| Error::InvalidArgument(format!("expected w1;w2, got {s:?}")))?;
    let w = (parse_coeff(a)?.to_c64(), parse_coeff(b)?.to_c64());
    if w.0.norm() >= 1.0 || w.1.norm() >= 1.0 {
        return Err(Error::InvalidArgument(format!("w = {s} is not in the open bidisc")));
    }
    Ok(w)
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// A closed stdout (`| head`) ends the command quietly.
fn io_result(r: io::Result<()>) -> Result<()> {
    match r {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::InvalidArgument(e.to_string())),
        _ => Ok(()),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn no_csv(cmd: &str) -> Error {
    Error::InvalidArgument(format!("csv output is not available for {cmd}"))
}

fn seeded_points(seed: u64, n: usize) -> Vec<(Complex64, Complex64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = || Complex64::from_polar(rng.gen_range(0.0..0.7), rng.gen_range(0.0..TAU));
    (0..n).map(|_| (z(), z())).collect()
}

fn run(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    match cli.command {
        Command::Reflect { p, deg } => {
            let cfg = Config::resolve(g, FOURIER_GRID_N)?;
            let q = poly(&p)?;
            let r = q.reflect(deg)?;
            match cfg.output {
                Output::Text => println!("{r}"),
                Output::Json => print_json(&json!({ "p": q.to_string(), "deg": deg, "reflection": r.to_string() })),
                Output::Csv => return Err(no_csv("reflect")),
            }
            Ok(Outcome::Success)
        }
        Command::RifCheck { p, deg } => {
            let cfg = Config::resolve(g, FOURIER_GRID_N)?;
            let q = poly(&p)?;
            let b = RationalInnerFunction::build(q, deg, cfg.grid_n)?;
            let inner = b.verify_inner(cfg.grid_n);
            let sing: Vec<[[f64; 2]; 2]> = b.torus_singularities(cfg.grid_n).iter().map(|z| [c2(z.0), c2(z.1)]).collect();
            match cfg.output {
                Output::Text => {
                    println!("rational inner function: ({}) / ({})", b.ptilde(), b.p());
                    if let Some(m) = b.stability_report().min_root_modulus {
                        println!("smallest slice root modulus: {m:.12}");
                    }
                    println!("max ||b| - 1| on the torus grid: {inner:.3e}");
                    for s in &sing {
                        println!("torus zero of p near ({:.6}{:+.6}i, {:.6}{:+.6}i)", s[0][0], s[0][1], s[1][0], s[1][1]);
                    }
                }
                Output::Json => print_json(&json!({
                    "p": b.p().to_string(),
                    "deg": deg,
                    "reflection": b.ptilde().to_string(),
                    "stability": b.stability_report(),
                    "inner_residual": inner,
                    "torus_singularities": sing,
                })),
                Output::Csv => return Err(no_csv("rif-check")),
            }
            Ok(Outcome::Success)
        }
        Command::Clark { p, deg, alpha, emit_csv } => {
            debug_assert_eq!(CLARK_DEFAULT, CLARK_GRID_N);
            let cfg = Config::resolve(g, CLARK_GRID_N)?;
            let b = rif(&p, deg)?;
            let model = ClarkMeasureModel::build(&b, alpha.resolve()?, cfg.grid_n)?;
            if let Some(path) = emit_csv {
                let f = File::create(&path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                let mut w = BufWriter::new(f);
                model.write_csv(&mut w).and_then(|_| w.flush()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
            match cfg.output {
                Output::Text => {
                    println!("curve branches: {}", model.branches.len());
                    println!("curve mass: {:.12}", model.curve_mass());
                    for l in &model.lines {
                        let var = if l.axis == Axis::First { "z1" } else { "z2" };
                        println!("degenerate line {var} = {}: mass {:.12}", clarkrif::error::fmt_c(&l.anchor), l.mass);
                    }
                    println!("total mass: {:.12} (expected {:.12})", model.total_mass(), model.expected_mass());
                }
                Output::Json => print_json(&model.header_json()),
                Output::Csv => {
                    let out = io::stdout();
                    io_result(model.write_csv(out.lock()))?;
                }
            }
            Ok(Outcome::Success)
        }
        Command::PoissonVerify { p, deg, alpha, points } => {
            let cfg = Config::resolve(g, CLARK_GRID_N)?;
            let b = rif(&p, deg)?;
            let a = alpha.resolve()?;
            let model = ClarkMeasureModel::build(&b, a.clone(), cfg.grid_n)?;
            let pts = seeded_points(cfg.seed, points);
            let tol = cfg.tol("identity", DEFAULT_IDENTITY_TOL);
            let residual = verify_clark_identity(&b, &a, &model, &pts)?;
            let passed = residual <= tol;
            match cfg.output {
                Output::Text => println!("max Poisson residual over {points} points: {residual:.3e} ({})", if passed { "pass" } else { "fail" }),
                Output::Json => print_json(&json!({
                    "residual": residual,
                    "tolerance": tol,
                    "passed": passed,
                    "points": pts.iter().map(|z| [c2(z.0), c2(z.1)]).collect::<Vec<_>>(),
                    "grid_n": cfg.grid_n,
                    "seed": cfg.seed,
                })),
                Output::Csv => {
                    println!("re_z1,im_z1,re_z2,im_z2,model,target,abs_error");
                    for z in &pts {
                        let m = model.poisson(*z);
                        let t = clarkrif::clark::clark_poisson_target(&b, &a, *z)?;
                        println!("{:.16e},{:.16e},{:.16e},{:.16e},{m:.16e},{t:.16e},{:.16e}", z.0.re, z.0.im, z.1.re, z.1.im, (m - t).abs());
                    }
                }
            }
            Ok(if passed { Outcome::Success } else { Outcome::No })
        }
        Command::H2 { q, slash: _, p, max_level } => {
            let cfg = Config::resolve(g, FOURIER_GRID_N)?;
            let f = RationalFunction::from_exact(&poly(&q)?, &poly(&p)?)?;
            let v = h2_classify(&f, max_level);
            match cfg.output {
                Output::Text => {
                    match v.class {
                        MembershipClass::Finite { norm2 } => println!("finite: norm^2 = {norm2:.12}"),
                        MembershipClass::Divergent => println!("divergent"),
                        MembershipClass::Inconclusive => println!("inconclusive"),
                    }
                    for t in &v.trace {
                        println!("  level {:2}  nodes {:6}  partial sum {:.12e}", t.level, t.nodes, t.partial_sum);
                    }
                }
                Output::Json => print_json(&serde_json::to_value(&v).expect("json")),
                Output::Csv => {
                    println!("level,nodes,partial_sum,skipped");
                    for t in &v.trace {
                        println!("{},{},{:.16e},{}", t.level, t.nodes, t.partial_sum, t.skipped);
                    }
                }
            }
            Ok(match v.class {
                MembershipClass::Finite { .. } => Outcome::Success,
                MembershipClass::Divergent => Outcome::No,
                MembershipClass::Inconclusive => Outcome::Unknown,
            })
        }
        Command::Groebner { gens, order } => {
            let cfg = Config::resolve(g, FOURIER_GRID_N)?;
            let basis = buchberger(&polys(&gens)?, order.parse()?)?;
            match cfg.output {
                Output::Text => {
                    for b in basis.generators() {
                        println!("{b}");
                    }
                }
                Output::Json => print_json(&basis.envelope(None)),
                Output::Csv => return Err(no_csv("groebner")),
            }
            Ok(Outcome::Success)
        }
        Command::Nf { q, basis, order } => {
            let cfg = Config::resolve(g, FOURIER_GRID_N)?;
            let basis = buchberger(&polys(&basis)?, order.parse()?)?;
            let r = basis.normal_form(&poly(&q)?);
            match cfg.output {
                Output::Text => println!("{r}"),
                Output::Json => print_json(&basis.envelope(Some(&r))),
                Output::Csv => return Err(no_csv("nf")),
            }
            Ok(Outcome::Success)
        }
        Command::Compare { p1, deg1, p2, deg2, alpha, cross_check, w, order } => {
            let cfg = Config::resolve(g, FOURIER_GRID_N)?;
            cfg.check_fourier()?;
            let b1 = rif(&p1, deg1)?;
            let b2 = rif(&p2, deg2)?;
            let order: MonomialOrder = order.parse()?;
            let mut opts = CompareOptions {
                hb: HbOptions { k: cfg.k, grid_n: cfg.grid_n, ortho_tol: cfg.tol("ortho", DEFAULT_ORTHO_TOL), ..HbOptions::default() },
                order,
                cross_check,
                ..CompareOptions::default()
            };
            if !w.is_empty() {
                opts.w_set = w.iter().map(|s| point(s)).collect::<Result<_>>()?;
            }
            let v = compare(&b1, &b2, &alpha.resolve()?, &opts)?;
            match cfg.output {
                Output::Text => {
                    let ans = match v.answer {
                        Answer::Yes => "yes",
                        Answer::No => "no",
                        Answer::Unknown => "unknown",
                    };
                    println!("answer: {ans}");
                    if let Some(c) = &v.c {
                        println!("c = {c}");
                    }
                    for e in &v.evidence {
                        println!("- {}: {}", e.kind, e.detail);
                    }
                }
                Output::Json => print_json(&v.to_json()),
                Output::Csv => return Err(no_csv("compare")),
            }
            Ok(match v.answer {
                Answer::Yes => Outcome::Success,
                Answer::No => Outcome::No,
                Answer::Unknown => Outcome::Unknown,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => ExitCode::from(o.code()),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(1)
        }
    }
}
