//! Command-line front end. Every subcommand is a thin composition of library
//! calls; [`run`] returns the process exit code.
//!
//! Exit codes: `0` success, `1` I/O, parse or validation failure (including
//! a report with failed checks), `2` when the requested symmetry does not
//! exist or the input is not a member of the required family.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::codec::{self, MatrixFile};
use crate::decompose::intertwine_check;
use crate::error::{Error, Result};
use crate::families::{canonical_delta, canonical_gamma, construct_delta, construct_gamma, DeltaParam, GammaParam};
use crate::idempotent::{kernel_dims, kernel_dims_direct, random_idempotent, Idempotent};
use crate::linalg::{ComplexMatrix, ToleranceConfig};
use crate::report::{decomposition_report, identity_suite, intertwine_report, membership_report, Instance, Report};
use crate::symmetry::Symmetry;

#[derive(Debug, Parser)]
#[command(name = "idemsym", version, about = "Symmetries intertwining an idempotent with its complement")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Relative singular-value threshold for numerical rank.
    #[arg(long = "tol-rank", global = true, default_value_t = 1e-10)]
    pub tol_rank: f64,
    /// Bound on normalized residuals.
    #[arg(long = "tol-residual", global = true, default_value_t = 1e-8)]
    pub tol_residual: f64,
    /// Smallest eigenvalue accepted as positive semidefinite (must be <= 0).
    #[arg(long = "tol-psd", global = true, default_value_t = -1e-10, allow_hyphen_values = true)]
    pub tol_psd: f64,
    /// Print reports as JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random idempotent.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long = "norm-cap", default_value_t = 10.0)]
        norm_cap: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run the identity suite on an idempotent.
    Verify {
        #[arg(short = 'i', long)]
        input: PathBuf,
    },
    /// Build a symmetry J with JPJ = I - P.
    Gamma(Construct),
    /// Build a symmetry J with JPJ = I - P*.
    Delta(Construct),
    /// Report the memberships of J.
    Check {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'j', long)]
        symmetry: PathBuf,
    },
    /// Factor J and write the factors to a directory.
    Decompose {
        #[arg(short = 'i', long)]
        input: PathBuf,
        #[arg(short = 'j', long)]
        symmetry: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// Test whether U carries P onto Q in three equivalent ways.
    Intertwine {
        #[arg(short = 'u', long)]
        unitary: PathBuf,
        #[arg(short = 'p', long)]
        p: PathBuf,
        #[arg(short = 'q', long)]
        q: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Construct {
    #[arg(short = 'i', long)]
    pub input: PathBuf,
    /// Parameter U in block coordinates; the canonical element when omitted.
    #[arg(short = 'u', long)]
    pub param: Option<PathBuf>,
    /// Where to write J; only the report is printed when omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotExists { .. } | Error::NotMember(_) => 2,
        _ => 1,
    }
}

struct Ctx<'a> {
    tol: ToleranceConfig,
    json: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, report: &Report) -> Result<()> {
        let text = if self.json { report.to_json() + "\n" } else { report.to_table() };
        self.out.write_all(text.as_bytes()).map_err(|e| Error::Io {
            path: "<stdout>".into(),
            message: e.to_string(),
        })
    }

    fn load_idempotent(&self, path: &Path) -> Result<(Idempotent, Instance)> {
        let file = codec::read(path)?;
        let p = Idempotent::new(file.matrix, &self.tol)?;
        let instance = Instance {
            name: file.name,
            seed: file.seed,
            norm_cap: file.norm_cap,
            ..Instance::of(&p)
        };
        Ok((p, instance))
    }

    fn load_matrix(&self, path: &Path) -> Result<ComplexMatrix> {
        Ok(codec::read(path)?.matrix)
    }
}

fn verdict(report: &Report) -> i32 {
    if report.pass {
        0
    } else {
        1
    }
}

/// Parses `args` (including the program name) and executes the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let tol = match ToleranceConfig::new(cli.global.tol_rank, cli.global.tol_residual, cli.global.tol_psd) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let mut ctx = Ctx {
        tol,
        json: cli.global.json,
        out,
    };
    match dispatch(&mut ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(ctx: &mut Ctx<'_>, command: Command) -> Result<i32> {
    match command {
        Command::Gen {
            n,
            r,
            norm_cap,
            seed,
            output,
        } => {
            let p = random_idempotent(n, r, norm_cap, seed)?;
            let mut file = MatrixFile::named(format!("P n={n} r={r}"), p.into_matrix());
            file.seed = Some(seed);
            file.norm_cap = Some(norm_cap);
            match output {
                Some(path) => codec::write(&path, &file)?,
                None => {
                    let text = codec::to_string(&file)? + "\n";
                    ctx.out.write_all(text.as_bytes()).map_err(|e| Error::Io {
                        path: "<stdout>".into(),
                        message: e.to_string(),
                    })?;
                }
            }
            Ok(0)
        }
        Command::Verify { input } => {
            let (p, instance) = ctx.load_idempotent(&input)?;
            let report = identity_suite(&p, instance);
            ctx.emit(&report)?;
            Ok(verdict(&report))
        }
        Command::Gamma(c) => construct(ctx, c, Family::Gamma),
        Command::Delta(c) => construct(ctx, c, Family::Delta),
        Command::Check { input, symmetry } => {
            let (p, instance) = ctx.load_idempotent(&input)?;
            let j = ctx.load_matrix(&symmetry)?;
            let report = membership_report(&p, &j, instance);
            ctx.emit(&report)?;
            Ok(verdict(&report))
        }
        Command::Decompose {
            input,
            symmetry,
            output,
        } => {
            let (p, instance) = ctx.load_idempotent(&input)?;
            let j = ctx.load_matrix(&symmetry)?;
            let result = decomposition_report(&p, &j, instance)?;
            std::fs::create_dir_all(&output).map_err(|e| Error::Io {
                path: output.display().to_string(),
                message: e.to_string(),
            })?;
            for (name, m) in [
                ("J1", &result.j1),
                ("J2", &result.j2),
                ("gamma_image", &result.gamma_image),
                ("delta", &result.delta),
            ] {
                codec::write(&output.join(format!("{name}.json")), &MatrixFile::named(name, m.clone()))?;
            }
            ctx.emit(&result.report)?;
            Ok(verdict(&result.report))
        }
        Command::Intertwine { unitary, p, q } => {
            let u = ctx.load_matrix(&unitary)?;
            let (p, instance) = ctx.load_idempotent(&p)?;
            let (q, _) = ctx.load_idempotent(&q)?;
            let r = intertwine_check(&u, &p, &q, &ctx.tol)?;
            let report = intertwine_report(&r, instance);
            ctx.emit(&report)?;
            Ok(verdict(&report))
        }
    }
}

#[derive(Clone, Copy)]
enum Family {
    Gamma,
    Delta,
}

fn construct(ctx: &mut Ctx<'_>, c: Construct, family: Family) -> Result<i32> {
    let (p, instance) = ctx.load_idempotent(&c.input)?;
    let param = c.param.as_deref().map(|path| ctx.load_matrix(path)).transpose()?;
    let built: Result<Symmetry> = match (family, param) {
        (Family::Gamma, None) => canonical_gamma(&p),
        (Family::Gamma, Some(u)) => construct_gamma(&p, &GammaParam { u }),
        (Family::Delta, None) => canonical_delta(&p),
        (Family::Delta, Some(u)) => construct_delta(&p, &DeltaParam { u }),
    };
    match built {
        Ok(j) => {
            let name = match family {
                Family::Gamma => "J gamma",
                Family::Delta => "J delta",
            };
            if let Some(path) = &c.output {
                codec::write(path, &MatrixFile::named(name, j.matrix().clone()))?;
            }
            let report = membership_report(&p, j.matrix(), instance);
            ctx.emit(&report)?;
            Ok(verdict(&report))
        }
        Err(e @ Error::NotExists { .. }) => {
            let mut report = Report::new(instance);
            if let Ok(d) = kernel_dims(&p).or_else(|_| kernel_dims_direct(&p)) {
                report.note("kernel_dims", d);
            }
            report.note("error", e.to_string());
            report.record("exists", "dim N(P+P*) = dim N(2I-P-P*)", f64::INFINITY, false);
            ctx.emit(&report)?;
            Err(e)
        }
        Err(e) => Err(e),
    }
}
