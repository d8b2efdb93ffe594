use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symline::corpus;
use symline::problem::ProblemFile;
use symline::report::{corpus_run, run, Options, Report};

#[derive(Parser)]
#[command(name = "symline", version, about = "Linear symmetries of first-order ODEs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone)]
struct Probe {
    #[arg(long, default_value_t = Options::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = Options::default().probes)]
    probes: usize,
    #[arg(long, default_value_t = Options::default().tol)]
    tol: f64,
}

impl Probe {
    fn options(&self) -> Options {
        Options {
            seed: self.seed,
            probes: self.probes,
            tol: self.tol,
            audit: false,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify and solve one problem file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        probe: Probe,
        #[arg(long)]
        json: bool,
    },
    /// Run every `.ode` file in a directory.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        probe: Probe,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write generated problem files.
    Gen {
        /// gts, nonmember, riccati-q0, riccati-fp, riccati-qp or riccati-fq
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn print_report(r: &Report) {
    if let Some(f) = &r.file {
        println!("== {f}");
    }
    println!("ode: {}", r.input);
    if let Some(e) = &r.error {
        println!("  error: {e}");
    }
    for (i, b) in r.branches.iter().enumerate() {
        println!("  branch {}: y' = {}", i + 1, b.phi);
        println!("    outcome: {}", b.outcome.name());
        if let Some(f) = &b.failed {
            println!("    failed: {f}");
        }
        if let Some(s) = &b.symmetry {
            println!("    symmetry: xi = {}, eta = {}", s.xi, s.eta);
        }
        if let Some(s) = &b.solution {
            println!("    solution: {s} = C1");
        }
        let v = &b.verified;
        println!(
            "    verified: determining={} solution={}{}",
            v.determining,
            v.solution,
            if v.probabilistic { " (probabilistic)" } else { "" }
        );
        if let Some(e) = &b.expect {
            if e.ok {
                println!("    expect: ok");
            } else {
                println!("    expect: MISMATCH {}", e.mismatches.join("; "));
            }
        }
    }
    println!("  {} ms", r.ms);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Solve { file, probe, json } => {
            let pf = match std::fs::read_to_string(&file)
                .map_err(|e| e.to_string())
                .and_then(|t| ProblemFile::parse(&t).map_err(|e| e.to_string()))
            {
                Ok(pf) => pf,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(2);
                }
            };
            let r = run(&pf, &probe.options());
            if json {
                println!("{}", serde_json::to_string_pretty(&r).unwrap());
            } else {
                print_report(&r);
            }
            if r.error.is_some() {
                ExitCode::from(2)
            } else if r.expect_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Cmd::Corpus { dir, probe, json, jobs } => {
            if let Some(k) = jobs {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            let c = match corpus_run(&dir, &probe.options()) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&c).unwrap());
            } else {
                for r in &c.reports {
                    print_report(r);
                }
                println!("\n{} files", c.files);
                for row in &c.table {
                    println!("  {:<24} {}", row.tag, row.count);
                }
                for f in &c.expect_failures {
                    println!("  expect mismatch: {f}");
                }
            }
            if c.expect_failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Cmd::Gen { family, count, seed, out } => {
            let Some(items) = corpus::generate(&family, count, seed) else {
                eprintln!("unknown family {family}");
                return ExitCode::from(2);
            };
            if let Err(e) = std::fs::create_dir_all(&out) {
                eprintln!("{}: {e}", out.display());
                return ExitCode::from(2);
            }
            for it in items {
                let path = out.join(format!("{}.ode", it.name));
                if let Err(e) = std::fs::write(&path, it.problem.render()) {
                    eprintln!("{}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            ExitCode::SUCCESS
        }
    }
}
