use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gapstress_core::{
    BlowUpFactorVector, InclusionPairGeometry, LameParams, Outer, a11_leading, effective_moduli, grad_u_asymptotic,
    q_closed_form, q_integral, rigid_count,
};
use gapstress_harness::verify::ALL;
use gapstress_harness::{HarnessError, Result, SweepConfig, run_sweep, verify, write_outputs, write_report};

#[derive(Parser)]
#[command(name = "gapstress", version, about = "Stress concentration between nearly touching rigid inclusions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Model {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    m: u32,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Table of the profile integrals Q and Q-tilde.
    Qtab {
        #[arg(long, default_value_t = 8)]
        max_m: u32,
    },
    /// Leading capacity values for every rigid mode.
    Capacity {
        #[command(flatten)]
        model: Model,
        #[arg(long, value_delimiter = ',', default_value = "0.08,0.04,0.02,0.01")]
        eps_list: Vec<f64>,
    },
    /// Predicted gradient at points of the narrow region.
    Field {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        /// Blow-up factors, one per rigid mode.
        #[arg(long, value_delimiter = ',', required = true)]
        bstar: Vec<f64>,
        /// Point as comma separated coordinates; repeatable.
        #[arg(long = "point", value_delimiter = ',', num_args = 1.., required = true)]
        points: Vec<f64>,
    },
    /// Oracle sweep over an eps ladder.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        eps_list: Option<Vec<f64>>,
    },
    /// Leading effective moduli of a periodic array.
    Moduli {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1.5)]
        l1: f64,
        #[arg(long, default_value_t = 1.0)]
        l2: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, value_delimiter = ',', default_value = "0.04,0.02,0.01,0.005")]
        eps_list: Vec<f64>,
    },
    /// Acceptance suite; exits 1 when any criterion fails.
    Verify {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Subset of criteria, e.g. `1,2,12`.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<usize>>,
    },
    /// Markdown report of a results directory.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

fn model_geometry(m: &Model, eps: f64) -> Result<(LameParams, InclusionPairGeometry)> {
    let p = LameParams::new(m.lambda, m.mu, m.d)?;
    let g = InclusionPairGeometry::model(m.d, m.m, m.kappa, eps, 0.5, Outer::Disk { radius: 3.0 })?;
    Ok((p, g))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Qtab { max_m } => {
            println!("{:>2} {:>3} {:>6} {:>16} {:>16}", "d", "m", "tilde", "quadrature", "closed form");
            for d in 2..=3 {
                for m in 2..=max_m {
                    for tilde in [false, true] {
                        if let (Ok(q), Ok(c)) = (q_integral(d, m, tilde), q_closed_form(d, m, tilde)) {
                            println!("{d:>2} {m:>3} {tilde:>6} {q:>16.12} {c:>16.12}");
                        }
                    }
                }
            }
        }
        Command::Capacity { model, eps_list } => {
            for eps in eps_list {
                let (p, g) = model_geometry(&model, eps)?;
                let values: Vec<String> = (1..=rigid_count(model.d))
                    .map(|a| a11_leading(&p, &g, a).map_or("bounded".into(), |c| format!("{:.6}", c.value())))
                    .collect();
                println!("eps {eps}: {}", values.join(" "));
            }
        }
        Command::Field { model, eps, bstar, points } => {
            let (p, g) = model_geometry(&model, eps)?;
            let b = BlowUpFactorVector::new(model.d, bstar)?;
            if points.len() % model.d != 0 {
                return Err(HarnessError::Config(format!("points need {} coordinates each", model.d)));
            }
            for x in points.chunks(model.d) {
                let grad = grad_u_asymptotic(&p, &g, &b, x)?;
                let rows: Vec<String> = (0..model.d)
                    .map(|r| (0..model.d).map(|c| format!("{:.6e}", grad.get(r, c))).collect::<Vec<_>>().join(" "))
                    .collect();
                println!("{x:?}: [{}]", rows.join("; "));
            }
        }
        Command::Sweep { config, out, jobs, eps_list } => {
            let mut cfg = SweepConfig::load(&config)?;
            if let Some(list) = eps_list {
                cfg.sweep.eps = list;
            }
            if let Some(dir) = out {
                cfg.output.dir = dir;
            }
            cfg.validate()?;
            let res = run_sweep(&cfg, jobs)?;
            write_outputs(&cfg, &res, &cfg.output.dir)?;
            print!("{}", write_report(&cfg.output.dir)?);
            for f in &res.failures {
                eprintln!("failed point eps={} h={}: {}", f.epsilon, f.mesh_h, f.message);
            }
        }
        Command::Moduli { m, l1, l2, kappa, lambda, mu, eps_list } => {
            let p = LameParams::new(lambda, mu, 2)?;
            println!("{:>10} {:>14} {:>14}", "eps", "shear", "extensional");
            for eps in eps_list {
                let em = effective_moduli(&p, m, l1, l2, kappa, eps)?;
                println!("{eps:>10} {:>14.6} {:>14.6}", em.mu_star, em.e_star);
            }
        }
        Command::Verify { out, jobs, only } => {
            let ids = only.unwrap_or_else(|| ALL.to_vec());
            let results = verify(&ids, jobs, out.as_deref())?;
            for r in &results {
                println!("{}", r.line());
            }
            return Ok(results.iter().all(|r| r.passed));
        }
        Command::Report { out } => print!("{}", write_report(&out)?),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
