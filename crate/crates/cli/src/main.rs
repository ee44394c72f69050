use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tgds::degree_sequence::{hypothesis_report, stats, theta_check, DegreeSequence, ThetaOptions};
use tgds::excursion::{ei_bridge, h_exc, truncation_level, vervaat};
use tgds::fragmentation::{build_merge_log, forest_components, frag_process_query, integer_frag, write_trajectory};
use tgds::harness::{build_degree_sequence, run_experiment, BuilderKind, ExperimentConfig};
use tgds::lamination::{face_masses, lamination_at, lamination_svg, tree_svg, write_svg};
use tgds::plane_tree::{
    contour, height_process, modified_lukasiewicz, prim_path, reverse_lukasiewicz, to_lukasiewicz, PlaneTree,
};
use tgds::sampler::{
    attach_weights, enumerate_trees, exp_clocks, sample_tree, tree_count, uniform_edge_order, Seed,
};
use tgds::Error;

const EXIT_VALIDATION: u8 = 2;
const EXIT_STATISTICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "tgds", version, about = "Plane trees with a given degree sequence")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, env = "TGDS_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if absent).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    Lex,
    Rev,
    Prim,
    Height,
    Contour,
    Modified,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a degree sequence (JSON or CSV) and print its statistics.
    Validate { ds: PathBuf },
    /// Sample a uniform tree with the given degree sequence. The tree is
    /// written as CSV increments if `--out` ends in `.csv`, else as JSON.
    Sample {
        #[arg(long)]
        ds: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also write uniform edge weights (CSV keyed by child endpoint).
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Also write Exp(1) edge clocks (CSV keyed by child endpoint).
        #[arg(long)]
        clocks: Option<PathBuf>,
    },
    /// List every tree with a small degree sequence.
    Enumerate { ds: PathBuf },
    /// Print an encoding path of a tree.
    Encode {
        tree: PathBuf,
        #[arg(long, value_enum, default_value = "lex")]
        kind: Encoding,
        /// Number of hubs removed by `modified`.
        #[arg(long, default_value_t = 0)]
        hubs: usize,
    },
    /// Ranked component sizes of the weight-threshold forest, or a trajectory.
    Frag {
        tree: PathBuf,
        /// Keep edges with weight <= s.
        #[arg(long, conflicts_with = "trajectory")]
        s: Option<f64>,
        /// Comma-separated times u; prints the top `top` sizes of f(1-u).
        #[arg(long, value_delimiter = ',')]
        trajectory: Vec<f64>,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Lamination after removing floor(t) edges in a uniform order.
    Lam {
        tree: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Grid excursion X^exc and height process H^exc for a parameter theta.
    Icrt {
        #[arg(long)]
        sigma: f64,
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1 << 14)]
        m: usize,
        /// Writes the jump records as JSON.
        #[arg(long)]
        jumps: Option<PathBuf>,
    },
    /// Run an experiment from a JSON config; exit 3 if a comparison fails.
    Compare { config: PathBuf },
    /// Hypothesis diagnostics for a family built with `builder` at sizes `n`.
    Report {
        #[arg(long)]
        builder: String,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
    },
}

fn read_ds(path: &Path) -> tgds::Result<DegreeSequence> {
    if path.extension().is_some_and(|e| e == "csv") {
        DegreeSequence::read_csv(File::open(path)?)
    } else {
        DegreeSequence::from_json(&std::fs::read_to_string(path)?)
    }
}

fn read_tree(path: &Path) -> tgds::Result<PlaneTree> {
    let s = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        PlaneTree::from_json(&s)
    } else {
        PlaneTree::from_csv(s.trim())
    }
}

fn output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_path(w: &mut dyn Write, values: &[i64]) -> io::Result<()> {
    writeln!(w, "i,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{v}")?;
    }
    Ok(())
}

fn is_validation(e: &Error) -> bool {
    !matches!(e, Error::Io(_) | Error::Csv(_))
}

fn run(cli: Cli) -> tgds::Result<u8> {
    let seed = Seed::new(cli.seed, 0);
    let mut w = output(&cli.out)?;
    match cli.cmd {
        Cmd::Validate { ds } => {
            let ds = read_ds(&ds)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&stats(&ds))?)?;
        }
        Cmd::Sample { ds, svg, weights, clocks } => {
            let tree = sample_tree(&read_ds(&ds)?, seed);
            if let Some(p) = svg {
                write_svg(p, &tree_svg(&tree))?;
            }
            if let Some(p) = weights {
                std::fs::write(p, attach_weights(&tree, seed.derive(1)).to_csv())?;
            }
            if let Some(p) = clocks {
                std::fs::write(p, exp_clocks(&tree, seed.derive(2)).to_csv())?;
            }
            if cli.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "csv")) {
                writeln!(w, "{}", tree.to_csv())?;
            } else {
                writeln!(w, "{}", tree.to_json()?)?;
            }
        }
        Cmd::Enumerate { ds } => {
            let ds = read_ds(&ds)?;
            let trees = enumerate_trees(&ds)?;
            eprintln!("{} trees (formula {})", trees.len(), tree_count(&ds).round());
            for t in trees {
                writeln!(w, "{}", t.to_csv())?;
            }
        }
        Cmd::Encode { tree, kind, hubs } => {
            let tree = read_tree(&tree)?;
            let values = match kind {
                Encoding::Lex => to_lukasiewicz(&tree).values,
                Encoding::Rev => reverse_lukasiewicz(&tree).values,
                Encoding::Prim => prim_path(&tree, &attach_weights(&tree, seed))?.0.values,
                Encoding::Height => height_process(&tree),
                Encoding::Contour => contour(&tree),
                Encoding::Modified => {
                    let ds = tree.degree_sequence();
                    modified_lukasiewicz(&tree, &ds, hubs)?.0.values
                }
            };
            print_path(&mut w, &values)?;
        }
        Cmd::Frag { tree, s, trajectory, top } => {
            let tree = read_tree(&tree)?;
            let weights = attach_weights(&tree, seed);
            if let Some(s) = s {
                writeln!(w, "{}", serde_json::to_string(&forest_components(&tree, &weights, s).values)?)?;
            } else if !trajectory.is_empty() {
                write_trajectory(&build_merge_log(&tree, &weights), &trajectory, top, &mut w)?;
            } else {
                let log = build_merge_log(&tree, &weights);
                writeln!(w, "{}", serde_json::to_string(&frag_process_query(&log, 0.0).values)?)?;
            }
        }
        Cmd::Lam { tree, t, svg } => {
            let tree = read_tree(&tree)?;
            let order = uniform_edge_order(&tree, seed);
            let lam = lamination_at(&tree, &order, t);
            let faces = face_masses(&lam)?;
            let comps = integer_frag(&tree, &order, t);
            eprintln!("faces {:?}; components {:?}", faces.values, comps.values);
            if let Some(p) = svg {
                write_svg(p, &lamination_svg(&lam, &[]))?;
            }
            lam.write_csv(&mut w)?;
        }
        Cmd::Icrt { sigma, betas, m, jumps } => {
            let theta = theta_check(sigma, &betas, ThetaOptions { strict: true, divergent_beta: false })?;
            let k = truncation_level(&theta, m);
            let (x, _) = vervaat(&ei_bridge(&theta, k, m, seed))?;
            let (h, _) = h_exc(&x);
            if let Some(p) = jumps {
                std::fs::write(p, x.jumps_json()?)?;
            }
            writeln!(w, "s,x,h")?;
            for i in 0..=m {
                writeln!(w, "{},{:e},{:e}", i as f64 / m as f64, x.values[i], h.values[i])?;
            }
        }
        Cmd::Compare { config } => {
            let cfg: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(config)?)?;
            let report = run_experiment(&cfg)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?;
            if !report.passed {
                return Ok(EXIT_STATISTICAL);
            }
        }
        Cmd::Report { builder, n, sigma, betas } => {
            let kind: BuilderKind = builder.parse()?;
            let theta = theta_check(sigma, &betas, ThetaOptions { strict: true, divergent_beta: false })?;
            let family = n
                .iter()
                .map(|&n| build_degree_sequence(kind, n, &theta))
                .collect::<tgds::Result<Vec<_>>>()?;
            writeln!(w, "{}", serde_json::to_string_pretty(&hypothesis_report(&family)?)?)?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_validation(&e) { EXIT_VALIDATION } else { 1 })
        }
    }
}
