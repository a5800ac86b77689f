//! `gen-fixture` — seeded random representations for tests and benchmarks.
//!
//! Writes `S₀ · (⊕ I_{m_y} ⊗ p_y) · S₀⁻¹` as representation JSON. The index set
//! and the multiplicities are random unless given; `S₀` always is, with
//! `cond(S₀) ≤ --cond`. The same seed and flags reproduce the same file.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ultrarep::fixtures;
use ultrarep::IndexSet;

#[derive(Debug, Parser)]
#[command(name = "gen-fixture", version, about = "Generate a seeded random representation fixture")]
struct Args {
    /// Seed for the ChaCha8 generator.
    #[arg(long)]
    seed: u64,
    /// Index set as `label:dim,...`; random (p0, p1, …) when omitted.
    #[arg(long, value_parser = parse_pairs)]
    points: Option<Pairs>,
    /// Multiplicities as `label:m,...`; random when omitted.
    #[arg(long, value_parser = parse_pairs)]
    mult: Option<Pairs>,
    /// Upper bound on the condition number of the conjugating matrix.
    #[arg(long, default_value_t = 10.0)]
    cond: f64,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `label:count` pairs from a comma-separated list.
#[derive(Debug, Clone)]
struct Pairs(Vec<(String, usize)>);

fn parse_pairs(s: &str) -> Result<Pairs, String> {
    s.split(',')
        .map(|item| {
            let (label, n) = item
                .rsplit_once(':')
                .ok_or_else(|| format!("expected label:count, got {item:?}"))?;
            let n: usize = n.parse().map_err(|e| format!("{item:?}: {e}"))?;
            if label.is_empty() || n == 0 {
                return Err(format!("{item:?}: label must be nonempty and count positive"));
            }
            Ok((label.to_string(), n))
        })
        .collect::<Result<_, _>>()
        .map(Pairs)
}

fn generate(args: &Args) -> Result<String, String> {
    if !(args.cond >= 1.0 && args.cond.is_finite()) {
        return Err("--cond must be a finite number ≥ 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let set = match &args.points {
        Some(Pairs(pairs)) => IndexSet::from_pairs(pairs.iter().cloned()).map_err(|e| e.to_string())?,
        None => {
            let points = rng.gen_range(1..=4);
            fixtures::random_index_set(points, 3, &mut rng)
        }
    };
    let fixture = match &args.mult {
        Some(Pairs(pairs)) => {
            let parts = pairs
                .iter()
                .map(|(label, m)| {
                    set.index_of(label)
                        .map(|y| (y, *m))
                        .ok_or_else(|| format!("unknown point {label:?}"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            fixtures::conjugated_sum(&set, &parts, args.cond, &mut rng).map_err(|e| e.to_string())?
        }
        None => fixtures::random_fixture(&set, 3, 3, args.cond, &mut rng),
    };
    let mut text = serde_json::to_string_pretty(&fixture.rep).map_err(|e| e.to_string())?;
    text.push('\n');
    Ok(text)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = generate(&args).and_then(|text| match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{}", serde_json::json!({ "error": "invalid_arguments", "message": message }));
            ExitCode::from(2)
        }
    }
}
