//! Train a vector-gate model on a Zipfian toy corpus and check whether rare
//! words receive larger character gates.
//!
//!     cargo run --release --example frequency_gates -- [seed ...]

use wordgate::analysis::{frequency_gate_trend, FrequencyGateSetup};

fn main() -> wordgate::Result<()> {
    let mut seeds: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if seeds.is_empty() {
        seeds = vec![1];
    }
    let setup = FrequencyGateSetup::default();
    for seed in seeds {
        let t = std::time::Instant::now();
        let trend = frequency_gate_trend(&setup, seed)?;
        let best = &trend.run.state;
        println!(
            "seed {seed}: best val acc {:.3} at epoch {}, spearman(rarity, mean gate) = {:.4}  ({:.1?})",
            best.best_val_acc,
            best.best_epoch,
            trend.spearman,
            t.elapsed()
        );
        for (lo, hi) in [(1u64, 1u64), (2, 3), (4, 10), (11, 50), (51, u64::MAX)] {
            let gates: Vec<f64> = trend
                .profile
                .iter()
                .filter(|p| (lo..=hi).contains(&p.frequency))
                .map(|p| p.mean_gate)
                .collect();
            if gates.is_empty() {
                continue;
            }
            let label = if hi == u64::MAX {
                format!("{lo}+")
            } else {
                format!("{lo}-{hi}")
            };
            println!(
                "  frequency {label:>6}: {:>3} words, mean gate {:.3}",
                gates.len(),
                gates.iter().sum::<f64>() / gates.len() as f64
            );
        }
    }
    Ok(())
}
