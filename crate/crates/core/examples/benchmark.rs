//! Runs the synthetic benchmark for the given seeds and prints both tables.
//!
//! Usage: `cargo run --release --example benchmark -- 41 42 43`
//!
//! A partial generator config can be supplied as JSON in `SOPCAST_SYNTH`,
//! e.g. `SOPCAST_SYNTH='{"noise_std": 0.5}'`.

use std::time::Instant;

use sopcast::harness::{run_benchmark, BenchmarkConfig};
use sopcast::synth::{generate, summary_stats, SynthConfig};

fn main() -> sopcast::Result<()> {
    let seeds: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("seed must be an integer"))
        .collect();
    let seeds = if seeds.is_empty() { vec![42] } else { seeds };
    let synth: SynthConfig = match std::env::var("SOPCAST_SYNTH") {
        Ok(json) => serde_json::from_str(&json)?,
        Err(_) => SynthConfig::default(),
    };
    for seed in seeds {
        let t0 = Instant::now();
        let data = generate(&synth, seed)?;
        let s = summary_stats(data.sop.values())?;
        println!("seed {seed}: SOP mean {:.2} std {:.2}", s.mean, s.std);
        let cfg = BenchmarkConfig {
            seed,
            ..BenchmarkConfig::default()
        };
        let r = run_benchmark(&data.sop, &data.weather, &cfg, &format!("synthetic seed {seed}"))?;
        print!("{}", r.short.to_text());
        print!("{}", r.long.to_text());
        println!("elapsed {:.1} s\n", t0.elapsed().as_secs_f64());
    }
    Ok(())
}
