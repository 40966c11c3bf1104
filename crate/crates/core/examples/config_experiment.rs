//! Library-side equivalent of `pcclone run`: build a config, evaluate it and
//! print the table as CSV.

use phasecov::experiment::{self, CountingConfig, ExperimentConfig, Format};
use phasecov::*;

fn main() {
    let mut cfg = ExperimentConfig::new(
        ClonerParams::Hybrid(HybridParams::ideal()),
        Qubit::equatorial(0.0),
    );
    cfg.noise = NoiseConfig::with_visibility(0.98);
    cfg.counting = Some(CountingConfig {
        n_pairs: 2_000_000,
        detectors: DetectorBank::default(),
        seed: Some(11),
        balance: None,
    });
    println!("{}", serde_json::to_string_pretty(&cfg).unwrap());

    let rows = match experiment::run(&cfg, None) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code().into());
        }
    };
    let csv = experiment::render(&rows, Format::Csv).unwrap();
    print!("{}", String::from_utf8_lossy(&csv));
}
