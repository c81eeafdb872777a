//! Drives the batch front end from code: spectra written as CSV with metadata headers.
//!
//!     cargo run --release --example batch_run -- /tmp/open-dicke-out

use open_dicke::cli::{self, CommandKind, CutoffPolicy, DataFile, RunConfig};

fn main() -> open_dicke::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    let mut cfg = RunConfig::defaults(CommandKind::Spectrum);
    cfg.n_values = vec![3];
    cfg.cutoff = CutoffPolicy::Fixed { n_max: 6 };
    cfg.output_dir = out.into();
    cfg.validate()?;

    let summary = cli::run(&cfg)?;
    for line in &summary.lines {
        println!("{line}");
    }
    for path in &summary.files {
        let f = DataFile::read(path)?;
        println!("{}: {} rows, columns {:?}", path.display(), f.rows.len(), f.columns);
    }

    for check in cli::oracle_checks()? {
        println!("{} {}: {}", if check.passed { "ok  " } else { "FAIL" }, check.name, check.detail);
    }
    Ok(())
}
