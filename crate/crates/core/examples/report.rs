//! Streams the per-prime report as TSV.
//!
//!     cargo run --release --example report -- 2000 fixtures/exceptional.tsv

use unramified::criteria::{FlagOverrides, DEFAULT_NODE_BUDGET};
use unramified::pairing::PairingFile;
use unramified::report::{report_stream, TSV_HEADER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let max_p: u64 = args.next().map_or(Ok(700), |s| s.parse())?;
    let file = match args.next() {
        Some(path) => PairingFile::parse(&std::fs::read(path)?)?,
        None => PairingFile::parse(b"")?,
    };
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let reports = report_stream(
        max_p,
        &file,
        FlagOverrides::default(),
        Some(DEFAULT_NODE_BUDGET),
        jobs,
        None,
    )?;
    println!("{TSV_HEADER}");
    for rep in reports.iter().filter(|r| r.r > 0) {
        println!("{}", rep.to_tsv_row());
    }
    Ok(())
}
