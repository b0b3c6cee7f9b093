//! Welch t-tests of every method against the best method of each
//! (dataset, task), from a `dataset,task,method,seed,value` CSV.
//!
//!     cargo run --example significance -- [results.csv] [alpha]

use std::io::Write as _;

use wordgate::analysis::{load_results, significance_csv, significance_table};

const EXAMPLE: &str = "dataset,task,method,seed,value
snli,simlex,w,1,31.2
snli,simlex,w,2,30.4
snli,simlex,w,3,32.0
snli,simlex,vg,1,40.8
snli,simlex,vg,2,41.9
snli,simlex,vg,3,40.1
snli,simlex,sg,1,39.7
snli,simlex,sg,2,41.5
snli,simlex,sg,3,40.9
";

fn main() -> wordgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = match args.next() {
        Some(p) => p.into(),
        None => {
            let p = std::env::temp_dir().join("wordgate-example-results.csv");
            std::fs::File::create(&p)
                .and_then(|mut f| f.write_all(EXAMPLE.as_bytes()))
                .map_err(|e| wordgate::Error::io(&p, e))?;
            p
        }
    };
    let alpha: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.05);
    let rows = significance_table(&load_results(&path)?, alpha)?;
    print!("{}", significance_csv(&rows));
    Ok(())
}
