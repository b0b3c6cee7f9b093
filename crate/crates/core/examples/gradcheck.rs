//! Central-difference gradient checks of every differentiable component.
//!
//!     cargo run --release --example gradcheck -- [points] [seed]

use wordgate::gradcheck_suite::{run_suite, GRADCHECK_POINTS, GRADCHECK_THRESHOLD};

fn main() -> wordgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let points = args.next().and_then(|s| s.parse().ok()).unwrap_or(GRADCHECK_POINTS);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let results = run_suite(points, seed)?;
    for c in &results {
        println!(
            "{:<26} points {:>4}  max rel err {:.3e}  {}  ({:.2}s)",
            c.component,
            c.points,
            c.max_rel_error,
            if c.passed() { "ok" } else { "FAIL" },
            c.seconds
        );
    }
    let failed = results.iter().filter(|c| !c.passed()).count();
    println!("{failed} component(s) at or above {GRADCHECK_THRESHOLD:e}");
    Ok(())
}
