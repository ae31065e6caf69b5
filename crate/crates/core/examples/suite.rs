//! Run a verification suite in-process and write its report.

use isoperim::inequalities::Settings;
use isoperim::report::Report;
use isoperim::suites::{run_cases, select, Context, Suite};

fn main() -> isoperim::Result<()> {
    let ctx = Context::new(Settings::default(), 42, 128)?;
    let cases = select(Suite::Rearrangement);
    let results = run_cases(&ctx, &cases);
    for r in &results {
        println!("{:<40} ratio {:<12} {}", r.case, isoperim::report::fmt_num(r.ratio), if r.pass { "ok" } else { "FAIL" });
    }
    let report = Report::new(42, 128, 0.05, Suite::Rearrangement.name(), results);
    let dir = std::env::temp_dir().join("isoperim-example");
    report.write(&dir)?;
    println!("hash {} -> {}", report.run.hash, dir.join("report.json").display());
    Ok(())
}
