//! Transfer an uncertainty inequality through a smaller profile.

use isoperim::inequalities::{transference_check, Normalization, Settings, TestFunction};
use isoperim::spaces::{build_space, SpaceSpec};
use isoperim::weights::{build_weight, WeightSpec};

fn main() -> isoperim::Result<()> {
    let s = build_space(&SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: None })?;
    let gauss = s.natural_profile()?;
    let w = build_weight(&s, &WeightSpec::Prototype)?;
    let f = TestFunction::odd_bump(1.0).normalized(Normalization::MeanZero);
    for factor in [1.0, 0.9, 0.5] {
        let smaller = gauss.scaled(factor)?;
        let r = transference_check(&gauss, &smaller, &s, &w, &f, 2.0, &Settings::default())?;
        println!("I2 = {factor} I1: {:.5} <= {:.5}, pass {}", r.lhs, r.rhs, r.pass);
    }
    Ok(())
}
