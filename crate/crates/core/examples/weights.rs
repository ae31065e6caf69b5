//! Analyze catalog weights and build one from the prototype profile function.

use isoperim::spaces::{build_space, SpaceSpec};
use isoperim::weights::{
    analyze_weight, build_weight, construct_weight, prototype_g, LevelOptions, RadialDescriptor, WeightSpec,
};

fn main() -> isoperim::Result<()> {
    let s = build_space(&SpaceSpec::EuclideanDisk { radius: 4.0, resolution: 128 })?;
    let profile = s.natural_profile()?;
    let opts = LevelOptions::default();
    for spec in [WeightSpec::Distance { scale: 1.0, power: 1.0, offset: 0.0 }, WeightSpec::Prototype] {
        let w = build_weight(&s, &spec)?;
        let a = analyze_weight(&s, &w, &profile, &opts, false)?;
        println!(
            "{:<12} C = {:.5}  M = {:.5}  cross-check {:.2e}  levels {}",
            spec.label(),
            a.isoperimetric_constant.value,
            a.marcinkiewicz_norm.value,
            a.cross_check,
            a.level_count
        );
    }

    // A steeper weight: g = 2 · prototype gives w = |x| / 4.
    let g = prototype_g(&profile, Some(16.0 * std::f64::consts::PI))?.scaled(2.0);
    let w = construct_weight(&s, &g, &RadialDescriptor::for_space(&s)?, &profile)?;
    let a = analyze_weight(&s, &w, &profile, &opts, false)?;
    println!("2 x prototype: C = {:.5}", a.isoperimetric_constant.value);
    Ok(())
}
