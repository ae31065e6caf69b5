//! Additive and multiplicative uncertainty inequalities for a tent on the plane.

use isoperim::inequalities::{
    uncertainty_additive, uncertainty_multiplicative, Normalization, Settings, TestFunction,
};
use isoperim::spaces::{build_space, Field, SpaceSpec};

fn main() -> isoperim::Result<()> {
    let s = build_space(&SpaceSpec::EuclideanDisk { radius: 4.0, resolution: 128 })?;
    let profile = s.natural_profile()?;
    let w = Field::new((0..s.len()).map(|i| s.distance_to(i, &[0.0, 0.0])).collect());
    let f = TestFunction::tent(vec![0.0, 0.0], 1.0).normalized(Normalization::CompactSupport);
    let settings = Settings::default();

    let add = uncertainty_additive(&s, &profile, &w, &f, 1.0, 1.0, None, &settings)?;
    println!("additive: worst ratio {:.5} over {} radii, pass {}", add.ratio, add.curve.len(), add.pass);
    for row in add.curve.iter().step_by(32) {
        println!("  r={:<10.4} lhs={:.5} rhs={:.5}", row.r, row.lhs, row.rhs);
    }
    let mult = uncertainty_multiplicative(&s, &profile, &w, &f, 1.0, 1.0, &settings)?;
    println!("multiplicative: {:.5} <= {:.5}, pass {}", mult.lhs, mult.rhs, mult.pass);
    Ok(())
}
