//! Coarea, Sobolev and Strichartz-type inequalities.

use isoperim::inequalities::{coarea_check, ri_sobolev, strichartz_check, Normalization, Settings, TestFunction};
use isoperim::rearrange::RiNorm;
use isoperim::spaces::{build_space, Field, SpaceSpec};

fn main() -> isoperim::Result<()> {
    let settings = Settings::default();
    let disk = build_space(&SpaceSpec::EuclideanDisk { radius: 4.0, resolution: 128 })?;
    let plane = disk.natural_profile()?;
    let tent = TestFunction::tent(vec![0.0, 0.0], 1.0).normalized(Normalization::CompactSupport);

    let r = coarea_check(&disk, &plane, &tent, &settings)?;
    println!("coarea (tent):       {:.5} <= {:.5}", r.lhs, r.rhs);
    for norm in [RiNorm::Lp(1.0), RiNorm::Lp(1.5)] {
        let r = ri_sobolev(&disk, &plane, &norm, &tent, &settings)?;
        // With an estimated operator norm the right side is a lower bound.
        println!("sobolev {:<11} {:.5} <= {:.5} (estimate {}, pass {})", norm.label(), r.lhs, r.rhs, r.estimate, r.pass);
    }
    let g = Field::new((0..disk.len()).map(|i| 1.0 / disk.distance_to(i, &[0.0, 0.0])).collect());
    let r = strichartz_check(&disk, &plane, &RiNorm::Lp(1.0), &tent, &g, &settings)?;
    println!("strichartz (1/|x|):  {:.5} <= {:.5} (ratio {:.5})", r.lhs, r.rhs, r.ratio);

    let sphere = build_space(&SpaceSpec::Sphere { n: 2, resolution: 128 })?;
    let prof = sphere.natural_profile()?;
    let r = ri_sobolev(&sphere, &prof, &RiNorm::Lp(1.5), &TestFunction::coordinate(2), &settings)?;
    println!("sphere L1.5 sobolev: {:.5} <= {:.5}", r.lhs, r.rhs);
    Ok(())
}
