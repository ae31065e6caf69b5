//! Decreasing rearrangements, maximal averages, medians and r.i. norms.

use isoperim::profiles::Profile;
use isoperim::rearrange::{decreasing_rearrangement, median, ri_norm, RiNorm};
use isoperim::spaces::{build_space, Field, SpaceSpec};

fn main() -> isoperim::Result<()> {
    let s = build_space(&SpaceSpec::Sphere { n: 2, resolution: 96 })?;
    let f = Field::from_fn(&s, |x| x[2] + 0.3 * x[0] * x[0]);
    let star = decreasing_rearrangement(&s, &f)?;
    println!("median {:.5}", median(&s, &f)?);
    for t in [0.01, 0.1, 0.5, 0.9] {
        println!("t={t}: f* = {:.5}, f** = {:.5}", star.eval(t), star.maximal(t)?);
    }
    let norms = [
        RiNorm::Lp(1.0),
        RiNorm::Lp(2.0),
        RiNorm::Lorentz { p: 2.0, q: 1.0 },
        RiNorm::Marcinkiewicz(Profile::sphere(2)?),
    ];
    for n in &norms {
        println!("{:<28} {:.6}", n.label(), ri_norm(&star, n)?);
    }
    Ok(())
}
