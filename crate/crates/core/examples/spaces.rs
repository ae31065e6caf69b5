//! Build discretized spaces, measure regions and estimate perimeters.

use isoperim::spaces::{build_space, Region, SpaceSpec};

fn main() -> isoperim::Result<()> {
    let specs = [
        SpaceSpec::EuclideanBox { n: 2, halfwidth: 4.0, resolution: 256, bounded: false },
        SpaceSpec::Sphere { n: 2, resolution: 128 },
        SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: None },
    ];
    for spec in &specs {
        let s = build_space(spec)?;
        println!("{}: {} atoms, measure {:.8}", s.label(), s.len(), s.total_measure());
    }

    let plane = build_space(&specs[0])?;
    let disk = Region::Ball { center: vec![0.0, 0.0], radius: 1.0 };
    let mask = disk.mask(&plane)?;
    let per = plane.minkowski_content(&mask, &plane.default_offsets())?;
    println!("unit disk: area {:.5}, perimeter {:.5}", plane.measure_mask(&mask), per.value);

    let sphere = build_space(&specs[1])?;
    for r in [0.5, 1.0, 1.5] {
        let cap = Region::Ball { center: vec![0.0, 0.0, 1.0], radius: r }.mask(&sphere)?;
        let per = sphere.minkowski_content(&cap, &sphere.default_offsets())?;
        println!(
            "cap r={r}: measure {:.5} (exact {:.5}), perimeter {:.5} (exact {:.5})",
            sphere.measure_mask(&cap),
            sphere.ball_measure(r)?,
            per.value,
            r.sin() / 2.0
        );
    }
    Ok(())
}
