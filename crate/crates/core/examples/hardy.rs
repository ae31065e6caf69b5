//! The isoperimetric Hardy operator and estimates of its norm.

use isoperim::inequalities::{default_probes, hardy_operator_norm_estimate, hardy_values};
use isoperim::profiles::Profile;
use isoperim::rearrange::{RiNorm, StepFunction};

fn main() -> isoperim::Result<()> {
    let plane = Profile::euclidean(2)?;
    let f = StepFunction::indicator(1.0, 10.0)?;
    let ts = [0.01, 0.1, 0.5, 0.9];
    for (t, q) in ts.iter().zip(hardy_values(&f, &plane, &ts)?) {
        println!("Q(chi_(0,1))({t}) = {q:.6}  (closed form {:.6})", 2.0 * (t.powf(-0.5) - 1.0));
    }

    let sphere = Profile::sphere(2)?;
    let probes = default_probes(0.5, 1.0);
    for norm in [RiNorm::Lp(1.0), RiNorm::Lp(2.0), RiNorm::Lorentz { p: 2.0, q: 1.0 }] {
        let est = hardy_operator_norm_estimate(&sphere, &norm, &probes)?;
        println!("sphere {:<10} norm >= {:.5}", norm.label(), est.value);
    }
    let exact = hardy_operator_norm_estimate(&plane, &RiNorm::Lp(1.0), &[])?;
    println!("plane L1 norm = {} (closed form: {})", exact.value, exact.closed_form);
    Ok(())
}
