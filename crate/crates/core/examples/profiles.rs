//! Evaluate the catalog profiles and their Φ functions.

use isoperim::profiles::Profile;

fn main() -> isoperim::Result<()> {
    let catalog = [
        Profile::euclidean(2)?,
        Profile::half_plane(),
        Profile::sphere(1)?,
        Profile::sphere(2)?,
        Profile::log_concave(1.5)?,
        Profile::gaussian(),
    ];
    let ts = [1e-6, 0.01, 0.1, 0.25, 0.5];
    println!("{:<24} {}", "profile", ts.map(|t| format!("{t:>12}")).join(""));
    for p in &catalog {
        let row: String = ts.iter().map(|&t| format!("{:>12.6}", p.value(t))).collect();
        println!("{:<24} {row}", p.label());
    }
    println!();
    for p in &catalog {
        let row: String = ts.iter().map(|&t| format!("{:>12.6}", p.phi(t))).collect();
        println!("{:<24} {row}", format!("phi {}", p.label()));
    }
    Ok(())
}
