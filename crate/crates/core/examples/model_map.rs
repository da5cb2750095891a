//! The one-dimensional map z -> a z^nu + alpha mu and its fixed points.

use funnel_lab::maps::ModelMap1d;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for mu in [0.0, 0.01, 0.2, 0.25, 0.3] {
        let m = ModelMap1d::new(1.0, 2.0, 1.0, mu)?;
        let fps: Vec<String> = m
            .fixed_points()
            .iter()
            .map(|f| format!("z = {:.9} (slope {:.6}, {})", f.z, f.derivative, if f.stable { "stable" } else { "unstable" }))
            .collect();
        println!("mu = {mu}: {}", if fps.is_empty() { "no fixed point".into() } else { fps.join(", ") });
    }
    let m = ModelMap1d::new(1.0, 2.0, 1.0, 0.01)?;
    println!("1000 iterates from 0.3 end at {:.12}", m.iterate(0.3, 1000)?);
    Ok(())
}
