//! The local passage T0 next to a numerical integration of the linear flow.

use funnel_lab::maps::{flow_oracle, local_map_t0, transition_time, DiskPoint, FlowStop, SaddleFocusParams, DEFAULT_ORACLE_STEP};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = SaddleFocusParams::from_ratios(1.5, 2.0)?;
    println!("saddle index {}, omega/rho {}", p.saddle_index(), p.omega_over_rho());
    for r0 in [0.9, 0.5, 0.1, 0.01] {
        let t = transition_time(r0, &p)?;
        let a = local_map_t0(DiskPoint::new(r0, 0.0), &p)?;
        let b = flow_oracle(r0, 0.0, 1.0, &p, FlowStop::ExitCylinder, DEFAULT_ORACLE_STEP)?;
        println!(
            "r0 = {r0:<5} time {t:.6}  z {:.6e} (flow {:.6e})  phi {:.6} (flow {:.6})",
            a.z, b.z, a.phi_lift, b.phi_lift
        );
    }
    Ok(())
}
