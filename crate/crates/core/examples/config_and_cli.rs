//! Resolving a configuration from TOML, dotted overrides and flags, then
//! running a subcommand through the same path as the binary.

use funnel_lab::experiments::{execute, run_command, Config, Subcommand};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut c = Config::from_toml("[profile]\na = 0.6\n\n[global]\nmu = 1e-4\n")?;
    c.apply_override("map.grid=2048")?;
    let out = run_command(Subcommand::CheckProp1, &mut c)?;
    println!("{}", out.summary);

    let dir = std::env::temp_dir().join("funnel-lab-config-example");
    let report = execute(["funnel-lab", "check-prop2", "--a", "0.96", "--omega-over-rho", "5", "--out", dir.to_str().unwrap_or(".")])?;
    println!("{} (exit {})", report.output.summary, report.exit_code());
    println!("{}", report.paths.json.display());
    Ok(())
}
