//! Driving the file-based runner from code instead of the `fhrn` binary.

use fhrn::cli::{execute, Command, OperatorSpec, RunConfig};

fn main() -> fhrn::Result<()> {
    let out = std::env::temp_dir().join("fhrn-run-config-example");
    let mut cfg = RunConfig::from_toml(
        r#"
seed = 7
[params]
gamma = 0.8
kappa = 6.0
[integrator]
horizon = 20.0
"#,
    )?;
    cfg.command = Command::Simulate;
    cfg.operator = OperatorSpec::Mixed { dim: 4, norm: 0.6, mu: 0.3 };
    cfg.out = out.clone();

    let manifest = execute(&cfg)?;
    for f in &manifest.files {
        println!("{}  {} bytes  {}", f.path, f.bytes, f.sha256);
    }
    println!("outputs in {}", out.display());
    Ok(())
}
