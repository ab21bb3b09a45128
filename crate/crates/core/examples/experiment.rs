//! A small configured sweep run through the harness, summary CSV on stdout.

use beamsim::harness::{output::write_summary, parse_config_str, run_experiment};

const CONFIG: &str = r#"
name = "mixed-vs-m"
scheme = "mixed"
k = 3
m = 3
rho_db = [20.0, 34.0]
trials = 50
master_seed = 42

[channel]
kind = "rayleigh"
n_t = 32
n_r = 32

[sweep]
param = "m"
values = [3, 4, 5, 6]
"#;

fn main() -> beamsim::Result<()> {
    let cfg = parse_config_str(CONFIG)?;
    let result = run_experiment(&cfg)?;
    let w = write_summary(&[result], std::io::stdout().lock())?;
    drop(w);
    Ok(())
}
