//! Drive a run from TOML text, as the command-line tool does, and recover the
//! configuration from the output.

use csqar::config::RunConfig;
use csqar::run::{config_from_output, execute};

fn main() {
    let text = r#"
mode = "evolve"

[refrigerator]
n_bath = [5, 5, 5]
coupling = [1.0, 0.95, 0.9]
g = 0.1

[time_grid]
start = 0.0
stop = 2.0
step = 0.5
"#;
    let config = match RunConfig::from_toml(text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    match execute(&config) {
        Ok(out) => {
            print!("{}", out.text);
            let again = config_from_output(&out.text).expect("embedded configuration parses");
            println!("configuration recovered: {}", again == config);
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
