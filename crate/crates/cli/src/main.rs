use std::process::ExitCode;

use walklab::{parse_config, run_experiment, write_outputs, CliError, Parsed, WORKERS_ENV};

fn run() -> Result<i32, CliError> {
    let config = match parse_config(std::env::args_os(), std::env::var(WORKERS_ENV).ok())? {
        Parsed::Run(c) => c,
        Parsed::Exit { message, code } => {
            if code == 0 {
                print!("{message}");
            } else {
                eprint!("{message}");
            }
            return Ok(code);
        }
    };
    let out = run_experiment(&config)?;
    for path in write_outputs(&config, &out)? {
        println!("{}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("walklab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
