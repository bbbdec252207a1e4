use std::process::ExitCode;

fn main() -> ExitCode {
    let cfg = match ftn_cli::parse_config(std::env::args_os()) {
        Ok(c) => c,
        Err(ftn_cli::ConfigError::Help(text)) => {
            print!("{text}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    match ftn_cli::run_and_write(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ftn {}: {e}", cfg.command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
