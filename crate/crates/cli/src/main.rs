use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(tse_cli::run(std::env::args_os()))
}
