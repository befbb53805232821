use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cmnc_cli::run(std::env::args()) as u8)
}
