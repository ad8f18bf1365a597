use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(aniso_core::cli::run() as u8)
}
