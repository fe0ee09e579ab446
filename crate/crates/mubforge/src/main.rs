use std::process::ExitCode;

fn main() -> ExitCode {
    mubforge::cli::main_with(std::env::args_os())
}
