use std::process::ExitCode;

fn main() -> ExitCode {
    shadowlab::cli::run(std::env::args_os())
}
