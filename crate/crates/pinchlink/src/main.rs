use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(pinchlink::cli::run(std::env::args_os()))
}
