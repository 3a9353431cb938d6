use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(stable_arma::cli::run(std::env::args_os()))
}
