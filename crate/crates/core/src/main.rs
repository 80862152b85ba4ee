use std::process::ExitCode;

fn main() -> ExitCode {
    stripe_core::cli::main()
}
