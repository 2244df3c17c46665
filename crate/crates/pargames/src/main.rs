use std::process::ExitCode;

fn main() -> ExitCode {
    pargames::cli::main()
}
