use std::process::ExitCode;

fn main() -> ExitCode {
    cm_harness::cli::main()
}
