use std::process::ExitCode;

fn main() -> ExitCode {
    somc::cli::main()
}
