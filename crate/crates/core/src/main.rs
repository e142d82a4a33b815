use std::process::ExitCode;

fn main() -> ExitCode {
    nclass::cli::main()
}
