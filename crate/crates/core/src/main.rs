use std::process::ExitCode;

fn main() -> ExitCode {
    qlmass::cli::main()
}
