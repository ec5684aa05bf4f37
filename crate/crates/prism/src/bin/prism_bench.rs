use std::process::ExitCode;

fn main() -> ExitCode {
    prism::bench::cli::main()
}
