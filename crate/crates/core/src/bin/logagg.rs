fn main() -> std::process::ExitCode {
    logagg::cli::main_with_args(std::env::args_os())
}
