fn main() -> std::process::ExitCode {
    default_miner::cli::run(std::env::args_os())
}
