fn main() -> std::process::ExitCode {
    qpersist::cli::main()
}
