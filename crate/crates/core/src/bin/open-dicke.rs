fn main() -> std::process::ExitCode {
    open_dicke::cli::main()
}
