fn main() -> std::process::ExitCode {
    ctreserve::cli::main()
}
