fn main() -> std::process::ExitCode {
    symtoep::cli::main_entry()
}
