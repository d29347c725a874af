fn main() {
    std::process::exit(fracskellam::cli::run(std::env::args_os()));
}
