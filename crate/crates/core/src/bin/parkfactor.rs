fn main() {
    std::process::exit(parkfactor::cli::run(std::env::args_os()));
}
