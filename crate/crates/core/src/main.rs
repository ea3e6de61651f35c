fn main() {
    std::process::exit(descfact::cli::run(std::env::args()));
}
