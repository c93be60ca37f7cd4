fn main() { std::process::exit(measonly::cli::run()) }
