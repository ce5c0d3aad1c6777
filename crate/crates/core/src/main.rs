fn main() { std::process::exit(railsched::cli::run()); }
