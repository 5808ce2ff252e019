fn main() {
    std::process::exit(shapley_effects::cli::run(std::env::args_os()));
}
