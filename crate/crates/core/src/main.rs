fn main() {
    std::process::exit(lca_wold::cli::run(std::env::args_os()));
}
