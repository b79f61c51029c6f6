fn main() {
    std::process::exit(latent_brush::cli::run(std::env::args_os()));
}
