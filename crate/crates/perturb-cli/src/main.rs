fn main() {
    std::process::exit(perturb_cli::cli_main(std::env::args_os()));
}
