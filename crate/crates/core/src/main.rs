fn main() {
    std::process::exit(foliamap::cli::run(std::env::args_os()));
}
