fn main() {
    std::process::exit(wordgate::cli::dispatch(std::env::args_os()));
}
