fn main() {
    std::process::exit(kst_cli::dispatch(std::env::args_os()));
}
