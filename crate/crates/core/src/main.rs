fn main() {
    std::process::exit(twistbeam::cli::main_with(std::env::args_os()));
}
