fn main() {
    std::process::exit(dipolecav_cli::run(std::env::args_os()));
}
