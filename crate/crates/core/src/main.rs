fn main() {
    std::process::exit(lossprobe::cli::run(std::env::args_os()));
}
