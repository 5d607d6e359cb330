fn main() {
    std::process::exit(percolab::run(std::env::args_os()));
}
