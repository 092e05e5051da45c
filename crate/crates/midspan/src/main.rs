fn main() {
    std::process::exit(midspan::io::cli(std::env::args_os().skip(1)));
}
