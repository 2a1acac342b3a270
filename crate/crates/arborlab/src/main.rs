use std::process;

fn main() {
    process::exit(arborlab::cli::run(std::env::args_os()));
}
