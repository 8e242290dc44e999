use clap::Parser;
use superbos::cli::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
