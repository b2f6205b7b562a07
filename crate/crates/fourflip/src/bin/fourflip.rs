use clap::Parser;
use fourflip::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
