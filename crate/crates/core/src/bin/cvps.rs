use clap::Parser;
use cv_postselect::cli::{execute, Cli};

fn main() {
    std::process::exit(execute(&Cli::parse()));
}
