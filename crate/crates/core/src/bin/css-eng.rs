use clap::Parser;
use css_engineering::cli::{main_with, Args};

fn main() {
    std::process::exit(main_with(Args::parse()));
}
