use clap::Parser;

fn main() {
    std::process::exit(v19_cli::main_with(v19_cli::Cli::parse()));
}
