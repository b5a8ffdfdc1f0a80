use clap::Parser;

fn main() {
    let cli = fabry::cli::Cli::parse();
    std::process::exit(fabry::cli::run(cli));
}
