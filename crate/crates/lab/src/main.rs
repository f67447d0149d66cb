use clap::Parser;

fn main() {
    let cli = anisodrop_lab::cli::Cli::parse();
    std::process::exit(anisodrop_lab::cli::run(cli));
}
