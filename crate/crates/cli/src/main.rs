use clap::Parser;

fn main() {
    let cli = dsm_cli::Cli::parse();
    std::process::exit(dsm_cli::run(cli));
}
