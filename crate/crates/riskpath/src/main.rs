use clap::Parser;

fn main() {
    let cli = riskpath::cli::Cli::parse();
    std::process::exit(riskpath::cli::run(&cli));
}
