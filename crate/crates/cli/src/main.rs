use clap::Parser;

fn main() {
    let cli = majorant_cli::Cli::parse();
    std::process::exit(majorant_cli::run(cli));
}
