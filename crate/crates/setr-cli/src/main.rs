use clap::Parser;

fn main() {
    let cli = setr_cli::Cli::parse();
    std::process::exit(setr_cli::run(cli).into());
}
