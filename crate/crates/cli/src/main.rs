use clap::Parser;

fn main() {
    let cli = gkbrane::Cli::parse();
    std::process::exit(gkbrane::run(&cli));
}
