use clap::Parser;
use normargue::cli::{color_enabled, run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = run(
        &cli,
        color_enabled(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}
