use clap::Parser;
use gkp_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = gkp_cli::commands::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(gkp_cli::exit_code(&e));
    }
}
