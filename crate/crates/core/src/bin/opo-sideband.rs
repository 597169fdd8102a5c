use clap::Parser;
use opo_sideband::cli::{init_logging, run, Cli};

fn main() {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    std::process::exit(run(&cli));
}
