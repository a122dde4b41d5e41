use clap::Parser;

use onebit_harness::cli::{run, Cli};
use onebit_harness::exit_code;

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
