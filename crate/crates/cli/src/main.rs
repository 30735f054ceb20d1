use clap::Parser;

use radiant_cli::{main_with, Cli, EXIT_IO};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(main_with(&cli));
}
