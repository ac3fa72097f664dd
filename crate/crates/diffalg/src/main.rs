use clap::Parser;

use diffalg::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let (output, code) = run(cli);
    print!("{}", output);
    std::process::exit(code);
}
