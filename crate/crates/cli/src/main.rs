use clap::Parser;
use toda_cli::commands::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    print!("{}", out.text);
    std::process::exit(out.code);
}
