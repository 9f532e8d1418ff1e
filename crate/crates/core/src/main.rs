use clap::Parser;
use memchan::cli::{run, Cli};

fn main() {
    let outcome = run(Cli::parse());
    if let Some(err) = &outcome.error {
        eprintln!("{err}");
    }
    print!("{}", outcome.output);
    std::process::exit(outcome.code);
}
