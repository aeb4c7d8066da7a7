use clap::Parser;

use entangle_cli::output::error_record;
use entangle_cli::{run, Cli};

fn main() {
    let outcome = run(Cli::parse());
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    for m in &outcome.messages {
        println!("{m}");
    }
    for p in &outcome.written {
        println!("wrote {}", p.display());
    }
    if let Err(e) = &outcome.status {
        eprintln!("{}", error_record(e));
    }
    std::process::exit(outcome.exit_code());
}
