use std::process::ExitCode;

use bayesbd_cli::{run, usage_error, Cli, Completion};
use clap::{CommandFactory, Parser};

fn init_threads() {
    let Ok(v) = std::env::var("BAYESBD_THREADS") else {
        return;
    };
    match v.trim().parse::<usize>() {
        Ok(n) if n >= 1 => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring BAYESBD_THREADS={v:?}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(msg) = usage_error(&cli) {
        Cli::command()
            .error(clap::error::ErrorKind::MissingRequiredArgument, msg)
            .exit();
    }
    init_threads();
    let mut stdout = std::io::stdout().lock();
    match run(cli, &mut stdout) {
        Ok(Completion::Complete) => ExitCode::SUCCESS,
        Ok(Completion::Partial(msg)) => {
            eprintln!("incomplete: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
