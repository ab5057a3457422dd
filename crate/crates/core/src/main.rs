use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use affine_osc::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let dump = cli.dump_config;
    let outcome = cli.into_config().and_then(|cfg| {
        if dump {
            print!("{}", cfg.to_toml());
            Ok(())
        } else {
            run(&cfg)
        }
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
