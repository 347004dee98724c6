mod args;
mod commands;
mod manifest;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, EXIT_USAGE};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful outputs; anything else is usage
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let ctx = Ctx { out: cli.out.clone() };
    let code = match &cli.command {
        Command::Validate { path, repair } => commands::validate(&ctx, path, *repair),
        Command::Bounds { path } => commands::bounds_cmd(&ctx, path),
        Command::Solve { path, shift, init, tol, max_iter, residual_stop, history_csv } => {
            commands::solve(
                &ctx,
                path,
                shift,
                init,
                *tol,
                *max_iter,
                *residual_stop,
                history_csv.as_deref(),
            )
        }
        Command::Exact { path } => commands::exact_cmd(&ctx, path),
        Command::Structure { path } => commands::structure_cmd(&ctx, path),
        Command::Certify { path, eta, scan_eta } => commands::certify(&ctx, path, *eta, *scan_eta),
        Command::Oracle { path, restarts, seed, grid_resolution } => {
            commands::oracle_cmd(&ctx, path, *restarts, *seed, *grid_resolution)
        }
        Command::Generate(gen) => commands::generate(&ctx, gen),
        Command::Compare { count, dir, seed, tol } => {
            commands::compare(&ctx, *count, dir.as_deref(), *seed, *tol, cli.jobs)
        }
    };
    std::process::exit(code);
}
