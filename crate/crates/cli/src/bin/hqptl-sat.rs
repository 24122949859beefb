//! Minimal DIMACS front end to CaDiCaL: `hqptl-sat FILE` prints an `s` line
//! and a model, exiting 10 (sat) or 20 (unsat) as competition solvers do.

use std::process::ExitCode;

use hyperqptl::synthesis::{run_solver, Cnf, SatAnswer, SolverConfig};

fn main() -> ExitCode {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: hqptl-sat FILE.cnf");
        return ExitCode::from(2);
    };
    let cnf = match std::fs::read_to_string(&path)
        .map_err(|e| e.to_string())
        .and_then(|t| Cnf::from_dimacs(&t).map_err(|e| e.to_string()))
    {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{path}: {e}");
            return ExitCode::from(2);
        }
    };
    match run_solver(&cnf, &SolverConfig::default()) {
        Ok(answer) => {
            print!("{}", answer.to_dimacs_output());
            ExitCode::from(if matches!(answer, SatAnswer::Sat(_)) { 10 } else { 20 })
        }
        Err(e) => {
            println!("s UNKNOWN");
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}
