use std::io::{BufRead, Write};

use stub_engine::{run_uci, StubParams};

fn main() {
    let mut params = StubParams::default();
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--depth" => {
                let value = args
                    .next()
                    .and_then(|v| v.parse::<u32>().ok())
                    .filter(|d| *d >= 1);
                match value {
                    Some(d) => params.depth = d,
                    None => {
                        eprintln!("--depth expects a positive integer");
                        std::process::exit(2);
                    }
                }
            }
            "--fault-illegal-bestmove" => params.fault_illegal_bestmove = true,
            "--help" | "-h" => {
                println!("usage: stub-engine [--depth N] [--fault-illegal-bestmove]");
                println!("Deterministic UCI engine on stdin/stdout.");
                return;
            }
            other => {
                eprintln!("unknown argument {other:?}");
                std::process::exit(2);
            }
        }
    }

    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let lines = stdin.lock().lines().map_while(Result::ok);
    run_uci(
        lines,
        &mut |line| {
            // Engines must flush every reply; the client blocks on it.
            let _ = writeln!(out, "{line}");
            let _ = out.flush();
        },
        params,
    );
}
