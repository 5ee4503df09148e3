//! One line per acceptance criterion. Criteria 1 to 10 run in-process;
//! criterion 11 runs the built binary's `selftest`.

use std::process::Command;
use std::time::Instant;

use henon_lab::selftest::{run_criterion, CRITERIA, DEFAULT_SEED};

fn main() {
    let start = Instant::now();
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        let r = run_criterion(id, DEFAULT_SEED);
        println!("{r}");
        if !r.passed {
            failed.push(id);
        }
    }

    let out = Command::new(env!("CARGO_BIN_EXE_henon-lab"))
        .arg("selftest")
        .output()
        .expect("failed to run henon-lab");
    let lines = String::from_utf8_lossy(&out.stdout).lines().count();
    let ok = out.status.success() && lines == CRITERIA as usize;
    println!(
        "[{}] 11 selftest exit code: {:?}, {lines} result lines",
        if ok { "PASS" } else { "FAIL" },
        out.status.code()
    );
    if !ok {
        failed.push(11);
    }

    println!("acceptance finished in {:.1} s", start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
