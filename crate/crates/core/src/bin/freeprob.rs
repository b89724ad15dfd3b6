use std::io::Write;

fn main() {
    let result = freeprob::cli::run(std::env::args());
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    let _ = stdout.write_all(result.stdout.as_bytes());
    let _ = stderr.write_all(result.stderr.as_bytes());
    std::process::exit(result.exit_code);
}
