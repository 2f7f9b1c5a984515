use std::io::Write;

fn main() {
    let cli = <filiform_core::cli::Cli as clap::Parser>::parse();
    let out = filiform_core::cli::run(&cli);
    eprint!("{}", out.stderr);
    match &cli.output {
        Some(path) if out.code != 2 => {
            if let Err(e) = std::fs::write(path, &out.stdout) {
                eprintln!("error: {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        _ => {
            let _ = std::io::stdout().write_all(out.stdout.as_bytes());
        }
    }
    std::process::exit(out.code);
}
