use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match aklt::cli::run(std::env::args_os(), &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aklt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
