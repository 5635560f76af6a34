use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stderr = io::stderr();
    match kee_cli::threads_from_env() {
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(kee_cli::EXIT_USAGE as u8);
        }
        #[cfg(feature = "parallel")]
        Ok(Some(k)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
                eprintln!("kee: cannot configure thread pool: {e}");
            }
        }
        Ok(_) => {}
    }
    let code = kee_cli::execute(std::env::args_os(), &mut io::stdout().lock(), &mut stderr);
    ExitCode::from(code as u8)
}
