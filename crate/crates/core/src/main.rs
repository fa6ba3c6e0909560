use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let result = ccisim::io::parse_cli(std::env::args_os()).and_then(|req| ccisim::io::execute(&req));
    match result {
        Ok(text) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("ccisim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
