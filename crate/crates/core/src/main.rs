use std::process::ExitCode;

fn main() -> ExitCode {
    // Die silently on a closed pipe (`reflow ... | head`), like any other
    // command-line tool; Rust's default of ignoring SIGPIPE would turn the
    // first print after that into a panic.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    ExitCode::from(reflow::cli::run())
}
