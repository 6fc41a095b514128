use std::io::Write;

use quatbranch::cli::{dispatch, EXIT_USAGE};

fn main() {
    let (code, out) = dispatch(std::env::args_os());
    let _ = if code >= EXIT_USAGE {
        std::io::stderr().lock().write_all(out.as_bytes())
    } else {
        std::io::stdout().lock().write_all(out.as_bytes())
    };
    std::process::exit(code);
}
