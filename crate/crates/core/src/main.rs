use std::io;

use lrkit::codegen::BackendRegistry;

fn main() {
    let registry = BackendRegistry::with_defaults();
    let code = lrkit::cli::run(
        std::env::args_os(),
        &registry,
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
