use clap::Parser;

fn main() {
    let cli = metarank::cli::Cli::parse();
    // Internal invariant violations panic; map them to the dedicated exit
    // code instead of the default abort.
    let code =
        std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| cli.run())).unwrap_or_else(|_| {
            eprintln!("internal invariant failure");
            2
        });
    std::process::exit(code);
}
