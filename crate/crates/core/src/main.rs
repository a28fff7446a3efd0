use clap::Parser;

fn main() {
    let cli = tkrank::cli::Cli::parse();
    match tkrank::cli::run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            std::process::exit(outcome.code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
