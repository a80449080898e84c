use clap::Parser;

fn main() {
    let cli = npssl_cli::Cli::parse();
    match npssl_cli::run(cli) {
        Ok(msg) => println!("{msg}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
