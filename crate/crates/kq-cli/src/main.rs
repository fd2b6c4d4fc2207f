use clap::Parser;

fn main() {
    let cli = kq_cli::Cli::parse();
    let echo: Vec<String> = std::env::args().skip(1).collect();
    let (report, code) = kq_cli::run(&cli, echo);
    print!("{}", report.render());
    std::process::exit(code);
}
