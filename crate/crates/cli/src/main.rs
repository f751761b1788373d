use clap::Parser;

fn main() -> anyhow::Result<()> {
    planepolar_cli::run(planepolar_cli::Cli::parse())
}
