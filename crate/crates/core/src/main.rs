use std::io::Write;

fn main() {
    env_logger::Builder::new()
        .filter_level(log::LevelFilter::Warn)
        .format(|buf, record| writeln!(buf, "warning: {}", record.args()))
        .target(env_logger::Target::Stderr)
        .init();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = uncertain_sets::cli::run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    std::process::exit(code);
}
