fn main() {
    let code = team_contest::cli::run(std::env::args_os());
    std::process::exit(code);
}
