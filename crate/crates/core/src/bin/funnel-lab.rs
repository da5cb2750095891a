fn main() {
    std::process::exit(funnel_lab::experiments::run(std::env::args_os()));
}
