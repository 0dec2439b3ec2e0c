fn main() {
    std::process::exit(extcalc::cli::run());
}
