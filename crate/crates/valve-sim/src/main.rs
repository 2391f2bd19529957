fn main() {
    std::process::exit(valve_sim::cli::run_main());
}
