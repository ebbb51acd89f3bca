fn main() {
    std::process::exit(wavessm::commands::main_with(std::env::args_os()));
}
