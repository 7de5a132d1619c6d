fn main() {
    std::process::exit(dfsforge::commands::main_with_args(std::env::args_os()));
}
