fn main() {
    std::process::exit(tree_anova::cli::run(std::env::args_os()));
}
