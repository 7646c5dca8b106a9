use std::io::Write;

fn main() {
    if let Some(n) = std::env::var("KSSEQ_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let (code, out, err) = ksseq_cli::run_args(std::env::args_os());
    std::io::stdout().write_all(out.as_bytes()).ok();
    eprint!("{err}");
    std::process::exit(code);
}
