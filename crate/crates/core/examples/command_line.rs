//! Drive the command-line front end in-process, capturing its output.
//!
//! Run with `cargo run --example command_line`.

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = prosody::cli::run(
        std::iter::once("prosody").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8_lossy(&out).into_owned(),
        String::from_utf8_lossy(&err).into_owned(),
    )
}

fn main() {
    for args in [
        &["tonemap", "LHLLHLLHLLH", "HLHL"][..],
        &["tonemap", "--csv", "LHL"],
        &["chroma", "--means", "212,177"],
        &["tonemap", "LHQ"],
        &["metrics"],
    ] {
        let (code, out, err) = run(args);
        println!("$ prosody {}", args.join(" "));
        print!("{out}");
        for line in err.lines().take(3) {
            println!("[stderr] {line}");
        }
        println!("[exit {code}]\n");
    }
}
