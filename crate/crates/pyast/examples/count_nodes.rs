//! Prints `path stmts exprs` (or `path ERR message`) for each argument.
fn main() {
    for path in std::env::args().skip(1) {
        let src = match std::fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) => {
                println!("{path} ERR {e}");
                continue;
            }
        };
        match dspipe_pyast::parse_module(&src) {
            Ok(m) => {
                let c = dspipe_pyast::count_nodes(&m);
                println!("{path} {} {}", c.stmts, c.exprs);
            }
            Err(e) => println!("{path} ERR {e}"),
        }
    }
}
