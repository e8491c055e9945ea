//! The expression language used for boundary data and test fields.
//!
//! cargo run --example expressions

use spacelike_graphs::expr::{evaluate, parse};
use spacelike_graphs::{DomainMask, Result};

fn main() -> Result<()> {
    for src in [
        "-x^2",
        "2^3^2",
        "atan2(y, x) * 0.5",
        "sqrt(x^2 + y^2) - 1",
        "pi*x*y",
    ] {
        let e = parse(src)?;
        println!("{src:<22} -> {e:<28} at (0.6, 0.8) = {}", e.eval(0.6, 0.8)?);
    }

    for bad in ["x +", "sin(x", "2 ** x", "foo(x)", "x y"] {
        println!("{bad:<10} error: {}", parse(bad).unwrap_err());
    }
    match evaluate("log(x)", -1.0, 0.0) {
        Ok(v) => println!("log(-1) = {v}"),
        Err(e) => println!("log(-1): {e}"),
    }

    let mask = DomainMask::disc(0.0, 0.0, 1.0, 33)?;
    match parse("1/(x^2 + y^2)")?.sample(&mask) {
        Ok(_) => println!("sampled"),
        Err(e) => println!("sampling 1/(x^2 + y^2) on a disc: {e}"),
    }
    Ok(())
}
