// The constant rho for small dimensions: closed form next to brute-force
// enumeration of the descent set, and the members of that set for n = 3.

use spsa::oracles::{enumerate_descent_set, verify_rho};
use spsa::spsa1a::rho_constant;

pub fn run_example() -> spsa::Result<()> {
    println!(
        "{:>3} {:>12} {:>12} {:>10}",
        "n", "rho", "enumerated", "float"
    );
    for row in verify_rho(10)? {
        let rho = rho_constant(row.n)?;
        println!(
            "{:>3} {:>12} {:>12} {:>10.6}",
            row.n, row.closed_form, row.brute_force, rho.value
        );
        assert!(row.matches);
    }

    // beyond u128 range the value comes from log-binomials
    for n in [100, 1_000, 10_000] {
        println!("rho({n}) = {:.6e}", rho_constant(n)?.value);
    }

    let g = [0.5, -0.5, 0.5];
    let set = enumerate_descent_set(&g)?;
    println!(
        "descent side of {g:?}: {} of 8 sign vectors",
        set.cardinality
    );
    for d in &set.members {
        println!("  {d}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
