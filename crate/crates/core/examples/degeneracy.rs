//! The symbol |tau|^alpha - ||xi||^alpha vanishes on a set of positive Haar
//! measure — the obstruction to a fundamental solution.  The fraction is
//! computed exactly as a rational from coset counts and compared with the
//! closed form (1 - q^-1)(1 - q^-n) / (1 - q^-(n+1)).
//!
//! Run with: cargo run --example degeneracy

use ultrawave::local_field::FieldParams;
use ultrawave::waves::symbol_degeneracy;

fn main() {
    println!("{:<6} {:<4} {:<12} {:<12} exact", "p", "n", "fraction", "closed form");
    for (p, n) in [(2u64, 1usize), (2, 2), (3, 1), (3, 2), (5, 2), (7, 3)] {
        let params = FieldParams::new(p).unwrap();
        let report = symbol_degeneracy(params, n, 0, 3).unwrap();
        println!(
            "{:<6} {:<4} {:<12} {:<12} {}",
            p, n, report.fraction, report.closed_form, report.exact_match
        );
    }
    println!("\nthe p = 2, n = 1 value is exactly 1/3: the degenerate set is never null.");
}
