//! Prints the accurate and approximate full-adder truth tables and the
//! signed error of each approximate row.

use approxrv::circuits::{full_adder, FullAdderMode};

fn main() {
    println!("a b cin | sum cout | approx sum | error");
    for row in 0..8u8 {
        let (a, b, cin) = (row & 4 != 0, row & 2 != 0, row & 1 != 0);
        let (s, c) = full_adder(a, b, cin, FullAdderMode::Accurate);
        let (sa, ca) = full_adder(a, b, cin, FullAdderMode::Approximate);
        let exact = s as i32 + 2 * c as i32;
        let approx = sa as i32 + 2 * ca as i32;
        println!(
            "{} {} {}   |  {}   {}   |     {}      | {:+}",
            a as u8,
            b as u8,
            cin as u8,
            s as u8,
            c as u8,
            sa as u8,
            approx - exact
        );
    }
}
