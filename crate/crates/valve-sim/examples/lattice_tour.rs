//! Tour of the capability lattice: the componentwise order, upward-closed
//! sets given by antichains, the escape-coverage check behind the valve's
//! first assumption, and sandwich witnesses on a growth trajectory.
//!
//! ```text
//! cargo run --example lattice_tour
//! ```

use valve_sim::lattice::{
    check_escape_coverage, sandwich_witness, CapVector, Lattice, Strictness, UpSet,
};

fn v(levels: &[u32]) -> CapVector {
    CapVector::new(levels.to_vec())
}

fn main() {
    let lattice = Lattice::new(2, 3).unwrap();
    println!(
        "lattice: {} dimensions, levels 0..={}, {} points",
        lattice.dims,
        lattice.max_level,
        lattice.cardinality()
    );

    let a = v(&[1, 1]);
    let b = v(&[2, 1]);
    let c = v(&[2, 2]);
    println!("\ncomponentwise order:");
    println!("  {a} <= {b}: {}", a.leq(&b));
    println!("  {a} <  {c} (strict everywhere): {}", a.strictly_below(&c));
    println!("  {b} <  {c} (strict everywhere): {}", b.strictly_below(&c));
    println!("  {b} and {} are incomparable: {}", v(&[1, 2]), !b.leq(&v(&[1, 2])) && !v(&[1, 2]).leq(&b));

    // Upward-closed sets store only their minimal generators.
    let danger = UpSet::from_antichain([v(&[2, 2])]).unwrap();
    let escape = UpSet::normalized([v(&[1, 1]), v(&[2, 2]), v(&[1, 1])]).unwrap();
    println!("\ndanger set {danger}, escape set {escape} (normalized from 3 raw generators)");
    for point in [v(&[3, 2]), v(&[2, 1]), v(&[1, 1])] {
        println!(
            "  {point}: dangerous = {}, escape-capable = {}",
            danger.contains(&point),
            escape.contains(&point)
        );
    }

    // Assumption (a): every danger generator needs a strictly weaker escape.
    println!("\nescape coverage (danger {danger} vs escape {escape}):");
    let report = check_escape_coverage(&danger, &escape, Strictness::All);
    for entry in &report.entries {
        match &entry.witness {
            Some(w) => println!("  {} covered by {}", entry.danger, w),
            None => println!("  {} UNCOVERED", entry.danger),
        }
    }
    let bad_escape = UpSet::from_antichain([v(&[2, 1])]).unwrap();
    let report = check_escape_coverage(&danger, &bad_escape, Strictness::All);
    println!("  with escape {bad_escape}: pass = {} (first component ties)", report.pass());

    // Sandwich witnesses along a capability trajectory.
    let trajectory = [v(&[0, 0]), v(&[1, 0]), v(&[1, 1]), v(&[2, 2]), v(&[3, 3])];
    let idx = sandwich_witness(&v(&[0, 0]), &v(&[3, 3]), &trajectory, Strictness::All);
    println!(
        "\ntrajectory {:?}",
        trajectory.iter().map(|p| p.to_string()).collect::<Vec<_>>()
    );
    println!("  first point strictly between [0,0] and [3,3]: index {idx:?}");
}
