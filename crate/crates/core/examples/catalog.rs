//! Lists the certified problem catalog with its spectral data and step bounds.

use vanishdamp::problems::catalog;

fn main() {
    println!("{:<20} {:>4} {:>10} {:>10} {:>10} {:>10}  tags", "id", "dim", "‖A‖", "min φ", "E(0)", "h_max");
    for p in catalog() {
        let tags: Vec<String> = p.notes.iter().map(|t| t.to_string()).collect();
        println!(
            "{:<20} {:>4} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}  {}",
            p.id,
            p.dim(),
            p.op().norm(),
            p.certified.min_phi(),
            p.initial_energy(),
            p.h_max().unwrap_or(f64::NAN),
            tags.join(",")
        );
        let flat = p.certified.argmin_basis();
        if !flat.is_empty() {
            println!("{:<20} minimizer set has {} flat direction(s)", "", flat.len());
        }
    }
}
