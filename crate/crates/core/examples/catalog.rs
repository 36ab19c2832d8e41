//! List the catalog, then instantiate each ansatz under a random frame.

use wavereduce::catalog::{get_entry, list_entries, CatalogEntry};
use wavereduce::minkowski::random_frame;

fn main() -> wavereduce::Result<()> {
    let frame = random_frame(3, 7)?;
    println!("frame:\n{}", frame.to_text());
    for e in list_entries() {
        println!("{:<24} {:<8} {}", e.id, e.kind, e.summary);
        if let CatalogEntry::Ansatz(a) = get_entry(e.id, Some(&frame), None)? {
            println!("    y = {}\n    z = {}\n    {}", a.pair.y, a.pair.z, a.reduced_equation(None));
        }
    }
    Ok(())
}
