//! Shared fixtures for the criterion benchmarks.

use exponent_lab::generators::{gen_gasket, gen_gff_lattice, gen_lattice};
use exponent_lab::Network;

/// Level-7 gasket, about 3.3k vertices.
pub fn gasket() -> Network {
    gen_gasket(7).expect("gasket")
}

/// 129×129 box of Z².
pub fn grid() -> Network {
    gen_lattice(2, 64).expect("grid")
}

/// GFF-weighted 129×129 box at γ = 1.
pub fn gff() -> Network {
    gen_gff_lattice(64, 1.0, 3).expect("gff")
}
