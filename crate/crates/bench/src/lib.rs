//! Fixtures shared by the benchmarks.

use vhshift_core::ffield::FieldSpec;
use vhshift_core::vhdatum::{build_quaternionic_datum, VHDatum};

/// The datum for `(τ, σ) = (1, 2)` over `F_p`.
pub fn datum(p: u32) -> VHDatum {
    let f = FieldSpec::new(p, 1).expect("odd prime");
    build_quaternionic_datum(&f, f.from_int(1), f.from_int(2)).expect("valid parameters")
}
