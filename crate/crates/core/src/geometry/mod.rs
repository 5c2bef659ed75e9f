//! Lines through the origin of `Z(d) x Z(d)`, the symplectic group
//! `Sp(2, Z(d))`, and the maximal-line catalog for `d = d1 d2`.

mod catalog;
mod line;
mod symplectic;

use num_rational::Ratio;

use crate::zring::{dedekind_psi, Modulus};

pub use catalog::{
    catalog_index, catalog_order, classify_line_pair, factorize_line, join_components,
    matrix_factorize, pair_census, partition_factor_pairs, partition_s, primitive_generator,
    symplectic_label, CatalogEntry, FactorIndex, LineFactors, LinePairCensus, LinePairClass,
    MaximalLineCatalog, SharedComponent,
};
pub use line::{compare_lines, intersection, lines_through_origin, Line, LineRelation, Point};
pub use symplectic::{enumerate_group, SymplecticMatrix};

/// Deviation from a near-linear geometry: `psi(d) / (d + 1) - 1`.
pub fn redundancy(m: &Modulus) -> Ratio<i64> {
    Ratio::new(dedekind_psi(m) as i64, m.value() as i64 + 1) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn redundancy_values() {
        let r = |d| redundancy(&Modulus::new(d).unwrap());
        assert_eq!(r(15), Ratio::new(1, 2));
        assert_eq!(r(21), Ratio::new(5, 11));
        for p in [2, 3, 5, 7, 11, 13] {
            assert_eq!(r(p), Ratio::from_integer(0));
        }
    }
}
