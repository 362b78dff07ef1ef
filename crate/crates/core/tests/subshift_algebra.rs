use num_rational::BigRational;
use num_traits::One;

use vhshift_core::ffield::FieldSpec;
use vhshift_core::subshift::{
    build_wang, build_xd, mixing_table, non_extendable_example, CylinderSpec, Direction,
    MatrixSubshift,
};
use vhshift_core::vhdatum::{build_quaternionic_datum, VHDatum};
use vhshift_core::IntMatrix;

fn xd(p: u32) -> MatrixSubshift {
    let f = FieldSpec::new(p, 1).unwrap();
    build_xd(&build_quaternionic_datum(&f, f.from_int(1), f.from_int(2)).unwrap()).unwrap()
}

#[test]
fn three_characterisations_agree() {
    let cases = [
        xd(3),
        xd(5),
        non_extendable_example(),
        build_wang(&VHDatum::free_product_example()).unwrap(),
        build_xd(&VHDatum::free_product_example()).unwrap(),
    ];
    for (i, x) in cases.iter().enumerate() {
        assert!(x.regularity_report().three_way_agreement(), "case {i}");
    }
    let r5 = xd(5).regularity_report();
    assert_eq!(r5.d_regular, Some(5));
    assert!(r5.uniquely_extendable && r5.commute_exactly == Some(true));
}

#[test]
fn pattern_counts_follow_the_formula() {
    let x = xd(3);
    for (m, n) in [(1, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (1, 4)] {
        let expect = 16 * 3u64.pow(m - 1) * 3u64.pow(n - 1);
        assert_eq!(
            x.pattern_count(m as usize, n as usize).unwrap(),
            expect,
            "({m},{n})"
        );
    }
}

/// `log N(n,n) / n²` decreases on `n = 1..3`.
#[test]
fn entropy_signature_decreases() {
    for x in [xd(3), build_xd(&VHDatum::free_product_example()).unwrap()] {
        let h: Vec<f64> = (1..=3)
            .map(|n| (x.pattern_count(n, n).unwrap() as f64).ln() / (n * n) as f64)
            .collect();
        assert!(h[0] > h[1] && h[1] > h[2], "{h:?}");
    }
}

#[test]
fn measures_partition_every_shape() {
    let x = xd(3);
    for (m, n) in [(1, 1), (2, 2), (3, 2), (2, 3)] {
        let total: BigRational = x
            .patterns(m, n)
            .unwrap()
            .into_iter()
            .map(|p| {
                x.cylinder_measure(&CylinderSpec::at_origin(p))
                    .unwrap()
                    .value
            })
            .sum();
        assert!(total.is_one(), "({m},{n})");
    }
}

#[test]
fn vertical_correlations_use_the_other_axis() {
    let x = xd(3);
    let cols = x.patterns(1, 1).unwrap();
    let (c, d) = (
        CylinderSpec::at_origin(cols[1].clone()),
        CylinderSpec::at_origin(cols[6].clone()),
    );
    let h = x.correlation(&c, &d, 4, Direction::Horizontal).unwrap();
    let v = x.correlation(&c, &d, 4, Direction::Vertical).unwrap();
    assert_eq!(h.product, v.product);
    // Both deviations decay; they need not coincide.
    assert!(h.deviation < h.product && v.deviation < v.product);
}

#[test]
fn description_json() {
    let x = non_extendable_example();
    let j = x.to_json();
    assert_eq!(j["s"], 4);
    assert_eq!(j["d"], 2);
    assert_eq!(j["A"].as_array().unwrap().len(), 8);
    let one_d = MatrixSubshift::new(IntMatrix::ones(2), None).unwrap();
    assert!(one_d.to_json()["B"].is_null());
}

#[test]
fn mixing_envelopes_hold() {
    let f3 = FieldSpec::new(3, 1).unwrap();
    let d3 = build_quaternionic_datum(&f3, f3.from_int(1), f3.from_int(2)).unwrap();
    let t = mixing_table(&d3, 2, 20, 500).unwrap();
    assert!(t.all_ok());
    assert_eq!(t.rows.len(), 20);
    assert_eq!(t.metadata_json()["sqrt_d"], 3f64.sqrt());
    for r in &t.rows {
        let back = vhshift_core::spectral::rational_to_f64(&r.deviation);
        assert!((back - r.deviation_float).abs() <= 1e-12 * back.abs());
    }
}
