use indexmap::IndexMap;
use proptest::prelude::*;
use texharm_core::io::{read_image, read_mask, write_mask, write_pgm, write_sidecar};
use texharm_core::{DivergenceReport, FeatureRow, FeatureTable, FilterBank, GrayImage, RoiMask};

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, any::<f64>().prop_filter("finite", |v| v.is_finite()),]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_csv_roundtrip_is_bit_identical(
        rows in prop::collection::vec(
            (prop::option::of(0u8..2), prop::option::of(prop_oneof![Just("ED"), Just("ES")]),
             prop::collection::vec(finite_f64(), 3)),
            0..12),
    ) {
        let names: Vec<String> = ["glcm_Contrast", "firstorder_Mean", "ngtdm_Busyness"]
            .iter().map(|s| s.to_string()).collect();
        let rows: Vec<FeatureRow> = rows.into_iter().enumerate().map(|(i, (label, phase, values))| FeatureRow {
            case_id: format!("case,{i}"),
            cohort: if i % 2 == 0 { "GE".into() } else { "Philips \"P\"".into() },
            class_label: label,
            phase: phase.map(str::to_string),
            values,
        }).collect();
        let table = FeatureTable::new(names, rows).unwrap();
        let text = table.to_csv_string().unwrap();
        let back = FeatureTable::read_csv_from(text.as_bytes()).unwrap();
        prop_assert_eq!(back.rows().len(), table.rows().len());
        for (a, b) in table.rows().iter().zip(back.rows()) {
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a.values), bits(&b.values));
        }
        prop_assert_eq!(back, table);
    }

    #[test]
    fn report_json_roundtrip_is_bit_identical(values in prop::collection::vec(0.0f64..10.0, 1..40)) {
        let map: IndexMap<String, f64> = values.iter().enumerate()
            .map(|(i, v)| (format!("f{i}"), *v)).collect();
        let report = DivergenceReport::new("paper_jsd", "GE", "Philips", 15, 1e-10, map).unwrap();
        let back = DivergenceReport::from_json(&report.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.mean.to_bits(), report.mean.to_bits());
        prop_assert_eq!(back, report);
    }

    #[test]
    fn bank_manifest_roundtrip_is_bit_identical(
        n in 1usize..5, k in 1usize..5, seed in any::<u32>(),
    ) {
        let weights: Vec<f32> = (0..n * k * k)
            .map(|i| f32::from_bits((seed.wrapping_mul(2654435761).wrapping_add(i as u32 * 40503)) % 0x7f00_0000))
            .collect();
        let biases: Vec<f32> = (0..n).map(|i| (i as f32 - 1.5) / 3.0).collect();
        let bank = FilterBank::new(n, k, weights, biases, "unit-test").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bank.json");
        bank.save(&path).unwrap();
        prop_assert_eq!(FilterBank::load(&path).unwrap(), bank);
    }

    #[test]
    fn image_and_mask_files_roundtrip(
        w in 1usize..20, h in 1usize..20, seed in any::<u64>(),
    ) {
        let px = |r: usize, c: usize| (seed.wrapping_mul(r as u64 * 31 + c as u64 + 7) >> 7) % 256;
        let raw = GrayImage::from_fn(w, h, |r, c| px(r, c) as f64).unwrap();
        let real = GrayImage::from_fn(w, h, |r, c| f64::from(px(r, c) as f32 / 7.0 - 3.25)).unwrap();
        let mask = RoiMask::from_fn(w, h, |r, c| px(r, c) % 3 == 0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_pgm(&raw, dir.path().join("a.pgm")).unwrap();
        write_sidecar(&real, dir.path().join("a.txh")).unwrap();
        write_mask(&mask, dir.path().join("m.pgm")).unwrap();
        prop_assert_eq!(read_image(dir.path().join("a.pgm")).unwrap(), raw);
        prop_assert_eq!(read_image(dir.path().join("a.txh")).unwrap(), real);
        prop_assert_eq!(read_mask(dir.path().join("m.pgm")).unwrap(), mask);
    }
}

#[test]
fn png_grayscale_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.png");
    let buf = image::GrayImage::from_fn(5, 3, |x, y| image::Luma([(x * 40 + y) as u8]));
    buf.save(&path).unwrap();
    let img = read_image(&path).unwrap();
    assert_eq!((img.width(), img.height()), (5, 3));
    assert_eq!(img.get(2, 4), 162.0);
}
