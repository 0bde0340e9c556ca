use proptest::prelude::*;
use qmlkit::dataset::{read_table, LabeledDataset};
use qmlkit::encode::FeatureVector;

fn dataset() -> impl Strategy<Value = LabeledDataset> {
    (1usize..5, 1usize..20).prop_flat_map(|(dim, rows)| {
        (
            proptest::collection::vec(proptest::collection::vec(-1e12f64..1e12, dim), rows),
            proptest::collection::vec(0usize..3, rows),
        )
            .prop_map(move |(vals, labels)| {
                let names = (0..dim).map(|j| format!("f{j}")).collect();
                let vectors = vals.into_iter().map(|v| FeatureVector::new(v).unwrap()).collect();
                LabeledDataset::new(names, vectors, labels, 3).unwrap()
            })
    })
}

proptest! {
    #[test]
    fn csv_roundtrip_preserves_fifteen_digits(data in dataset()) {
        let mut buf = Vec::new();
        data.write_csv(&mut buf).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.feature_names, &data.feature_names);
        let labels: Vec<usize> = back.labels.iter().map(|l| l.unwrap()).collect();
        prop_assert_eq!(labels, data.labels.clone());
        for (a, b) in back.vectors.iter().zip(&data.vectors) {
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert_eq!(format!("{x:.14e}"), format!("{y:.14e}"));
            }
        }
    }
}
