use pcadca::ingest::{self, detect_segments, Columns, RawTable, SegmentMap};
use proptest::prelude::*;

fn table(ts: Vec<f64>, values: Vec<f64>) -> RawTable {
    RawTable::new(ts, Columns::new(vec!["a".into()], vec![values]).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn once_per_second_is_identity(values in prop::collection::vec(-1e3f64..1e3, 1..60), jitter in 0.0f64..999.0) {
        let ts: Vec<f64> = (0..values.len()).map(|s| s as f64 * 1000.0 + jitter).collect();
        let r = ingest::resample_average(&table(ts, values.clone()));
        prop_assert_eq!(r.columns.get("a").unwrap(), values.as_slice());
        prop_assert_eq!(r.len(), values.len());
    }

    #[test]
    fn averaging_is_contractive(
        gaps in prop::collection::vec(0.0f64..700.0, 2..200),
        values in prop::collection::vec(-50.0f64..50.0, 200),
    ) {
        let mut t = 0.0;
        let ts: Vec<f64> = gaps.iter().map(|g| { t += g; t }).collect();
        let values = values[..ts.len()].to_vec();
        let r = ingest::resample_average(&table(ts, values.clone()));
        let out = r.columns.get("a").unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(out.iter().all(|v| *v >= lo - 1e-9 && *v <= hi + 1e-9));
        prop_assert!(r.source_seconds.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn constant_column_statistics(x in -1e6f64..1e6, n in 2usize..50) {
        let s = ingest::describe("c", &vec![x; n]).unwrap();
        prop_assert_eq!(s.stdev, 0.0);
        prop_assert_eq!((s.min, s.max, s.median, s.mean), (x, x, x, x));
    }

    #[test]
    fn statistics_are_ordered(values in prop::collection::vec(-1e3f64..1e3, 2..60)) {
        let s = ingest::describe("c", &values).unwrap();
        prop_assert!(s.min <= s.median && s.median <= s.max);
        prop_assert!(s.min <= s.mean && s.mean <= s.max);
        prop_assert!(s.stdev >= 0.0);
    }

    #[test]
    fn segments_tile_the_timeline(len in 2usize..300, cuts in prop::collection::btree_set(1usize..300, 0..10)) {
        let b: Vec<usize> = cuts.into_iter().filter(|c| *c < len).collect();
        let map = SegmentMap::from_boundaries(len, b).unwrap();
        let mut covered = vec![0u32; len];
        for r in map.segments() {
            prop_assert!(!r.is_empty());
            for i in r {
                covered[i] += 1;
            }
        }
        prop_assert!(covered.iter().all(|c| *c == 1));
    }

    #[test]
    fn detected_boundaries_are_spaced_peaks(
        noise in prop::collection::vec(0.0f64..1.0, 120),
        n in 2usize..6,
    ) {
        let mut m = noise;
        let step = m.len() / n;
        for i in 1..n {
            m[i * step] = 10.0 + i as f64;
        }
        let map = detect_segments(&m, n).unwrap();
        let want: Vec<usize> = (1..n).map(|i| i * step).collect();
        prop_assert_eq!(map.boundaries(), want.as_slice());
    }
}
