//! Deterministic synthetic classification data for environments without the
//! benchmark LIBSVM files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdcons::objective::{DataPoint, Dataset};

use crate::Result;

/// Linearly separable-ish binary data with label noise: features uniform in
/// `[-1, 1]`, labels from the sign of a hidden linear score plus noise.
pub fn synthetic_classification(points: usize, dim: usize, seed: u64) -> Dataset<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let data: Vec<DataPoint<f64>> = (0..points)
        .map(|_| {
            let features: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let score: f64 =
                features.iter().zip(&hidden).map(|(&u, &w)| u * w).sum::<f64>();
            let noise: f64 = rng.random_range(-0.3..0.3);
            let label = if score + noise >= 0.0 { 1.0 } else { -1.0 };
            DataPoint { features, label }
        })
        .collect();
    Dataset::new(data).expect("synthetic labels are valid")
}

/// Write a dataset in LIBSVM text format (1-based indices, zeros omitted).
pub fn write_libsvm(path: &Path, data: &Dataset<f64>) -> Result<()> {
    let mut out = String::new();
    for p in data.points() {
        let label = if p.label > 0.0 { "1" } else { "-1" };
        out.push_str(label);
        for (i, &v) in p.features.iter().enumerate() {
            if v != 0.0 {
                write!(out, " {}:{}", i + 1, v).expect("string write");
            }
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdcons::objective::parse_libsvm;

    #[test]
    fn generation_is_deterministic() {
        let a = synthetic_classification(50, 4, 9);
        let b = synthetic_classification(50, 4, 9);
        for (pa, pb) in a.points().iter().zip(b.points()) {
            assert_eq!(pa.features, pb.features);
            assert_eq!(pa.label, pb.label);
        }
    }

    #[test]
    fn both_classes_are_present() {
        let d = synthetic_classification(200, 6, 1);
        let pos = d.points().iter().filter(|p| p.label > 0.0).count();
        assert!(pos > 20 && pos < 180, "degenerate class balance: {pos}/200");
    }

    #[test]
    fn libsvm_round_trip_preserves_the_data() {
        let d = synthetic_classification(30, 3, 5);
        let tmp = std::env::temp_dir().join("pdcons_synth_roundtrip.libsvm");
        write_libsvm(&tmp, &d).unwrap();
        let text = std::fs::read_to_string(&tmp).unwrap();
        let back: Dataset<f64> = parse_libsvm(&text).unwrap();
        std::fs::remove_file(&tmp).ok();
        assert_eq!(back.len(), d.len());
        for (pa, pb) in back.points().iter().zip(d.points()) {
            assert_eq!(pa.label, pb.label);
            for (&fa, &fb) in pa.features.iter().zip(&pb.features) {
                assert!((fa - fb).abs() < 1e-12);
            }
        }
    }
}
