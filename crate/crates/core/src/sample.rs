//! Observation sampling and train/calibration splitting.

use crate::error::{Error, Result};
use crate::mat::{BoolMat, Mat};
use crate::rng::RandomSource;
use rand::Rng;

/// A matrix observed through a boolean mask. Values at unmasked positions
/// are carried (zeroed) but never read by consumers.
#[derive(Clone, Debug)]
pub struct ObservedMatrix {
    pub values: Mat,
    pub mask: BoolMat,
}

impl ObservedMatrix {
    pub fn new(values: Mat, mask: BoolMat) -> Result<Self> {
        if values.dims() != mask.dims() {
            return Err(Error::contract(format!(
                "values {:?} and mask {:?} dimensions differ",
                values.dims(),
                mask.dims()
            )));
        }
        Ok(ObservedMatrix { values, mask })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    pub fn n_observed(&self) -> usize {
        self.mask.count()
    }

    /// Restrict to a sub-mask (e.g. the training half of a split).
    pub fn restricted(&self, mask: &BoolMat) -> ObservedMatrix {
        ObservedMatrix { values: self.values.clone(), mask: mask.clone() }
    }
}

/// Disjoint training/calibration masks partitioning an observation mask.
#[derive(Clone, Debug)]
pub struct MaskSplit {
    pub train_mask: BoolMat,
    pub cal_mask: BoolMat,
    pub split_prob: f64,
}

impl MaskSplit {
    pub fn n_train(&self) -> usize {
        self.train_mask.count()
    }

    pub fn n_cal(&self) -> usize {
        self.cal_mask.count()
    }

    /// The parent observation mask.
    pub fn observed_mask(&self) -> BoolMat {
        self.train_mask.or(&self.cal_mask)
    }

    /// The unobserved complement (the conformal target set).
    pub fn target_mask(&self) -> BoolMat {
        self.observed_mask().not()
    }
}

/// Reveal each entry of `full` independently with probability `probs[i][j]`.
pub fn observe(full: &Mat, probs: &Mat, source: RandomSource) -> Result<ObservedMatrix> {
    if full.dims() != probs.dims() {
        return Err(Error::contract(format!(
            "matrix {:?} and probability {:?} dimensions differ",
            full.dims(),
            probs.dims()
        )));
    }
    let (d1, d2) = full.dims();
    for (r, c, p) in probs.entries() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::contract(format!(
                "observation probability {p} at ({r}, {c}) outside [0, 1]"
            )));
        }
    }
    let mut rng = source.rng();
    let mut mask = BoolMat::falses(d1, d2);
    let mut values = Mat::zeros(d1, d2);
    for r in 0..d1 {
        for c in 0..d2 {
            let u: f64 = rng.random();
            if u < probs.get(r, c) {
                mask.set(r, c, true);
                values.set(r, c, full.get(r, c));
            }
        }
    }
    Ok(ObservedMatrix { values, mask })
}

/// Split the observed entries: each lands in the training mask with
/// probability `q`, otherwise in the calibration mask.
pub fn split_observed(obs: &ObservedMatrix, q: f64, source: RandomSource) -> Result<MaskSplit> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::contract(format!("split probability {q} outside (0, 1)")));
    }
    let (d1, d2) = obs.dims();
    let mut rng = source.rng();
    let mut train = BoolMat::falses(d1, d2);
    let mut cal = BoolMat::falses(d1, d2);
    for r in 0..d1 {
        for c in 0..d2 {
            if !obs.mask.get(r, c) {
                continue;
            }
            let u: f64 = rng.random();
            if u < q {
                train.set(r, c, true);
            } else {
                cal.set(r, c, true);
            }
        }
    }
    Ok(MaskSplit { train_mask: train, cal_mask: cal, split_prob: q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_dims() -> impl Strategy<Value = (usize, usize)> {
        (1usize..8, 1usize..8)
    }

    #[test]
    fn observe_degenerate_probabilities() {
        let full = Mat::from_fn(4, 5, |r, c| (r * 5 + c) as f64);
        let all = observe(&full, &Mat::filled(4, 5, 1.0), RandomSource::new(0, 0)).unwrap();
        assert_eq!(all.n_observed(), 20);
        assert_eq!(all.values, full);
        let none = observe(&full, &Mat::filled(4, 5, 0.0), RandomSource::new(0, 0)).unwrap();
        assert_eq!(none.n_observed(), 0);
    }

    #[test]
    fn observe_dimension_mismatch() {
        let full = Mat::zeros(2, 2);
        let p = Mat::filled(2, 3, 0.5);
        assert!(matches!(
            observe(&full, &p, RandomSource::new(0, 0)),
            Err(crate::Error::Contract(_))
        ));
    }

    #[test]
    fn observe_rejects_bad_probability() {
        let full = Mat::zeros(2, 2);
        let p = Mat::filled(2, 2, 1.5);
        assert!(observe(&full, &p, RandomSource::new(0, 0)).is_err());
    }

    #[test]
    fn observe_is_reproducible() {
        let full = Mat::from_fn(10, 10, |r, c| (r + c) as f64);
        let p = Mat::filled(10, 10, 0.4);
        let a = observe(&full, &p, RandomSource::new(9, 3)).unwrap();
        let b = observe(&full, &p, RandomSource::new(9, 3)).unwrap();
        assert_eq!(a.mask, b.mask);
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn observe_monte_carlo_fraction() {
        // 100x100 grid at p = 0.8 over 500 seeds: the mean observed fraction
        // concentrates around 0.8 (binomial sd of the mean ~ 2e-4).
        let full = Mat::zeros(100, 100);
        let p = Mat::filled(100, 100, 0.8);
        let mut total = 0usize;
        for seed in 0..500u64 {
            total += observe(&full, &p, RandomSource::new(42, seed)).unwrap().n_observed();
        }
        let frac = total as f64 / (500.0 * 10_000.0);
        assert!((frac - 0.8).abs() <= 0.02, "mean observed fraction {frac}");
    }

    #[test]
    fn split_empty_mask_yields_empty_split() {
        let obs = ObservedMatrix::new(Mat::zeros(3, 3), BoolMat::falses(3, 3)).unwrap();
        let split = split_observed(&obs, 0.5, RandomSource::new(0, 0)).unwrap();
        assert_eq!(split.n_train(), 0);
        assert_eq!(split.n_cal(), 0);
    }

    #[test]
    fn split_rejects_degenerate_q() {
        let obs = ObservedMatrix::new(Mat::zeros(2, 2), BoolMat::trues(2, 2)).unwrap();
        assert!(split_observed(&obs, 0.0, RandomSource::new(0, 0)).is_err());
        assert!(split_observed(&obs, 1.0, RandomSource::new(0, 0)).is_err());
    }

    #[test]
    fn split_monte_carlo_train_count() {
        // 60 observed entries at q = 0.5 over 2000 seeds: mean |S_tr| ~= 30.
        let mut mask = BoolMat::falses(10, 10);
        for i in 0..60 {
            mask.set(i / 10, i % 10, true);
        }
        let obs = ObservedMatrix::new(Mat::zeros(10, 10), mask).unwrap();
        let mut total = 0usize;
        for seed in 0..2000u64 {
            total += split_observed(&obs, 0.5, RandomSource::new(7, seed)).unwrap().n_train();
        }
        let mean = total as f64 / 2000.0;
        assert!((mean - 30.0).abs() <= 1.0, "mean train count {mean}");
    }

    proptest! {
        #[test]
        fn split_partitions_observed(
            (d1, d2) in arb_dims(),
            mask_bits in prop::collection::vec(any::<bool>(), 64),
            q in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let mask = BoolMat::from_fn(d1, d2, |r, c| mask_bits[(r * d2 + c) % 64]);
            let obs = ObservedMatrix::new(Mat::zeros(d1, d2), mask.clone()).unwrap();
            let split = split_observed(&obs, q, RandomSource::new(seed, 0)).unwrap();
            prop_assert!(!split.train_mask.and(&split.cal_mask).any());
            prop_assert_eq!(split.observed_mask(), mask);
        }
    }
}
