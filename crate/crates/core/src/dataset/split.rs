use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Anything that can be assigned to a side of a split.
pub trait SplitKey {
    fn subject(&self) -> u32;
    fn action(&self) -> u32;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SplitSpec {
    /// Subjects listed train; everyone else tests.
    CrossSubject { train_subjects: BTreeSet<u32> },
    /// Per-class seeded shuffle, `fraction` of each class to training.
    Random { fraction: f64, seed: u64 },
}

impl SplitSpec {
    /// Odd subjects train, even subjects test.
    pub fn odd_even(subjects: impl IntoIterator<Item = u32>) -> Self {
        SplitSpec::CrossSubject {
            train_subjects: subjects.into_iter().filter(|s| s % 2 == 1).collect(),
        }
    }
}

/// Partitions `items` into (train, test), preserving input order on each side.
pub fn make_split<T: SplitKey + Clone>(items: &[T], spec: &SplitSpec) -> Result<(Vec<T>, Vec<T>)> {
    let mut train_mask = vec![false; items.len()];
    match spec {
        SplitSpec::CrossSubject { train_subjects } => {
            for (m, item) in train_mask.iter_mut().zip(items) {
                *m = train_subjects.contains(&item.subject());
            }
        }
        SplitSpec::Random { fraction, seed } => {
            if !(*fraction > 0.0 && *fraction < 1.0) {
                return Err(Error::Split(format!(
                    "fraction must be in (0, 1), got {fraction}"
                )));
            }
            let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (i, item) in items.iter().enumerate() {
                by_class.entry(item.action()).or_default().push(i);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for members in by_class.values_mut() {
                members.shuffle(&mut rng);
                let n_train = (fraction * members.len() as f64).round() as usize;
                for &i in &members[..n_train] {
                    train_mask[i] = true;
                }
            }
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (item, &is_train) in items.iter().zip(&train_mask) {
        if is_train {
            train.push(item.clone());
        } else {
            test.push(item.clone());
        }
    }
    if train.is_empty() {
        return Err(Error::Split("training side is empty".into()));
    }
    if test.is_empty() {
        return Err(Error::Split("test side is empty".into()));
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    struct Item(u32, u32);

    impl SplitKey for Item {
        fn subject(&self) -> u32 {
            self.1
        }
        fn action(&self) -> u32 {
            self.0
        }
    }

    fn items() -> Vec<Item> {
        (1..=4)
            .flat_map(|a| (1..=6).map(move |s| Item(a, s)))
            .collect()
    }

    #[test]
    fn cross_subject_partitions_by_subject() {
        let spec = SplitSpec::odd_even(1..=6);
        let (train, test) = make_split(&items(), &spec).unwrap();
        assert!(train.iter().all(|i| i.1 % 2 == 1));
        assert!(test.iter().all(|i| i.1 % 2 == 0));
        assert_eq!(train.len() + test.len(), 24);
    }

    #[test]
    fn empty_side_rejected() {
        let all = SplitSpec::CrossSubject {
            train_subjects: (1..=6).collect(),
        };
        assert!(matches!(make_split(&items(), &all), Err(Error::Split(_))));
        let none = SplitSpec::CrossSubject {
            train_subjects: BTreeSet::new(),
        };
        assert!(make_split(&items(), &none).is_err());
    }

    #[test]
    fn random_split_is_stratified_and_deterministic() {
        let spec = SplitSpec::Random {
            fraction: 0.5,
            seed: 7,
        };
        let a = make_split(&items(), &spec).unwrap();
        let b = make_split(&items(), &spec).unwrap();
        assert_eq!(a, b);
        for class in 1..=4 {
            assert_eq!(a.0.iter().filter(|i| i.0 == class).count(), 3);
        }
        assert!(make_split(
            &items(),
            &SplitSpec::Random {
                fraction: 1.0,
                seed: 0
            }
        )
        .is_err());
    }
}
