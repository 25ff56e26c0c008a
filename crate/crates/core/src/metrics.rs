//! Action-level recognition, error and miss rates with a confusion matrix.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classifier::Prediction;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub recognition: f64,
    pub error: f64,
    pub miss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassRates {
    pub class: u32,
    pub samples: usize,
    #[serde(flatten)]
    pub rates: Rates,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classes: Vec<u32>,
    pub per_class: Vec<ClassRates>,
    /// Unweighted mean over classes that have at least one sample.
    pub average: Rates,
    /// Rows: true class. Columns: predicted class in `classes` order, then
    /// background.
    pub confusion: Vec<Vec<usize>>,
    /// Parameters of the run that produced the report.
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// Builds the report from `(true class, predicted label)` pairs.
pub fn compute_metrics(classes: &[u32], decisions: &[(u32, Prediction)]) -> Result<EvalReport> {
    if decisions.is_empty() {
        return Err(Error::Parameter("no decisions to evaluate".into()));
    }
    let m = classes.len();
    let index = |c: u32| {
        classes
            .iter()
            .position(|&k| k == c)
            .ok_or(Error::UnknownLabel(c))
    };
    let mut confusion = vec![vec![0usize; m + 1]; m];
    for &(truth, predicted) in decisions {
        let row = index(truth)?;
        let col = match predicted {
            Prediction::Class(c) => index(c)?,
            Prediction::Background => m,
        };
        confusion[row][col] += 1;
    }
    let per_class: Vec<ClassRates> = classes
        .iter()
        .enumerate()
        .map(|(i, &class)| rates_from_row(class, i, &confusion[i]))
        .collect();
    let present: Vec<&ClassRates> = per_class.iter().filter(|c| c.samples > 0).collect();
    let k = present.len() as f64;
    let average = Rates {
        recognition: present.iter().map(|c| c.rates.recognition).sum::<f64>() / k,
        error: present.iter().map(|c| c.rates.error).sum::<f64>() / k,
        miss: present.iter().map(|c| c.rates.miss).sum::<f64>() / k,
    };
    Ok(EvalReport {
        classes: classes.to_vec(),
        per_class,
        average,
        confusion,
        metadata: BTreeMap::new(),
    })
}

fn rates_from_row(class: u32, index: usize, row: &[usize]) -> ClassRates {
    let samples: usize = row.iter().sum();
    let background = row[row.len() - 1];
    let correct = row[index];
    let wrong = samples - correct - background;
    let n = samples.max(1) as f64;
    ClassRates {
        class,
        samples,
        rates: Rates {
            recognition: correct as f64 / n,
            error: wrong as f64 / n,
            miss: background as f64 / n,
        },
    }
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text table of per-class rates, averages, the run parameters
    /// and the confusion matrix.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:>8}  {:>7}  {:>11}  {:>10}  {:>9}",
            "class", "samples", "recognition", "error", "miss"
        )
        .unwrap();
        for c in &self.per_class {
            writeln!(
                out,
                "{:>8}  {:>7}  {:>11.2}  {:>10.2}  {:>9.2}",
                format!("B{}", c.class),
                c.samples,
                c.rates.recognition,
                c.rates.error,
                c.rates.miss
            )
            .unwrap();
        }
        writeln!(
            out,
            "{:>8}  {:>7}  {:>11.2}  {:>10.2}  {:>9.2}",
            "Avg.",
            self.per_class.iter().map(|c| c.samples).sum::<usize>(),
            self.average.recognition,
            self.average.error,
            self.average.miss
        )
        .unwrap();
        if !self.metadata.is_empty() {
            writeln!(out, "\nparameters:").unwrap();
            for (k, v) in &self.metadata {
                writeln!(out, "  {k} = {v}").unwrap();
            }
        }
        writeln!(
            out,
            "\nconfusion (rows: true, columns: predicted, last: background)"
        )
        .unwrap();
        write!(out, "{:>8}", "").unwrap();
        for c in &self.classes {
            write!(out, " {:>5}", format!("B{c}")).unwrap();
        }
        writeln!(out, " {:>5}", "bg").unwrap();
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            write!(out, "{:>8}", format!("B{c}")).unwrap();
            for v in row {
                write!(out, " {v:>5}").unwrap();
            }
            writeln!(out).unwrap();
        }
        out
    }

    /// Confusion matrix as CSV with a header row.
    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("true");
        for c in &self.classes {
            write!(out, ",{c}").unwrap();
        }
        out.push_str(",background\n");
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            write!(out, "{c}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_class_split_of_outcomes() {
        let mut d = vec![(1, Prediction::Class(1)); 7];
        d.extend([(1, Prediction::Class(2)); 2]);
        d.push((1, Prediction::Background));
        let r = compute_metrics(&[1, 2], &d).unwrap();
        let c = &r.per_class[0];
        assert_eq!(c.samples, 10);
        assert!((c.rates.recognition - 0.7).abs() < 1e-15);
        assert!((c.rates.error - 0.2).abs() < 1e-15);
        assert!((c.rates.miss - 0.1).abs() < 1e-15);
        assert_eq!(r.confusion[0], vec![7, 2, 1]);
        // class 2 has no samples and is left out of the average
        assert_eq!(r.average, c.rates);
    }

    #[test]
    fn average_is_unweighted_class_mean() {
        let mut d = vec![(1, Prediction::Class(1)); 10];
        d.extend([(2, Prediction::Class(2)); 7]);
        d.extend([(2, Prediction::Class(1)); 17]);
        d.push((2, Prediction::Background));
        let r = compute_metrics(&[1, 2], &d).unwrap();
        assert!((r.per_class[1].rates.recognition - 0.28).abs() < 1e-12);
        assert!((r.average.recognition - 0.64).abs() < 1e-12);
        assert!((r.average.error - 0.34).abs() < 1e-12);
        assert!((r.average.miss - 0.02).abs() < 1e-12);
        for (row, c) in r.confusion.iter().zip(&r.per_class) {
            assert_eq!(row.iter().sum::<usize>(), c.samples);
        }
    }

    #[test]
    fn all_correct() {
        let d: Vec<_> = (0..5).map(|_| (3, Prediction::Class(3))).collect();
        let r = compute_metrics(&[3], &d).unwrap();
        assert_eq!(
            r.average,
            Rates {
                recognition: 1.0,
                error: 0.0,
                miss: 0.0
            }
        );
    }

    #[test]
    fn unknown_label_rejected() {
        assert!(matches!(
            compute_metrics(&[1, 2], &[(1, Prediction::Class(5))]),
            Err(Error::UnknownLabel(5))
        ));
        assert!(compute_metrics(&[1, 2], &[]).is_err());
    }

    #[test]
    fn table_and_csv_shapes() {
        let r = compute_metrics(
            &[1, 2],
            &[(1, Prediction::Class(1)), (2, Prediction::Background)],
        )
        .unwrap();
        assert!(r.to_table().contains("Avg."));
        assert_eq!(r.confusion_csv(), "true,1,2,background\n1,1,0,0\n2,0,0,1\n");
    }
}
