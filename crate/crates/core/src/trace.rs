use serde::{Deserialize, Serialize};

/// One iteration of a run: iteration index, measurements spent so far, and
/// the true error `|f(x_k) - f*|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub measurements: u64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ThresholdReached,
    MaxIterations,
    Diverged,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateTrace {
    pub replication: u64,
    pub records: Vec<TraceRecord>,
    /// Last finite iterate.
    pub final_x: Vec<f64>,
    pub termination: Termination,
}

impl IterateTrace {
    pub fn new(replication: u64) -> Self {
        IterateTrace {
            replication,
            records: Vec::new(),
            final_x: Vec::new(),
            termination: Termination::MaxIterations,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn iterations(&self) -> u64 {
        self.records.last().map_or(0, |r| r.iteration)
    }

    /// Measurements spent when the error first dropped to `threshold` or
    /// below; `None` if it never did.
    pub fn measurements_to_threshold(&self, threshold: f64) -> Option<u64> {
        self.records
            .iter()
            .find(|r| r.error <= threshold)
            .map(|r| r.measurements)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(errors: &[f64], cost: u64) -> IterateTrace {
        let mut t = IterateTrace::new(0);
        for (k, e) in errors.iter().enumerate() {
            t.records.push(TraceRecord {
                iteration: k as u64,
                measurements: k as u64 * cost,
                error: *e,
            });
        }
        t
    }

    #[test]
    fn threshold_crossings() {
        let t = synthetic(&[0.0, 1.0], 2);
        assert_eq!(t.measurements_to_threshold(0.01), Some(0));

        let errors: Vec<f64> = (0..12).map(|k| 1.0 / (1 << k) as f64).collect();
        // 2^-7 = 0.0078 is the first value <= 0.01, at record 7
        let t = synthetic(&errors, 2);
        assert_eq!(t.measurements_to_threshold(0.01), Some(14));
        assert_eq!(t.measurements_to_threshold(1e-9), None);
    }
}
