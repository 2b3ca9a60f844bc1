use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Annealing schedule `(s, A(s), B(s))` with piecewise-linear interpolation.
///
/// `A` multiplies the driver `−Σσˣ` and `B` the problem Hamiltonian; both are
/// energies in units of h·GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    samples: Vec<(f64, f64, f64)>,
}

impl Schedule {
    /// Validates and wraps samples. Rows are numbered from 1 in errors.
    pub fn new(samples: Vec<(f64, f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Schedule {
                row: samples.len(),
                reason: "a schedule needs at least two rows".into(),
            });
        }
        for (k, &(s, a, b)) in samples.iter().enumerate() {
            let row = k + 1;
            if !(s.is_finite() && a.is_finite() && b.is_finite()) {
                return Err(Error::Schedule {
                    row,
                    reason: "non-finite value".into(),
                });
            }
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::Schedule {
                    row,
                    reason: format!("s = {s} outside [0, 1]"),
                });
            }
            if a < 0.0 || b < 0.0 {
                return Err(Error::Schedule {
                    row,
                    reason: "A and B must be nonnegative".into(),
                });
            }
            if k > 0 {
                let (sp, ap, bp) = samples[k - 1];
                if s <= sp {
                    return Err(Error::Schedule {
                        row,
                        reason: format!("s = {s} is not strictly increasing"),
                    });
                }
                if a > ap {
                    return Err(Error::Schedule {
                        row,
                        reason: format!("A increases from {ap} to {a}"),
                    });
                }
                if b < bp {
                    return Err(Error::Schedule {
                        row,
                        reason: format!("B decreases from {bp} to {b}"),
                    });
                }
            }
        }
        if samples[0].0 != 0.0 {
            return Err(Error::Schedule {
                row: 1,
                reason: "schedule must start at s = 0".into(),
            });
        }
        if samples[samples.len() - 1].0 != 1.0 {
            return Err(Error::Schedule {
                row: samples.len(),
                reason: "schedule must end at s = 1".into(),
            });
        }
        Ok(Schedule { samples })
    }

    /// Linear schedule `A = a0 (1 − s)`, `B = b0 s`.
    pub fn linear(a0: f64, b0: f64) -> Self {
        Schedule {
            samples: vec![(0.0, a0, 0.0), (1.0, 0.0, b0)],
        }
    }

    pub fn samples(&self) -> &[(f64, f64, f64)] {
        &self.samples
    }

    /// `(A(s), B(s))`; `s` is clamped to `[0, 1]`.
    pub fn at(&self, s: f64) -> (f64, f64) {
        let s = s.clamp(0.0, 1.0);
        let k = self
            .samples
            .partition_point(|row| row.0 <= s)
            .clamp(1, self.samples.len() - 1);
        let (s0, a0, b0) = self.samples[k - 1];
        let (s1, a1, b1) = self.samples[k];
        let t = (s - s0) / (s1 - s0);
        (a0 + t * (a1 - a0), b0 + t * (b1 - b0))
    }

    /// Parses CSV with header `s,A,B`.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names != ["s", "A", "B"] {
            return Err(Error::Schedule {
                row: 0,
                reason: format!("expected header s,A,B, found {}", names.join(",")),
            });
        }
        let mut samples = Vec::new();
        for (k, record) in rdr.records().enumerate() {
            let row = k + 1;
            let record = record?;
            if record.len() != 3 {
                return Err(Error::Schedule {
                    row,
                    reason: format!("expected 3 columns, found {}", record.len()),
                });
            }
            let mut vals = [0.0; 3];
            for (v, field) in vals.iter_mut().zip(record.iter()) {
                *v = field.parse().map_err(|_| Error::Schedule {
                    row,
                    reason: format!("cannot parse {field:?} as a number"),
                })?;
            }
            samples.push((vals[0], vals[1], vals[2]));
        }
        Schedule::new(samples)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,A,B\n");
        for (s, a, b) in &self.samples {
            out.push_str(&format!("{s},{a},{b}\n"));
        }
        out
    }
}

impl Default for Schedule {
    fn default() -> Self {
        default_schedule()
    }
}

/// `A(s) = 1 − s`, `B(s) = s` in h·GHz.
pub fn default_schedule() -> Schedule {
    Schedule::linear(1.0, 1.0)
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<Schedule> {
    let file = std::fs::File::open(path)?;
    Schedule::from_csv(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_endpoints_and_midpoint() {
        let s = default_schedule();
        assert_eq!(s.at(0.0), (1.0, 0.0));
        assert_eq!(s.at(1.0), (0.0, 1.0));
        assert_eq!(s.at(0.5), (0.5, 0.5));
    }

    #[test]
    fn interpolates_between_rows() {
        let s = Schedule::new(vec![(0.0, 4.0, 0.0), (0.5, 2.0, 1.0), (1.0, 0.0, 5.0)]).unwrap();
        let (a, b) = s.at(0.75);
        assert!((a - 1.0).abs() < 1e-12);
        assert!((b - 3.0).abs() < 1e-12);
        assert_eq!(s.at(0.5), (2.0, 1.0));
    }

    #[test]
    fn decreasing_b_is_rejected_with_row() {
        let csv = "s,A,B\n0,1,0\n0.5,0.5,0.6\n1,0,0.4\n";
        match Schedule::from_csv(csv.as_bytes()) {
            Err(Error::Schedule { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coverage_is_required() {
        assert!(Schedule::new(vec![(0.0, 1.0, 0.0), (0.9, 0.0, 1.0)]).is_err());
        assert!(Schedule::new(vec![(0.1, 1.0, 0.0), (1.0, 0.0, 1.0)]).is_err());
        assert!(Schedule::new(vec![(0.0, 1.0, 0.0), (0.0, 1.0, 0.0), (1.0, 0.0, 1.0)]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = Schedule::new(vec![(0.0, 3.5, 0.1), (0.25, 1.0, 0.2), (1.0, 0.0, 9.0)]).unwrap();
        assert_eq!(Schedule::from_csv(s.to_csv().as_bytes()).unwrap(), s);
    }

    #[test]
    fn bad_header() {
        assert!(Schedule::from_csv("t,A,B\n0,1,0\n1,0,1\n".as_bytes()).is_err());
    }
}
