//! Order-fixed ensemble statistics.

use serde::{Deserialize, Serialize};

use crate::real::Real;

/// Mean and standard error of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary<T> {
    pub mean: T,
    pub stderr: T,
    pub n: usize,
}

/// Neumaier-compensated sum, evaluated in slice order.
pub fn compensated_sum<T: Real>(values: &[T]) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp = comp + ((sum - t) + v);
        } else {
            comp = comp + ((v - t) + sum);
        }
        sum = t;
    }
    sum + comp
}

/// Mean and standard error (sample standard deviation / √n).
pub fn summarize<T: Real>(values: &[T]) -> Summary<T> {
    let n = values.len();
    if n == 0 {
        return Summary {
            mean: T::nan(),
            stderr: T::nan(),
            n,
        };
    }
    let nt = T::from_usize_lossy(n);
    let mean = compensated_sum(values) / nt;
    if n == 1 {
        return Summary {
            mean,
            stderr: T::zero(),
            n,
        };
    }
    let sq: Vec<T> = values.iter().map(|v| (*v - mean) * (*v - mean)).collect();
    let var = compensated_sum(&sq) / T::from_usize_lossy(n - 1);
    Summary {
        mean,
        stderr: (var / nt).sqrt(),
        n,
    }
}
