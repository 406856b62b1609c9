//! Text formatting helpers shared by exports and the CLI.
//!
//! All numeric output uses 17 significant digits so values round-trip
//! bit-exactly through text.

use ndarray::Array2;
use num_complex::Complex64;

/// Format with 17 significant digits (round-trip exact for f64).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Dense real matrix as CSV, row-major.
pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_f64(m[[i, j]])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Dense complex matrix as CSV with `re,im` pairs per entry, row-major.
pub fn complex_matrix_to_csv(m: &Array2<Complex64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{},{}", fmt_f64(m[[i, j]].re), fmt_f64(m[[i, j]].im)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trips_through_text() {
        for &x in &[0.1, 1.0 / 3.0, -2.95e-17, 1.2345678901234567e100] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn csv_shape() {
        let m = ndarray::array![[1.0, 2.0], [3.0, 4.0]];
        let csv = matrix_to_csv(&m);
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 2);
    }
}
