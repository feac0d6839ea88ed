//! Text formatting shared by the CSV writers.

/// Scientific notation with 17 significant digits, enough to round-trip
/// any `f64`. Rust float formatting never consults the locale.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
    }
}
