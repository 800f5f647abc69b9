/// Formats a float with the shortest decimal that parses back to the same bits.
///
/// Every exported CSV/JSON number goes through here so that files round-trip
/// exactly and outputs stay byte-identical across runs.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Normalise -0.0 so tables never show a signed zero.
        return "0".to_string();
    }
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        for v in [0.1, 1.0 / 3.0, -0.00559, 1e-300, 123456.789, f64::MAX] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(fmt_f64(-0.0), "0");
    }
}
