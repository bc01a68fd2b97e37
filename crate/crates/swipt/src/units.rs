//! Power unit conversions.

/// dBm to watts: `10^((dbm - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Watts to dBm. Zero or negative power maps to `-inf`.
pub fn watts_to_dbm(watts: f64) -> f64 {
    if watts <= 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * watts.log10() + 30.0
    }
}

/// Power ratio in dB to a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert!((dbm_to_watts(-70.0) - 1e-10).abs() < 1e-24);
        assert!((dbm_to_watts(-50.0) - 1e-8).abs() < 1e-22);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-12);
        assert!((db_to_linear(-40.0) - 1e-4).abs() < 1e-18);
    }

    #[test]
    fn roundtrip() {
        for dbm in [-90.0, -61.7, -30.0, 0.0, 12.5] {
            let back = watts_to_dbm(dbm_to_watts(dbm));
            assert!((back - dbm).abs() < 1e-9, "{dbm} -> {back}");
        }
    }

    #[test]
    fn nonpositive_power_maps_to_neg_infinity() {
        assert_eq!(watts_to_dbm(0.0), f64::NEG_INFINITY);
        assert_eq!(watts_to_dbm(-1.0), f64::NEG_INFINITY);
    }
}
