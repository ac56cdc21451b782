//! Decibel conversions. Everything inside the crate is linear; dB only
//! appears at configuration and report boundaries.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn anchors() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_eq!(db_to_linear(10.0), 10.0);
        assert!((db_to_linear(-10.0) - 0.1).abs() < 1e-15);
        assert_eq!(linear_to_db(100.0), 20.0);
    }

    proptest! {
        #[test]
        fn round_trip(db in -60.0f64..60.0) {
            let back = linear_to_db(db_to_linear(db));
            prop_assert!((back - db).abs() < 1e-12);
        }
    }
}
