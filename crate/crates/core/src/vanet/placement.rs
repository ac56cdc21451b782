use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Homogeneous Poisson process on `[0, road_length]`: a Poisson(`density *
/// road_length`) count of independent uniform positions, returned sorted.
pub fn place_vehicles<R: Rng + ?Sized>(density: f64, road_length: f64, rng: &mut R) -> Vec<f64> {
    let mean = density * road_length;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean)
        .expect("positive finite Poisson mean")
        .sample(rng) as usize;
    let mut xs: Vec<f64> = (0..count)
        .map(|_| rng.random::<f64>() * road_length)
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn empty_road() {
        assert!(place_vehicles(0.0, 10.0, &mut stream(1, 0)).is_empty());
    }

    #[test]
    fn positions_are_sorted_and_on_the_road() {
        let xs = place_vehicles(50.0, 4.0, &mut stream(2, 0));
        assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        assert!(xs.iter().all(|&x| (0.0..=4.0).contains(&x)));
        assert_eq!(xs, place_vehicles(50.0, 4.0, &mut stream(2, 0)));
    }

    #[test]
    fn count_moments() {
        let reps = 1000;
        let mean = (0..reps)
            .map(|i| place_vehicles(100.0, 10.0, &mut stream(3, i)).len() as f64)
            .sum::<f64>()
            / reps as f64;
        // Mean of 1000 Poisson(1000) counts: standard error 1.
        assert!((mean - 1000.0).abs() < 3.0 * 1000f64.sqrt(), "{mean}");
        assert!((mean - 1000.0).abs() < 4.0, "{mean}");
    }

    #[test]
    fn disjoint_halves_are_uncorrelated() {
        let reps = 10_000u64;
        let pairs: Vec<(f64, f64)> = (0..reps)
            .map(|i| {
                let xs = place_vehicles(5.0, 2.0, &mut stream(4, i));
                let left = xs.iter().filter(|&&x| x < 1.0).count() as f64;
                (left, xs.len() as f64 - left)
            })
            .collect();
        let n = reps as f64;
        let ma = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let mb = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).sum::<f64>() / (n - 1.0);
        // Each half is Poisson(5); the sample covariance has sd ~ 5/sqrt(n).
        assert!(cov.abs() < 4.0 * 5.0 / n.sqrt(), "{cov}");
        assert!((ma - 5.0).abs() < 0.1 && (mb - 5.0).abs() < 0.1);
    }
}
