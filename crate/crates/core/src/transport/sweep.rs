use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_scattering, ScatterConfig, TransportError};
use crate::geometry::JunctionGeometry;
use crate::scalar::Scalar;

/// Junction parameters held fixed while `R1` varies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedJunctionParams<T> {
    pub r2: T,
    pub half_length: T,
    pub transition: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    /// Swept variable (`E_l` in meV or `R1` in nm).
    pub x: T,
    pub transmission: T,
    pub reflection: T,
}

fn collect<T: Scalar>(results: Vec<Result<SweepPoint<T>, TransportError>>) -> Result<Vec<SweepPoint<T>>, TransportError> {
    let total = results.len();
    let mut points = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    if failures.is_empty() {
        Ok(points)
    } else {
        Err(TransportError::Sweep { total, failures })
    }
}

/// `T(E_l)` on the given energies. Points are solved in parallel; results
/// keep input order. Any failing point fails the sweep with every failing
/// index listed.
pub fn transmission_vs_energy<T: Scalar>(
    junction: &JunctionGeometry<T>,
    energies: &[T],
    config: &ScatterConfig<T>,
) -> Result<Vec<SweepPoint<T>>, TransportError> {
    let results: Vec<_> = energies
        .par_iter()
        .map(|&e| {
            let sol = solve_scattering(junction, &config.with_energy(e))?;
            Ok(SweepPoint { x: e, transmission: sol.transmission, reflection: sol.reflection })
        })
        .collect();
    collect(results)
}

/// `T(R1)` at fixed `config.energy_l`.
pub fn transmission_vs_r1<T: Scalar>(
    r1_values: &[T],
    fixed: FixedJunctionParams<T>,
    config: &ScatterConfig<T>,
) -> Result<Vec<SweepPoint<T>>, TransportError> {
    let results: Vec<_> = r1_values
        .par_iter()
        .map(|&r1| {
            let j = JunctionGeometry::new(r1, fixed.r2, fixed.half_length, fixed.transition)?;
            let sol = solve_scattering(&j, config)?;
            Ok(SweepPoint { x: r1, transmission: sol.transmission, reflection: sol.reflection })
        })
        .collect();
    collect(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_reports_every_failure() {
        let j = JunctionGeometry::new(20.0, 2.0, 10.0, 2.0).unwrap();
        let cfg = ScatterConfig::new(1.0).with_grid_points(600);
        let err = transmission_vs_energy(&j, &[1.0, -1.0, 2.0, -3.0], &cfg).unwrap_err();
        match err {
            TransportError::Sweep { total, failures } => {
                assert_eq!(total, 4);
                assert_eq!(failures.iter().map(|f| f.0).collect::<Vec<_>>(), vec![1, 3]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sweep_order_is_stable() {
        let j = JunctionGeometry::new(20.0, 2.0, 10.0, 2.0).unwrap();
        let cfg = ScatterConfig::new(1.0).with_grid_points(600);
        let es: Vec<f64> = (1..=16).map(|i| i as f64 * 2.5).collect();
        let a = transmission_vs_energy(&j, &es, &cfg).unwrap();
        let b = transmission_vs_energy(&j, &es, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().zip(&es).all(|(p, e)| p.x == *e));
    }

    #[test]
    fn r1_sweep_rejects_degenerate_geometry() {
        let fixed = FixedJunctionParams { r2: 2.0, half_length: 5.0, transition: 2.0 };
        let cfg = ScatterConfig::new(10.0).with_grid_points(600);
        assert!(transmission_vs_r1(&[3.0, -1.0], fixed, &cfg).is_err());
        assert_eq!(transmission_vs_r1(&[3.0, 4.0], fixed, &cfg).unwrap().len(), 2);
    }
}
