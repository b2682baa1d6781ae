use crate::error::{CapfieldError, Result};
use crate::sphere::cap::Cap;

/// Greedy 5r-covering selection: scan caps by decreasing radius (ties broken
/// by input order), keep a cap when its center sits at chordal distance
/// ≥ ρ(kept) + ρ(candidate) from every kept center. Returns indices into the
/// input, in selection order.
///
/// Every input cap κ(y, ρ) then meets some kept κ(y', ρ') with ρ' ≥ ρ, so
/// ‖y − y'‖ < ρ + ρ' ≤ 2ρ' and κ(y, ρ) ⊆ κ(y', ‖y − y'‖ + ρ) ⊆ κ(y', 5ρ')
/// up to the sphere's diameter cap.
pub fn five_r_disjointify_indices(caps: &[Cap]) -> Result<Vec<usize>> {
    if caps.is_empty() {
        return Ok(Vec::new());
    }
    let dim = caps[0].center.coords().len();
    for c in caps {
        if c.center.coords().len() != dim {
            return Err(CapfieldError::DimensionMismatch {
                expected: dim,
                got: c.center.coords().len(),
            });
        }
    }
    let mut order: Vec<usize> = (0..caps.len()).collect();
    order.sort_by(|&i, &j| caps[j].radius.total_cmp(&caps[i].radius).then(i.cmp(&j)));
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let c = &caps[i];
        let clear = kept
            .iter()
            .all(|&k| caps[k].center.dist(&c.center) >= caps[k].radius + c.radius);
        if clear {
            kept.push(i);
        }
    }
    Ok(kept)
}

/// The disjoint subfamily itself, cloned out of the input.
pub fn five_r_disjointify(caps: &[Cap]) -> Result<Vec<Cap>> {
    Ok(five_r_disjointify_indices(caps)?
        .into_iter()
        .map(|i| caps[i].clone())
        .collect())
}

/// Checks the covering half of the 5r property: every input cap is contained
/// in the 5-fold dilation of some kept cap of no smaller radius.
pub fn five_r_certificate(caps: &[Cap], kept: &[usize]) -> bool {
    caps.iter().enumerate().all(|(i, c)| {
        kept.iter().any(|&k| {
            if i == k {
                return true;
            }
            let g = &caps[k];
            g.radius >= c.radius && {
                let dist = g.center.dist(&c.center);
                // κ(y, ρ) ⊆ κ(y', dist + ρ), and dist + ρ ≤ 5ρ' ∨ whole sphere
                dist < g.radius + c.radius
                    && (dist + c.radius <= 5.0 * g.radius || 5.0 * g.radius >= 2.0)
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::cap::uniform_on_sphere;
    use crate::sphere::point::SpherePoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_input_gives_empty_family() {
        assert!(five_r_disjointify(&[]).unwrap().is_empty());
    }

    #[test]
    fn single_cap_is_kept() {
        let caps = vec![Cap::new(SpherePoint::north_pole(2), 0.4).unwrap()];
        let kept = five_r_disjointify(&caps).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0], caps[0]);
    }

    #[test]
    fn disjoint_input_is_kept_whole() {
        let caps = vec![
            Cap::new(SpherePoint::from_angle(0.0), 0.1).unwrap(),
            Cap::new(SpherePoint::from_angle(1.5), 0.1).unwrap(),
            Cap::new(SpherePoint::from_angle(3.0), 0.1).unwrap(),
        ];
        let kept = five_r_disjointify(&caps).unwrap();
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn overlapping_pair_keeps_larger_and_covers() {
        // centers 0.05 apart with radii 0.1 and 0.08: the smaller one's
        // points lie within 0.05 + 0.08 ≤ 0.5 of the kept center
        let n = SpherePoint::north_pole(1);
        let q = SpherePoint::from_angle(n.angle().unwrap() + 2.0 * (0.025_f64).asin());
        assert!((n.dist(&q) - 0.05).abs() < 1e-12);
        let caps = vec![
            Cap::new(n, 0.1).unwrap(),
            Cap::new(q, 0.08).unwrap(),
        ];
        let kept = five_r_disjointify_indices(&caps).unwrap();
        assert_eq!(kept, vec![0]);
        assert!(five_r_certificate(&caps, &kept));
    }

    #[test]
    fn identical_caps_tie_break_by_input_order() {
        let caps = vec![
            Cap::new(SpherePoint::from_angle(0.1), 0.5).unwrap(),
            Cap::new(SpherePoint::from_angle(0.1), 0.5).unwrap(),
            Cap::new(SpherePoint::from_angle(0.1), 0.5).unwrap(),
        ];
        let kept = five_r_disjointify_indices(&caps).unwrap();
        assert_eq!(kept, vec![0]);
    }

    #[test]
    fn random_families_satisfy_disjointness_and_covering() {
        for d in [1usize, 2] {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + d as u64);
            for _trial in 0..20 {
                let caps: Vec<Cap> = (0..60)
                    .map(|_| {
                        let c = uniform_on_sphere(d, &mut rng);
                        let r = 0.01 + rng.gen::<f64>() * 0.6;
                        Cap::new(c, r).unwrap()
                    })
                    .collect();
                let kept = five_r_disjointify_indices(&caps).unwrap();
                for (a, &i) in kept.iter().enumerate() {
                    for &j in &kept[a + 1..] {
                        let dist = caps[i].center.dist(&caps[j].center);
                        assert!(dist >= caps[i].radius + caps[j].radius);
                    }
                }
                assert!(five_r_certificate(&caps, &kept));
            }
        }
    }

    #[test]
    fn rejects_mixed_dimensions() {
        let caps = vec![
            Cap::new(SpherePoint::north_pole(1), 0.3).unwrap(),
            Cap::new(SpherePoint::north_pole(2), 0.3).unwrap(),
        ];
        assert!(five_r_disjointify(&caps).is_err());
    }
}
