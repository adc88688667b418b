use rayon::prelude::*;

use super::MaximalOutput;
use crate::directions::DirectionSet;
use crate::spectral::multiplier::apply_to_spectrum;
use crate::spectral::{forward_spectrum, GridFunction, Symbol1D};

/// `T_N^* f = sup_{v ∈ Σ_N} |T_v f|` with the maximising direction recorded.
pub fn directional_sup(f: &GridFunction, set: &DirectionSet, m: &Symbol1D) -> MaximalOutput {
    directional_sup_batch(std::slice::from_ref(f), set, m).pop().unwrap()
}

/// [`directional_sup`] for several inputs sharing one pass over the directions.
pub fn directional_sup_batch(
    inputs: &[GridFunction],
    set: &DirectionSet,
    m: &Symbol1D,
) -> Vec<MaximalOutput> {
    let Some(first) = inputs.first() else { return Vec::new() };
    let (level, side) = (first.level(), first.side());
    let spectra: Vec<_> = inputs.iter().map(forward_spectrum).collect();
    let empty = || vec![MaximalOutput::empty(level, side); inputs.len()];
    set.vectors()
        .par_iter()
        .enumerate()
        .fold(empty, |mut acc, (k, &v)| {
            for (out, s) in acc.iter_mut().zip(&spectra) {
                let tv = apply_to_spectrum(s, m, v);
                out.absorb(tv.values().iter().map(|z| z.norm()), k as u32);
            }
            acc
        })
        .reduce(empty, |a, b| a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::DirectionKind;
    use crate::spectral::{apply_directional_multiplier, fourier_mode};
    use num_complex::Complex64;

    fn noise(level: u32, seed: u64) -> GridFunction {
        use rand::Rng;
        let mut rng = crate::rng::seeded(seed);
        let n = 1usize << (2 * level);
        let v = (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        GridFunction::new(level, 1.0, v.collect()).unwrap()
    }

    #[test]
    fn singleton_set_is_single_direction() {
        let f = noise(5, 1);
        let v = [0.6, -0.8];
        let set = DirectionSet::from_vectors(vec![v]).unwrap();
        let out = directional_sup(&f, &set, &Symbol1D::sgn());
        let tv = apply_directional_multiplier(&f, &Symbol1D::sgn(), v).unwrap();
        for (a, b) in out.values().iter().zip(tv.values()) {
            assert_eq!(*a, b.norm());
        }
    }

    #[test]
    fn identity_symbol_gives_modulus() {
        let f = noise(4, 2);
        let set = DirectionSet::make(DirectionKind::Random, 7, 3).unwrap();
        let out = directional_sup(&f, &set, &Symbol1D::identity());
        for (a, b) in out.values().iter().zip(f.values()) {
            assert!((a - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn sgn_of_single_mode_is_one() {
        // Each direction multiplies the mode by sgn(v·(3, 4)) ∈ {−1, 0, 1};
        // some direction of an equispaced set with N ≥ 2 is not orthogonal.
        let f = fourier_mode(5, 1.0, 3, 4).unwrap();
        for n in [2, 3, 8] {
            let set = DirectionSet::make(DirectionKind::Equispaced, n, 0).unwrap();
            let out = directional_sup(&f, &set, &Symbol1D::sgn());
            assert!(out.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn sup_dominates_every_direction() {
        let f = noise(4, 9);
        let set = DirectionSet::make(DirectionKind::Random, 6, 4).unwrap();
        let m = Symbol1D::imaginary_power(1.0);
        let out = directional_sup(&f, &set, &m);
        for &v in set.vectors() {
            let tv = apply_directional_multiplier(&f, &m, v).unwrap();
            for (a, b) in out.values().iter().zip(tv.values()) {
                assert!(*a >= b.norm() - 1e-10);
            }
        }
    }
}
