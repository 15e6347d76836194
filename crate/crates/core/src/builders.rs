//! State constructors: GHZ/W, the |E_m> blocks, polynomial-driven mixed
//! states, the pure ansatz, Dicke states, the psi^N_m family, and the
//! Majorana (stellar) representation.

use num_complex::Complex64;
use thiserror::Error;

use crate::linkpoly::subsets_of_size;
use crate::qstate::{Label, SparseKet};

#[derive(Debug, Error, PartialEq)]
pub enum BuildError {
    #[error("need at least {min} sites, got {got}")]
    TooFewSites { min: usize, got: usize },
    #[error("m={m} out of range for n={n}")]
    BadResistance { n: usize, m: usize },
    #[error("Majorana construction supports at most 10 stars, got {0}")]
    TooManyStars(usize),
    #[error("star angle out of range: theta={0}, phi={1}")]
    BadAngles(f64, f64),
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// (|0...0> + |1...1>)/sqrt(2) on n qubits.
pub fn ghz(n: usize) -> Result<SparseKet, BuildError> {
    if n < 2 {
        return Err(BuildError::TooFewSites { min: 2, got: n });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    SparseKet::from_amplitudes(
        vec![2; n],
        [
            (vec![0u8; n], Complex64::new(s, 0.0)),
            (vec![1u8; n], Complex64::new(s, 0.0)),
        ],
    )
    .map_err(|_| unreachable!())
}

/// (|100> + |010> + |001>)/sqrt(3).
pub fn w3() -> SparseKet {
    let a = Complex64::new(1.0 / 3.0_f64.sqrt(), 0.0);
    SparseKet::from_amplitudes(
        vec![2, 2, 2],
        [
            (vec![1, 0, 0], a),
            (vec![0, 1, 0], a),
            (vec![0, 0, 1], a),
        ],
    )
    .unwrap()
}

/// Unnormalized (m+1)|0...0> + |1...1> on `sites` qubits.
pub fn e_block(m: usize, sites: usize) -> Result<SparseKet, BuildError> {
    if sites < 2 {
        return Err(BuildError::TooFewSites { min: 2, got: sites });
    }
    SparseKet::from_amplitudes(
        vec![2; sites],
        [
            (vec![0u8; sites], Complex64::new((m + 1) as f64, 0.0)),
            (vec![1u8; sites], Complex64::new(1.0, 0.0)),
        ],
    )
    .map_err(|_| unreachable!())
}

/// One unnormalized term per (n-m)-subset g_i (lexicographic order):
/// |E_m> on g_i, |0...0> elsewhere, and environment label i on a final
/// auxiliary site. Feed the terms to `DensityOperator::reduce_mixture`.
pub fn mixed_from_polynomial(n: usize, m: usize) -> Result<Vec<SparseKet>, BuildError> {
    if n < 2 || m > n - 2 {
        return Err(BuildError::BadResistance { n, m });
    }
    let subsets = sorted_subsets(n, n - m);
    let env_dim = subsets.len().max(2);
    let mut dims = vec![2usize; n];
    dims.push(env_dim);
    let mut terms = Vec::with_capacity(subsets.len());
    for (i, g) in subsets.iter().enumerate() {
        let mut zero_label: Label = vec![0; n + 1];
        zero_label[n] = i as u8;
        let mut ones_label = zero_label.clone();
        for &site in g {
            ones_label[site] = 1;
        }
        let term = SparseKet::from_amplitudes(
            dims.clone(),
            [
                (zero_label, Complex64::new((m + 1) as f64, 0.0)),
                (ones_label, Complex64::new(1.0, 0.0)),
            ],
        )
        .unwrap();
        terms.push(term);
    }
    Ok(terms)
}

/// Normalized sum over (n-m)-subsets of |E_m> on the subset and |0...0>
/// elsewhere (the mixed construction without the environment qudit).
pub fn pure_ansatz(n: usize, m: usize) -> Result<SparseKet, BuildError> {
    if n < 2 || m > n - 2 {
        return Err(BuildError::BadResistance { n, m });
    }
    let subsets = sorted_subsets(n, n - m);
    let mut ket = SparseKet::zero(vec![2; n]);
    for g in &subsets {
        ket.add_amplitude(&vec![0u8; n], Complex64::new((m + 1) as f64, 0.0));
        let mut ones: Label = vec![0; n];
        for &site in g {
            ones[site] = 1;
        }
        ket.add_amplitude(&ones, Complex64::new(1.0, 0.0));
    }
    Ok(ket.normalized().unwrap())
}

/// Uniform superposition of all labels with m zeros and n-m ones.
pub fn dicke(n: usize, m: usize) -> Result<SparseKet, BuildError> {
    if m > n {
        return Err(BuildError::BadResistance { n, m });
    }
    let count = binomial(n, m);
    let amp = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
    let mut ket = SparseKet::zero(vec![2; n]);
    for mask in subsets_of_size(n, n - m) {
        let label: Label = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        ket.add_amplitude(&label, amp);
    }
    Ok(ket)
}

/// The stellar-representation family
/// (sqrt(C(n,m)) |0>^n - (-1)^(n+m) |D^n_m>) / sqrt(1 + C(n,m)).
pub fn psi_family(n: usize, m: usize) -> Result<SparseKet, BuildError> {
    if n < 2 || m > n - 1 {
        return Err(BuildError::BadResistance { n, m });
    }
    let c = binomial(n, m) as f64;
    let norm = (1.0 + c).sqrt();
    let sign = if (n + m) % 2 == 0 { -1.0 } else { 1.0 };
    let mut ket = SparseKet::zero(vec![2; n]);
    ket.add_amplitude(&vec![0u8; n], Complex64::new(c.sqrt() / norm, 0.0));
    let dicke_amp = Complex64::new(sign / (c.sqrt() * norm), 0.0);
    for mask in subsets_of_size(n, n - m) {
        let label: Label = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        ket.add_amplitude(&label, dicke_amp);
    }
    Ok(ket)
}

/// N points on the sphere; star j defines the spinor
/// cos(theta_j/2)|0> + e^(i phi_j) sin(theta_j/2)|1>.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    stars: Vec<(f64, f64)>,
}

impl Constellation {
    pub fn new(stars: Vec<(f64, f64)>) -> Result<Constellation, BuildError> {
        for &(theta, phi) in &stars {
            if !(0.0..=std::f64::consts::PI).contains(&theta)
                || !(0.0..2.0 * std::f64::consts::PI + 1e-12).contains(&phi)
            {
                return Err(BuildError::BadAngles(theta, phi));
            }
        }
        Ok(Constellation { stars })
    }

    pub fn stars(&self) -> &[(f64, f64)] {
        &self.stars
    }

    pub fn to_json(&self) -> serde_json::Value {
        let stars: Vec<serde_json::Value> = self
            .stars
            .iter()
            .map(|&(theta, phi)| serde_json::json!({"theta": theta, "phi": phi}))
            .collect();
        serde_json::json!({ "stars": stars })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Constellation, BuildError> {
        let stars = v
            .get("stars")
            .and_then(|s| s.as_array())
            .ok_or(BuildError::BadAngles(f64::NAN, f64::NAN))?;
        let stars: Vec<(f64, f64)> = stars
            .iter()
            .map(|s| {
                (
                    s.get("theta").and_then(|x| x.as_f64()).unwrap_or(f64::NAN),
                    s.get("phi").and_then(|x| x.as_f64()).unwrap_or(f64::NAN),
                )
            })
            .collect();
        Constellation::new(stars)
    }
}

/// Normalized permutation-symmetric state of the constellation.
///
/// The N! permutation sum collapses onto Dicke levels: the amplitude of
/// every weight-w label equals w!(N-w)! times the coefficient of z^w in
/// prod_j (cos(theta_j/2) + e^(i phi_j) sin(theta_j/2) z), so the cost is
/// polynomial in N plus the 2^N label sweep.
pub fn majorana_state(c: &Constellation) -> Result<SparseKet, BuildError> {
    let n = c.stars.len();
    if n == 0 || n > 10 {
        return Err(BuildError::TooManyStars(n));
    }
    let mut poly = vec![Complex64::ZERO; n + 1];
    poly[0] = Complex64::ONE;
    for &(theta, phi) in &c.stars {
        let c0 = Complex64::new((theta / 2.0).cos(), 0.0);
        let c1 = Complex64::from_polar((theta / 2.0).sin(), phi);
        let mut next = vec![Complex64::ZERO; n + 1];
        for (k, &p) in poly.iter().enumerate() {
            next[k] += p * c0;
            if k + 1 <= n {
                next[k + 1] += p * c1;
            }
        }
        poly = next;
    }
    let factorial = |k: usize| (1..=k).product::<usize>() as f64;
    let mut ket = SparseKet::zero(vec![2; n]);
    for mask in 0u32..(1 << n) {
        let w = mask.count_ones() as usize;
        let amp = poly[w] * factorial(w) * factorial(n - w);
        if amp.norm() < crate::qstate::PRUNE_TOL {
            continue;
        }
        let label: Label = (0..n).map(|i| ((mask >> i) & 1) as u8).collect();
        ket.add_amplitude(&label, amp);
    }
    ket.normalized().map_err(|_| BuildError::TooManyStars(n))
}

/// m stars at the North pole, the remaining n-m evenly spaced on the
/// equator with the first at (pi/2, 0).
pub fn pole_equator_constellation(n: usize, m: usize) -> Result<Constellation, BuildError> {
    if m >= n {
        return Err(BuildError::BadResistance { n, m });
    }
    let mut stars = vec![(0.0, 0.0); m];
    let eq = n - m;
    for j in 0..eq {
        stars.push((
            std::f64::consts::FRAC_PI_2,
            2.0 * std::f64::consts::PI * j as f64 / eq as f64,
        ));
    }
    Constellation::new(stars)
}

/// One north-pole star plus n-1 stars at azimuths 2 pi j/(n-1), with
/// `lifted` of them (evenly spread over the azimuth positions) raised to
/// polar angle theta and the rest on the equator.
pub fn lifted_constellation(n: usize, lifted: usize, theta: f64) -> Result<Constellation, BuildError> {
    if n < 2 || lifted == 0 || lifted > n - 1 {
        return Err(BuildError::BadResistance { n, m: lifted });
    }
    let ring = n - 1;
    let lifted_positions: Vec<usize> = (0..lifted).map(|j| j * ring / lifted).collect();
    let mut stars = vec![(0.0, 0.0)];
    for j in 0..ring {
        let polar = if lifted_positions.contains(&j) {
            theta
        } else {
            std::f64::consts::FRAC_PI_2
        };
        stars.push((polar, 2.0 * std::f64::consts::PI * j as f64 / ring as f64));
    }
    Constellation::new(stars)
}

/// The default scan grid theta in {0, pi/40, ..., pi/2}, inclusive.
pub fn default_scan_grid() -> Vec<f64> {
    (0..=20)
        .map(|i| std::f64::consts::PI * i as f64 / 40.0)
        .collect()
}

fn sorted_subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = subsets_of_size(n, size)
        .into_iter()
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: Complex64, b: Complex64) {
        assert!((a - b).norm() < 1e-12, "{a} != {b}");
    }

    #[test]
    fn ghz_and_w() {
        let g = ghz(3).unwrap();
        assert_eq!(g.term_count(), 2);
        assert_close(
            g.amplitude(&[0, 0, 0]),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        );
        let w = w3();
        assert_eq!(w.term_count(), 3);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let bell = ghz(2).unwrap();
        assert_eq!(bell.term_count(), 2);
        assert!(ghz(1).is_err());
    }

    #[test]
    fn e_block_examples() {
        let e0 = e_block(0, 3).unwrap();
        assert_close(e0.amplitude(&[0, 0, 0]), Complex64::ONE);
        assert_close(e0.amplitude(&[1, 1, 1]), Complex64::ONE);
        let e1 = e_block(1, 2).unwrap();
        assert_close(e1.amplitude(&[0, 0]), Complex64::new(2.0, 0.0));
        let e2 = e_block(2, 3).unwrap();
        assert_close(e2.amplitude(&[0, 0, 0]), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn mixed_term_counts() {
        assert_eq!(mixed_from_polynomial(3, 1).unwrap().len(), 3);
        assert_eq!(mixed_from_polynomial(4, 1).unwrap().len(), 4);
        assert_eq!(mixed_from_polynomial(3, 0).unwrap().len(), 1);
        assert!(mixed_from_polynomial(3, 2).is_err());
        // environment labels pairwise distinct
        let terms = mixed_from_polynomial(4, 2).unwrap();
        let mut envs: Vec<u8> = terms
            .iter()
            .map(|t| t.amplitudes().next().unwrap().0[4])
            .collect();
        envs.dedup();
        assert_eq!(envs.len(), 6);
    }

    #[test]
    fn pure_ansatz_31_merges_zero_label() {
        let k = pure_ansatz(3, 1).unwrap();
        // 6|000> + |110> + |101> + |011>, normalized
        let norm = (36.0 + 3.0_f64).sqrt();
        assert_close(k.amplitude(&[0, 0, 0]), Complex64::new(6.0 / norm, 0.0));
        assert_close(k.amplitude(&[1, 1, 0]), Complex64::new(1.0 / norm, 0.0));
        assert!((k.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_ansatz_m0_is_ghz_block() {
        let k = pure_ansatz(4, 0).unwrap();
        assert_eq!(k.term_count(), 2);
    }

    #[test]
    fn dicke_examples() {
        let d = dicke(3, 1).unwrap();
        assert_eq!(d.term_count(), 3);
        assert_close(
            d.amplitude(&[0, 1, 1]),
            Complex64::new(1.0 / 3.0_f64.sqrt(), 0.0),
        );
        let all_zero = dicke(4, 4).unwrap();
        assert_close(all_zero.amplitude(&[0, 0, 0, 0]), Complex64::ONE);
        assert_eq!(dicke(4, 2).unwrap().term_count(), 6);
    }

    #[test]
    fn psi_family_values() {
        // psi^3_1 = (sqrt(3)|000> + (1/sqrt(3)) sum)/2 up to local phase
        let k = psi_family(3, 1).unwrap();
        assert!((k.amplitude(&[0, 0, 0]).re - 3.0 / 12.0_f64.sqrt()).abs() < 1e-12);
        assert!((k.amplitude(&[0, 1, 1]).norm() - 1.0 / 12.0_f64.sqrt()).abs() < 1e-12);
        // psi^n_0 is the GHZ generalization
        let g = psi_family(4, 0).unwrap();
        assert_eq!(g.term_count(), 2);
        assert!((g.norm() - 1.0).abs() < 1e-12);
        let p = psi_family(4, 2).unwrap();
        assert!((p.norm() - 1.0).abs() < 1e-12);
        assert_eq!(p.term_count(), 7);
    }

    #[test]
    fn majorana_north_pole_and_single_star() {
        let c = Constellation::new(vec![(0.0, 0.0); 4]).unwrap();
        let k = majorana_state(&c).unwrap();
        assert_eq!(k.term_count(), 1);
        assert_close(k.amplitude(&[0, 0, 0, 0]), Complex64::ONE);

        let theta = 1.1;
        let phi = 2.3;
        let c = Constellation::new(vec![(theta, phi)]).unwrap();
        let k = majorana_state(&c).unwrap();
        assert_close(k.amplitude(&[0]), Complex64::new((theta / 2.0).cos(), 0.0));
        assert_close(k.amplitude(&[1]), Complex64::from_polar((theta / 2.0).sin(), phi));
    }

    #[test]
    fn majorana_equatorial_triangle_is_ghz() {
        let c = pole_equator_constellation(3, 0).unwrap();
        let k = majorana_state(&c).unwrap();
        let g = ghz(3).unwrap();
        let fidelity = k.inner(&g).norm();
        assert!((fidelity - 1.0).abs() < 1e-10, "fidelity {fidelity}");
    }

    #[test]
    fn majorana_is_permutation_symmetric() {
        let c = Constellation::new(vec![(0.3, 0.1), (1.2, 2.0), (2.2, 4.4)]).unwrap();
        let k = majorana_state(&c).unwrap();
        let p = k.permute_sites(&[2, 0, 1]);
        assert_eq!(k, p);
    }

    #[test]
    fn pole_equator_examples() {
        let c = pole_equator_constellation(3, 1).unwrap();
        assert_eq!(c.stars()[0], (0.0, 0.0));
        assert_eq!(c.stars()[1].0, std::f64::consts::FRAC_PI_2);
        assert!((c.stars()[2].1 - std::f64::consts::PI).abs() < 1e-12);
        let c = pole_equator_constellation(4, 0).unwrap();
        for (j, star) in c.stars().iter().enumerate() {
            assert!((star.1 - j as f64 * std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn majorana_matches_psi_family() {
        for n in 3..=7 {
            for m in 0..n {
                let c = pole_equator_constellation(n, m).unwrap();
                let k = majorana_state(&c).unwrap();
                let p = psi_family(n, m).unwrap();
                let fid = k.inner(&p).norm();
                assert!((fid - 1.0).abs() < 1e-10, "n={n} m={m} fidelity {fid}");
            }
        }
    }
}
