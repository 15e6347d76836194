//! Acceptance gate: one test per release criterion, each printing a
//! single pass line on success (run with `--nocapture` to see them).
//! Tolerances are pinned here and must not be loosened.

use num_complex::Complex64;

use resist_core::braid::{brunnian_block, compose_blocks, validate_brunnian, BraidWord};
use resist_core::builders;
use resist_core::linkpoly::{enumerate_classes, subsets_of_size, LinkPolynomial};
use resist_core::orthoarray::{OrthogonalArray, StrengthCheck};
use resist_core::qstate::{index_to_label, label_to_index, DensityOperator, SparseKet};
use resist_core::resistance::{
    classify, state_to_link_polynomial, Classification, StateSource,
};
use resist_core::septest::{
    full_verdict, gilbert_nearest_separable, ppt_min_eig, ToleranceConfig, Verdict,
};

const FIDELITY_TOL: f64 = 1e-10;
const EIG_TOL: f64 = 1e-10;
const ORACLE_TOL: f64 = 1e-12;
const SEP_DISTANCE_TOL: f64 = 1e-6;
const PT_WITNESS_TOL: f64 = -1e-6;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn passed(n: usize, what: &str) {
    println!("criterion {n:02} ({what}): pass");
}

#[test]
fn criterion_01_link_class_census() {
    let expected = [(2usize, 1usize), (3, 4), (4, 40), (5, 6900)];
    let computed: Vec<usize> = expected
        .iter()
        .map(|&(n, _)| enumerate_classes(n).class_count)
        .collect();
    for (i, (n, count)) in expected.into_iter().enumerate() {
        // Known red at n=5: two independent enumerations both give 3044 under
        // the stated reduction rules, and cut-behavior equivalence caps the
        // class count at that value; the published 6900 likely counts a finer
        // (isotopy-level) equivalence. Pinned value kept deliberately.
        assert_eq!(
            computed[i], count,
            "n={n}; computed counts for n=2..5 were {computed:?}"
        );
    }
    passed(1, "class counts 1/4/40/6900");
}

#[test]
fn criterion_02_resistant_generator_round_trip() {
    for n in 2..=7 {
        for m in 0..=n - 2 {
            let p = LinkPolynomial::generate_m_resistant(n, m).unwrap();
            assert_eq!(p.is_m_resistant_link(), Some(m), "n={n} m={m}");
        }
    }
    passed(2, "generate/check round trip n<=7");
}

#[test]
fn criterion_03_canonical_exemplars() {
    let c = cfg();
    let ghz = StateSource::Pure(builders::ghz(3).unwrap());
    let w = StateSource::Pure(builders::w3());
    assert_eq!(classify(&ghz, &c, 1, false).unwrap(), Classification::Resistant(0));
    assert_eq!(classify(&w, &c, 1, false).unwrap(), Classification::Resistant(1));
    assert_eq!(
        state_to_link_polynomial(&ghz, &c, 1).unwrap().display_terms(),
        "abc"
    );
    assert_eq!(
        state_to_link_polynomial(&w, &c, 1).unwrap().display_terms(),
        "ab+ac+bc"
    );
    passed(3, "GHZ/W classifications and polynomials");
}

fn mixed_source(n: usize, m: usize) -> StateSource {
    StateSource::Mixture {
        terms: builders::mixed_from_polynomial(n, m).unwrap(),
        system_sites: n,
    }
}

#[test]
fn criterion_04_mixed_construction_small() {
    let c = cfg();
    for n in 3..=5 {
        for m in 0..=n - 2 {
            assert_eq!(
                classify(&mixed_source(n, m), &c, 2, false).unwrap(),
                Classification::Resistant(m),
                "n={n} m={m}"
            );
        }
    }
    passed(4, "mixed states hit target resistance, N=3..5");
}

#[test]
fn criterion_04_mixed_construction_extended() {
    // the construction is permutation symmetric, so one marginal per
    // level decides each; inconclusive outcomes are reported, not failed
    let c = cfg();
    let mut undetermined = Vec::new();
    for n in 6..=7 {
        for m in 0..=n - 2 {
            match classify(&mixed_source(n, m), &c, 2, true).unwrap() {
                Classification::Resistant(got) => assert_eq!(got, m, "n={n} m={m}"),
                Classification::Undetermined(reason) => {
                    undetermined.push(format!("n={n} m={m}: {reason}"));
                }
            }
        }
    }
    if undetermined.is_empty() {
        passed(4, "mixed states hit target resistance, N=6..7 extended");
    } else {
        println!(
            "criterion 04 extended: {} undetermined case(s) reported: {}",
            undetermined.len(),
            undetermined.join("; ")
        );
    }
}

#[test]
fn criterion_05_pure_ansatz_results() {
    let c = cfg();
    let check = |n: usize, m: usize, expect: usize| {
        let src = StateSource::Pure(builders::psi_family(n, m).unwrap());
        assert_eq!(
            classify(&src, &c, 3, true).unwrap(),
            Classification::Resistant(expect),
            "psi({n},{m})"
        );
    };
    for n in 4..=6 {
        check(n, 0, 0);
        check(n, n - 2, n - 2);
        check(n, n - 3, n - 3);
    }
    // the five-qubit m=1 attempt lands at resistance 2 instead
    check(5, 1, 2);
    passed(5, "Dicke-ansatz classifications incl. the (5,1) miss");
}

#[test]
fn criterion_06_stellar_equivalence() {
    for n in 3..=6 {
        for m in 0..n {
            let c = builders::pole_equator_constellation(n, m).unwrap();
            let k = builders::majorana_state(&c).unwrap();
            let p = builders::psi_family(n, m).unwrap();
            let fid = k.inner(&p).norm();
            assert!((fid - 1.0).abs() < FIDELITY_TOL, "n={n} m={m}: {fid}");
        }
    }
    passed(6, "pole/equator constellations reproduce the ansatz");
}

#[test]
fn criterion_07_bush_construction() {
    let expected = "\
OA 16 5 4 2
0 0 0 0 0
0 1 1 1 1
0 2 2 2 2
0 3 3 3 3
1 0 1 2 3
1 1 0 3 2
1 2 3 0 1
1 3 2 1 0
2 0 2 3 1
2 1 3 2 0
2 2 0 1 3
2 3 1 0 2
3 0 3 1 2
3 1 2 0 3
3 2 1 3 0
3 3 0 2 1
";
    let oa = OrthogonalArray::construct_bush(4, 2).unwrap();
    assert_eq!(oa.to_text(), expected);
    for d in [4u32, 5, 7] {
        let oa = OrthogonalArray::construct_bush(d, 2).unwrap();
        match oa.validate_strength(2) {
            StrengthCheck::Valid { lambda } => assert_eq!(lambda, 1, "d={d}"),
            StrengthCheck::Invalid { .. } => panic!("d={d} not strength 2"),
        }
    }
    passed(7, "Bush table bytes and unit index for d=4,5,7");
}

fn oa_state_checks(state: SparseKet, seed: u64) {
    let c = cfg();
    let n = state.site_count();
    // keep-(N-2) marginals are product-basis-diagonal
    for mask in subsets_of_size(n, n - 2) {
        let kept: Vec<usize> = (0..n).filter(|&s| mask & (1 << s) != 0).collect();
        let rho = DensityOperator::reduce(&state, &kept).unwrap();
        assert!(rho.is_diagonal_in_product_basis(), "kept {kept:?}");
    }
    // keep-(N-1) marginals carry a negative single-site transpose witness
    for mask in subsets_of_size(n, n - 1) {
        let kept: Vec<usize> = (0..n).filter(|&s| mask & (1 << s) != 0).collect();
        let rho = DensityOperator::reduce(&state, &kept).unwrap();
        let witness = (0..kept.len())
            .map(|site| ppt_min_eig(&rho, &[site]).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(witness <= PT_WITNESS_TOL, "kept {kept:?}: min eig {witness}");
    }
    assert_eq!(
        classify(&StateSource::Pure(state), &cfg(), seed, false).unwrap(),
        Classification::Resistant(1)
    );
    let _ = c;
}

#[test]
fn criterion_08_oa_states() {
    let oa = OrthogonalArray::construct_bush(4, 2).unwrap();
    oa_state_checks(oa.to_state(), 4);
    for fixture in ["../../fixtures/oa_25_6_5_2.txt", "../../fixtures/oa_49_8_7_2.txt"] {
        let text = std::fs::read_to_string(fixture).unwrap();
        let oa = OrthogonalArray::from_text(&text).unwrap();
        oa_state_checks(oa.to_state(), 4);
    }
    passed(8, "OA states are 1-resistant with diagonal/deep-negative marginals");
}

#[test]
fn criterion_09_pt_spot_checks() {
    let c = cfg();
    // W marginal
    let w = builders::w3();
    let rho = DensityOperator::reduce(&w, &[1, 2]).unwrap();
    let min = ppt_min_eig(&rho, &[1]).unwrap();
    let expected = (1.0 - 5.0_f64.sqrt()) / 6.0;
    assert!((min - expected).abs() < EIG_TOL, "{min}");
    // Werner sweep
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        let min = ppt_min_eig(&werner(p), &[1]).unwrap();
        assert!((min - (1.0 - 3.0 * p) / 4.0).abs() < EIG_TOL, "p={p}");
    }
    let res = gilbert_nearest_separable(&werner(0.3), &c, 9).unwrap();
    assert!(res.distance < SEP_DISTANCE_TOL, "distance {}", res.distance);
    assert_eq!(full_verdict(&werner(0.5), &c, 9).unwrap(), Verdict::Entangled);
    passed(9, "PT eigenvalues and Werner separability boundary");
}

fn werner(p: f64) -> DensityOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = SparseKet::from_amplitudes(
        vec![2, 2],
        [
            (vec![0, 1], Complex64::new(s, 0.0)),
            (vec![1, 0], Complex64::new(-s, 0.0)),
        ],
    )
    .unwrap();
    let pure = DensityOperator::reduce(&psi, &[0, 1]).unwrap();
    let mut dense = pure.to_dense(4).unwrap() * Complex64::new(p, 0.0);
    for i in 0..4 {
        dense[(i, i)] += Complex64::new((1.0 - p) / 4.0, 0.0);
    }
    DensityOperator::from_dense(vec![2, 2], dense).unwrap()
}

#[test]
fn criterion_10_reduce_matches_dense_oracle() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..200 {
        // random site dimensions with ambient product <= 1024
        let mut dims: Vec<usize> = Vec::new();
        let mut ambient = 1usize;
        loop {
            let d = rng.gen_range(2..=5);
            if ambient * d > 1024 || (dims.len() >= 2 && rng.gen_bool(0.3)) {
                break;
            }
            ambient *= d;
            dims.push(d);
        }
        while dims.len() < 2 {
            dims.push(2);
            ambient *= 2;
        }
        // random sparse state
        let terms = rng.gen_range(1..=12.min(ambient));
        let mut ket = SparseKet::zero(dims.clone());
        for _ in 0..terms {
            let idx = rng.gen_range(0..ambient);
            let label = index_to_label(idx, &dims);
            ket.add_amplitude(
                &label,
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
            );
        }
        let ket = match ket.normalized() {
            Ok(k) => k,
            Err(_) => continue,
        };
        let keep_count = rng.gen_range(1..=dims.len());
        let mut keep: Vec<usize> = (0..dims.len()).collect();
        while keep.len() > keep_count {
            let drop = rng.gen_range(0..keep.len());
            keep.remove(drop);
        }
        let rho = DensityOperator::reduce(&ket, &keep).unwrap();
        let got = rho.to_dense(1024).unwrap();
        let want = dense_partial_trace(&ket, &keep);
        assert!(
            (got - want).norm() < ORACLE_TOL,
            "case {case}: dims {dims:?} keep {keep:?}"
        );
    }
    passed(10, "support-basis reduce vs dense partial trace, 200 cases");
}

/// Brute-force partial trace through the full ambient space.
fn dense_partial_trace(ket: &SparseKet, keep: &[usize]) -> nalgebra::DMatrix<Complex64> {
    let dims = ket.dims().to_vec();
    let ambient: usize = dims.iter().product();
    let mut full = nalgebra::DVector::<Complex64>::zeros(ambient);
    for (label, &a) in ket.amplitudes() {
        full[label_to_index(label, &dims)] = a;
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&s| dims[s]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let kd: usize = kept_dims.iter().product();
    let td: usize = traced_dims.iter().product();
    let mut rho = nalgebra::DMatrix::<Complex64>::zeros(kd, kd);
    for i in 0..kd {
        let li = index_to_label(i, &kept_dims);
        for j in 0..kd {
            let lj = index_to_label(j, &kept_dims);
            let mut sum = Complex64::ZERO;
            for t in 0..td {
                let lt = index_to_label(t, &traced_dims);
                let mut a = vec![0u8; dims.len()];
                let mut b = vec![0u8; dims.len()];
                for (pos, &s) in keep.iter().enumerate() {
                    a[s] = li[pos];
                    b[s] = lj[pos];
                }
                for (pos, &s) in traced.iter().enumerate() {
                    a[s] = lt[pos];
                    b[s] = lt[pos];
                }
                sum += full[label_to_index(&a, &dims)]
                    * full[label_to_index(&b, &dims)].conj();
            }
            rho[(i, j)] = sum;
        }
    }
    rho
}

#[test]
fn criterion_11_braid_validation() {
    for n in 2..=5 {
        validate_brunnian(&brunnian_block(n).unwrap()).unwrap();
    }
    // deletion of strands in the composed braid mirrors the polynomial
    // cut, exhaustively over the census for N <= 4
    for n in 2..=4usize {
        for rep in enumerate_classes(n).representatives {
            let subsets: Vec<Vec<usize>> = rep
                .monomials()
                .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
                .collect();
            let braid = compose_blocks(n, &subsets).unwrap();
            for cut_mask in 0u32..(1 << n) {
                if cut_mask.count_ones() as usize > n - 2 {
                    continue;
                }
                let cut: Vec<usize> = (0..n).filter(|&i| cut_mask & (1 << i) != 0).collect();
                let survivor = delete_strands(&braid, &cut);
                let unlinked = survivor.free_reduce().letters().is_empty();
                let poly_cut = rep.cut(&cut).unwrap();
                assert_eq!(
                    unlinked,
                    poly_cut.is_empty(),
                    "poly {} cut {cut:?}",
                    rep.display_terms()
                );
            }
        }
    }
    passed(11, "Brunnian blocks and composition/cut consistency");
}

fn delete_strands(braid: &BraidWord, strands: &[usize]) -> BraidWord {
    let mut out = braid.clone();
    let mut sorted = strands.to_vec();
    sorted.sort_unstable();
    for &s in sorted.iter().rev() {
        out = out.delete_strand(s).unwrap();
    }
    out
}
