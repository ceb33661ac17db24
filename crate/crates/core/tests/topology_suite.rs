//! Exactness checks for the graded-algebra layer: a brute-force sign oracle
//! for the exterior product, basis-change invariance of the cup-length, and
//! the suspension/subadditivity bookkeeping.

use loopaction::topology::{
    binomial, cup_length, exterior_algebra, sphere_ring, standard_instances, subadditivity_check,
    suspension_model, torus_index_module, CoeffField, CupLengthOptions, GradedModule, GradedRing,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sign of the permutation sorting the concatenation of two disjoint sorted
/// index tuples, counted by brute-force bubble sort.
fn bubble_sort_sign(mut seq: Vec<usize>) -> i128 {
    let mut sign = 1i128;
    for i in 0..seq.len() {
        for j in 0..seq.len().saturating_sub(i + 1) {
            if seq[j] > seq[j + 1] {
                seq.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

fn mask_to_indices(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|i| mask & (1 << i) != 0)
        .collect()
}

#[test]
fn exterior_product_signs_match_the_bubble_sort_oracle() {
    let m = 5;
    let ring = exterior_algebra(m, CoeffField::Rationals);
    for a in 0..(1usize << m) {
        for b in 0..(1usize << m) {
            let product = ring
                .cup(&ring.basis_element(a), &ring.basis_element(b))
                .unwrap();
            if a & b != 0 {
                assert!(product.is_zero());
                continue;
            }
            let mut concat = mask_to_indices(a);
            concat.extend(mask_to_indices(b));
            let expected = bubble_sort_sign(concat);
            assert_eq!(product.coeffs()[a | b], expected, "masks {a:#b}, {b:#b}");
        }
    }
}

#[test]
fn two_element_field_drops_the_signs() {
    let ring = exterior_algebra(3, CoeffField::TwoElement);
    let x1 = ring.basis_element(0b001);
    let x2 = ring.basis_element(0b010);
    let forward = ring.cup(&x1, &x2).unwrap();
    let backward = ring.cup(&x2, &x1).unwrap();
    assert_eq!(forward, backward);
    assert_eq!(forward.coeffs()[0b011], 1);
}

#[test]
fn total_dimension_and_degreewise_dimensions_are_binomial() {
    for m in 0..=6usize {
        let ring = exterior_algebra(m, CoeffField::Rationals);
        assert_eq!(ring.dim(), 1 << m);
        for d in 0..=m as u32 {
            assert_eq!(ring.degree_indices(d).len(), binomial(m, d as usize));
        }
    }
}

#[test]
fn cup_length_battery_over_both_fields() {
    let opts = CupLengthOptions::default();
    for field in [CoeffField::Rationals, CoeffField::TwoElement] {
        for m in 0..=6usize {
            let ring = exterior_algebra(m, field);
            let module = GradedModule::over_self(&ring);
            let cert = cup_length(&module, &ring, &opts);
            assert_eq!(cert.value, m + 1);
            if m >= 1 {
                // maximal chains consist of degree-1 generators
                assert_eq!(cert.witness.len(), m + 1);
                for label in &cert.witness[1..] {
                    assert!(label.starts_with('x') && !label.contains('∧'), "{label}");
                }
            }
        }
    }
}

#[test]
fn torus_model_certificates() {
    let opts = CupLengthOptions::default();
    for (n, expected) in [(1usize, 3usize), (2, 5), (3, 7)] {
        let (ring, module) = torus_index_module(n, CoeffField::Rationals);
        let cert = cup_length(&module, &ring, &opts);
        assert_eq!(cert.value, expected);
    }
}

/// Applies a random degree-preserving unimodular change of basis to the
/// module of a ring over itself and rebuilds the action table.
fn unimodular_basis_change(
    ring: &GradedRing,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let dim = ring.dim();
    let mut forward: Vec<Vec<i128>> = (0..dim)
        .map(|i| {
            let mut row = vec![0i128; dim];
            row[i] = 1;
            row
        })
        .collect();
    let mut inverse = forward.clone();
    // elementary operations within a fixed degree keep det = ±1 and the
    // grading; applying the inverse ops in reverse order tracks S⁻¹
    for _ in 0..4 * dim {
        let d = ring.degree(rng.gen_range(0..dim));
        let block = ring.degree_indices(d);
        if block.len() < 2 {
            continue;
        }
        let i = block[rng.gen_range(0..block.len())];
        let j = block[rng.gen_range(0..block.len())];
        if i == j {
            continue;
        }
        let factor = *[-2i128, -1, 1, 2].get(rng.gen_range(0..4)).unwrap();
        // S ← E S with E: row_i += factor · row_j
        for c in 0..dim {
            forward[i][c] += factor * forward[j][c];
        }
        // S⁻¹ ← S⁻¹ E⁻¹ with E⁻¹: col_j −= factor · col_i
        for r in 0..dim {
            inverse[r][j] -= factor * inverse[r][i];
        }
    }
    (forward, inverse)
}

#[test]
fn cup_length_is_invariant_under_module_basis_changes() {
    let opts = CupLengthOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(321);
    for m in [2usize, 3, 4] {
        let ring = exterior_algebra(m, CoeffField::Rationals);
        let dim = ring.dim();
        let reference = cup_length(&GradedModule::over_self(&ring), &ring, &opts).value;
        for _ in 0..3 {
            let (s, s_inv) = unimodular_basis_change(&ring, &mut rng);
            // new basis f_i = Σ_c S[i][c] e_c; action in the new basis is
            // S · (action of e on ring) · S⁻¹
            let mut action = Vec::with_capacity(dim);
            for i in 0..dim {
                let mut row = Vec::with_capacity(dim);
                for r in 0..dim {
                    // act f_i · e_r in the old basis
                    let mut old = vec![0i128; dim];
                    for c in 0..dim {
                        if s[i][c] == 0 {
                            continue;
                        }
                        let product = ring
                            .cup(&ring.basis_element(c), &ring.basis_element(r))
                            .unwrap();
                        for (t, &coeff) in product.coeffs().iter().enumerate() {
                            old[t] += s[i][c] * coeff;
                        }
                    }
                    // express in the new basis through S⁻¹
                    let mut entry = Vec::new();
                    for t in 0..dim {
                        let coeff: i128 = (0..dim).map(|u| old[u] * s_inv[u][t]).sum();
                        if coeff != 0 {
                            entry.push((t, coeff));
                        }
                    }
                    row.push(entry);
                }
                action.push(row);
            }
            let labels = (0..dim).map(|i| format!("f{i}")).collect();
            let degrees = (0..dim).map(|i| ring.degree(i)).collect();
            let module = GradedModule::new(&ring, labels, degrees, action).unwrap();
            assert_eq!(cup_length(&module, &ring, &opts).value, reference);
        }
    }
}

#[test]
fn suspension_tables_shift_and_match_binomials() {
    for n in [1usize, 2] {
        let table = suspension_model(n, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(table.stabilized());
        for row in &table.rows {
            for (degree, dim) in &row.dims {
                assert_eq!(*dim, binomial(2 * n, degree - row.shift));
            }
        }
    }
}

#[test]
fn subadditivity_battery_with_expected_values() {
    let opts = CupLengthOptions::default();
    for field in [CoeffField::Rationals, CoeffField::TwoElement] {
        let outcomes = subadditivity_check(&standard_instances(2, field).unwrap(), &opts);
        assert!(outcomes.iter().all(|o| o.pass));
        let by_name = |needle: &str| {
            outcomes
                .iter()
                .find(|o| o.name.contains(needle))
                .unwrap_or_else(|| panic!("missing instance {needle}"))
        };
        let filtration = by_name("ideal-filtration");
        assert_eq!((filtration.lhs_value, filtration.bound), (3, 3));
        assert_eq!(filtration.rhs_values, vec![1, 2]);
        let levels = by_name("degree-levels");
        assert_eq!(levels.rhs_values, vec![1, 1, 1]);
        let restrict = by_name("restrict-to-point");
        assert_eq!(restrict.lhs_value, 1);
        assert_eq!(restrict.bound, 3);
        let one_gen = by_name("restrict-to-one-generator");
        assert_eq!(one_gen.lhs_value, 2);
    }
}

#[test]
fn invalid_structure_constants_are_rejected() {
    // a "unit" of positive degree
    let bad = GradedRing::new(
        CoeffField::Rationals,
        vec!["1".into(), "g".into()],
        vec![0, 1],
        1,
        vec![
            vec![vec![(0, 1)], vec![(1, 1)]],
            vec![vec![(1, 1)], vec![]],
        ],
    );
    assert!(bad.is_err());

    // grading violation: g∪g lands in degree 1 instead of 2
    let bad = GradedRing::new(
        CoeffField::Rationals,
        vec!["1".into(), "g".into()],
        vec![0, 1],
        0,
        vec![
            vec![vec![(0, 1)], vec![(1, 1)]],
            vec![vec![(1, 1)], vec![(1, 1)]],
        ],
    );
    assert!(bad.is_err());

    // non-associative table on three generators
    let bad = GradedRing::new(
        CoeffField::Rationals,
        vec!["1".into(), "a".into(), "b".into(), "c".into()],
        vec![0, 1, 1, 2],
        0,
        vec![
            vec![vec![(0, 1)], vec![(1, 1)], vec![(2, 1)], vec![(3, 1)]],
            vec![vec![(1, 1)], vec![], vec![(3, 1)], vec![]],
            vec![vec![(2, 1)], vec![(3, -1)], vec![(3, 1)], vec![]],
            vec![vec![(3, 1)], vec![], vec![], vec![]],
        ],
    );
    assert!(bad.is_err());

    let sphere = sphere_ring(2, CoeffField::Rationals);
    let foreign = exterior_algebra(1, CoeffField::Rationals);
    assert!(sphere
        .cup(&sphere.basis_element(1), &foreign.basis_element(1))
        .is_err());
}
