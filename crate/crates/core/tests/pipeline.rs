//! Cross-module integration: projectivity against semisimplicity, freeness
//! under tensoring, antipode behaviour of the builders, and the self-duality
//! of the smallest group algebra after a character basis change.

use std::sync::Arc;

use hopfcert_core::error::Error;
use hopfcert_core::field::Field;
use hopfcert_core::hopf::{
    antipode_power, build_group_algebra, build_sweedler, build_taft, cyclic_table, dualize,
    verify_hopf, HopfData,
};
use hopfcert_core::matrix::Matrix;
use hopfcert_core::rep::{
    coev_ev_identity, is_free, is_projective, FreenessVerdict, HopfRef, Projectivity, Rep, Side,
};
use hopfcert_core::witness::phi_faithful;

fn qc2() -> HopfRef {
    Arc::new(build_group_algebra(&cyclic_table(2), Field::Rational).unwrap())
}

fn qc3() -> HopfRef {
    Arc::new(build_group_algebra(&cyclic_table(3), Field::Rational).unwrap())
}

fn f2c2() -> HopfRef {
    Arc::new(build_group_algebra(&cyclic_table(2), Field::prime(2).unwrap()).unwrap())
}

fn f3c2() -> HopfRef {
    Arc::new(build_group_algebra(&cyclic_table(2), Field::prime(3).unwrap()).unwrap())
}

fn f3c3() -> HopfRef {
    Arc::new(build_group_algebra(&cyclic_table(3), Field::prime(3).unwrap()).unwrap())
}

fn sweedler() -> HopfRef {
    Arc::new(build_sweedler(Field::Rational).unwrap())
}

fn taft3() -> HopfRef {
    Arc::new(build_taft(3, Field::cyclotomic(3).unwrap()).unwrap())
}

#[test]
fn group_algebra_semisimplicity_matches_characteristic() {
    // k[G] is semisimple exactly when char k does not divide |G|.
    use hopfcert_core::hopf::is_semisimple;
    let cases: Vec<(usize, Field, bool)> = vec![
        (2, Field::Rational, true),
        (3, Field::Rational, true),
        (2, Field::prime(2).unwrap(), false),
        (3, Field::prime(2).unwrap(), true),
        (2, Field::prime(3).unwrap(), true),
        (3, Field::prime(3).unwrap(), false),
    ];
    for (n, field, expect) in cases {
        let h = build_group_algebra(&cyclic_table(n), field.clone()).unwrap();
        assert_eq!(
            is_semisimple(&h).unwrap(),
            expect,
            "k[C{n}] over {field}"
        );
    }
}

#[test]
fn projectivity_follows_semisimplicity() {
    // Over semisimple algebras every small module is projective.
    for h in [qc2(), qc3(), f3c2()] {
        let reg = Rep::regular(&h, Side::Left);
        let mut candidates = vec![
            Rep::trivial(&h, 1, Side::Left),
            Rep::trivial(&h, 2, Side::Left),
            reg.clone(),
            reg.direct_sum(&Rep::trivial(&h, 1, Side::Left)).unwrap(),
        ];
        if reg.dim * reg.dim <= 6 {
            candidates.push(reg.tensor(&reg).unwrap());
        }
        for m in candidates {
            assert!(m.dim <= 6);
            let cert = is_projective(&m).unwrap();
            assert_eq!(
                cert.verdict,
                Projectivity::Projective,
                "dim {} module over semisimple algebra",
                m.dim
            );
        }
    }
    // Over every nonsemisimple builder the trivial module is not projective.
    for h in [f2c2(), f3c3(), sweedler(), taft3()] {
        let t = Rep::trivial(&h, 1, Side::Left);
        let cert = is_projective(&t).unwrap();
        assert_eq!(cert.verdict, Projectivity::NotProjective);
        let t = Rep::trivial(&h, 1, Side::Right);
        let cert = is_projective(&t).unwrap();
        assert_eq!(cert.verdict, Projectivity::NotProjective);
    }
}

#[test]
fn tensoring_with_the_regular_module_is_free_of_matching_rank() {
    for h in [f2c2(), sweedler()] {
        let a = Rep::regular(&h, Side::Left);
        let mut probes = vec![Rep::trivial(&h, 1, Side::Left), Rep::trivial(&h, 3, Side::Left)];
        if h.dim <= 4 {
            probes.push(a.clone());
        }
        for m in probes {
            if m.dim > 4 {
                continue;
            }
            let t = a.tensor(&m).unwrap();
            match is_free(&t).unwrap() {
                FreenessVerdict::Free { rank, .. } => assert_eq!(rank, m.dim),
                other => panic!("A (x) m must be free of rank dim m, got {other:?}"),
            }
        }
    }
}

#[test]
fn end_of_regular_plus_trivial_is_not_free() {
    // End(V) for V = A (+) trivial(1) has dimension (dim A + 1)^2, which is
    // never divisible by dim A; the last tensor summand is trivial.
    let h = f2c2();
    let v = Rep::regular(&h, Side::Left)
        .direct_sum(&Rep::trivial(&h, 1, Side::Left))
        .unwrap();
    let end_v = v.tensor(&v.dual_same_side().unwrap()).unwrap();
    assert_eq!(end_v.dim, 9);
    match is_free(&end_v).unwrap() {
        FreenessVerdict::NotFree { reason } => {
            assert!(reason.contains("divisible"), "{reason}");
        }
        other => panic!("expected not free, got {other:?}"),
    }
}

#[test]
fn antipode_powers_of_builders() {
    // Group algebras are involutory.
    let s2 = antipode_power(&qc2(), 2).unwrap();
    assert!(s2.is_identity());
    // The antipode order is 2n for the Taft family. With the relation
    // xg = q gx the square of the antipode is b -> g^{-1} b g; for the
    // 4-dimensional case g is its own inverse, so this is conjugation by g.
    let t = taft3();
    let s2 = antipode_power(&t, 2).unwrap();
    let g = 1usize; // basis index of the group-like generator
    let g_inv = 2usize; // g^{-1} = g^{n-1} for n = 3
    let conj = t.left_mult_matrix(g_inv).mul(&t.right_mult_matrix(g));
    assert_eq!(s2, conj);

    let sw = sweedler();
    let s2 = antipode_power(&sw, 2).unwrap();
    let conj = sw.left_mult_matrix(1).mul(&sw.right_mult_matrix(1));
    assert_eq!(s2, conj);
    // S has order 2n = 6.
    assert!(antipode_power(&t, 6).unwrap().is_identity());
    assert!(!antipode_power(&t, 2).unwrap().is_identity());
    // Negative powers need an invertible antipode; degrading the matrix
    // surfaces the guard.
    let mut broken = (*sweedler()).clone();
    broken.antipode = Matrix::zero(broken.field.clone(), 4, 4);
    match antipode_power(&broken, -1) {
        Err(Error::NonInvertibleAntipode) => {}
        other => panic!("expected NonInvertibleAntipode, got {other:?}"),
    }
}

#[test]
fn dual_of_qc2_is_isomorphic_after_character_change_of_basis() {
    // The dual of k[C2] is the function algebra; in the character basis
    // {delta_1 + delta_g, delta_1 - delta_g} it is again k[C2].
    let h = qc2();
    let dual = dualize(&h);
    assert!(verify_hopf(&dual).unwrap().all_pass());

    let field = Field::Rational;
    // Columns of P express the new basis in the old one.
    let p = Matrix::from_i64(&field, &[&[1, 1], &[1, -1]]);
    let p_inv = p.inverse().unwrap();
    let transported = transport_basis(&dual, &p, &p_inv);
    assert!(transported.structure_eq(&h), "character basis recovers k[C2]");
}

/// Rewrites Hopf structure constants in the basis whose coordinate matrix is
/// `p` (new basis vectors are the columns of `p`).
fn transport_basis(h: &HopfData, p: &Matrix, p_inv: &Matrix) -> HopfData {
    let d = h.dim;
    let field = h.field.clone();
    let z = field.zero();
    let mut mult = vec![vec![vec![z.clone(); d]; d]; d];
    for a in 0..d {
        for b in 0..d {
            let prod = h.product_vec(&p.col(a), &p.col(b));
            let coords = p_inv.mul_vec(&prod);
            for (c, v) in coords.into_iter().enumerate() {
                mult[a][b][c] = v;
            }
        }
    }
    let unit = p_inv.mul_vec(&h.unit);
    let mut comult = vec![vec![vec![z.clone(); d]; d]; d];
    for c in 0..d {
        // Delta(new_c) in old coordinates, then convert both legs.
        let grid = h.comult_of(&p.col(c));
        let converted = p_inv.mul(&grid).mul(&p_inv.transpose());
        for a in 0..d {
            for b in 0..d {
                comult[c][a][b] = converted.get(a, b).clone();
            }
        }
    }
    let counit: Vec<_> = (0..d).map(|c| h.counit_of(&p.col(c))).collect();
    let antipode = p_inv.mul(&h.antipode).mul(p);
    HopfData {
        field,
        dim: d,
        mult,
        unit,
        comult,
        counit,
        antipode,
        gens: (0..d).collect(),
    }
}

#[test]
fn coevaluation_identity_and_its_corruption() {
    let h = sweedler();
    let v = Rep::regular(&h, Side::Left);
    assert!(coev_ev_identity(&v));

    // With the pairing sign flipped the composite is minus the identity.
    let d = v.dim;
    let field = h.field.clone();
    let mut coev_id = Matrix::zero(field.clone(), d * d * d, d);
    for j in 0..d {
        for i in 0..d {
            coev_id.set(i * d * d + i * d + j, j, field.one());
        }
    }
    let mut bad_ev = Matrix::zero(field.clone(), d, d * d * d);
    for a in 0..d {
        for b in 0..d {
            bad_ev.set(a, a * d * d + b * d + b, field.from_i64(-1));
        }
    }
    assert!(!bad_ev.mul(&coev_id).is_identity());
}

#[test]
fn regular_action_is_faithful_for_all_builders() {
    for h in [qc2(), f2c2(), f3c3(), sweedler(), taft3()] {
        assert!(phi_faithful(&h));
    }
}

#[test]
fn hom_dimension_symmetry_under_joint_dualization() {
    use hopfcert_core::rep::hom_space;
    for h in [f2c2(), sweedler()] {
        let a = Rep::regular(&h, Side::Left);
        let probes = [
            Rep::trivial(&h, 1, Side::Left),
            Rep::trivial(&h, 2, Side::Left),
            a.clone(),
        ];
        for m1 in &probes {
            for m2 in &probes {
                let d1 = hom_space(m1, m2).unwrap().len();
                let d2 = hom_space(&m2.dual(), &m1.dual()).unwrap().len();
                assert_eq!(d1, d2, "hom dims must agree under dualization");
            }
        }
    }
}
