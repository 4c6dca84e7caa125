use super::*;

fn sys(p: u64, e: u32, n: u32) -> CharSystem {
    CharSystem::new(p, e, n).unwrap()
}

/// `Ω_l(x)` by summing over all characters directly.
fn omega_l_direct(s: &CharSystem, lattice: &OrderLattice, x: LogElem) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let all = std::iter::once(LOG_ZERO).chain(0..s.order() as u32);
    for a in all {
        let ex = s.additive_order_exponents(lattice, a);
        if ex.iter().any(|&e| e > 1) {
            continue;
        }
        let mu = if ex.iter().sum::<u32>() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        acc += s.psi(a, x) * (mu / lattice.phi(&ex) as f64);
    }
    lattice.theta() * acc.re
}

#[test]
fn f4_characters() {
    let s = sys(2, 1, 2);
    assert_eq!(s.num_mult_chars(), 3);
    assert_eq!(s.num_add_chars(), 4);
    for x in std::iter::once(LOG_ZERO).chain(0..3) {
        assert_eq!(s.psi(LOG_ZERO, x), Complex64::new(1.0, 0.0));
        assert_eq!(s.chi(0, x), Complex64::new(1.0, 0.0));
    }
    assert_eq!(s.chi(1, LOG_ZERO), Complex64::new(0.0, 0.0));
    let s = sys(2, 1, 4);
    for j in 0..15u64 {
        let ord = s.chi_order(j);
        assert_eq!(ord, 15 / num_integer::gcd(j, 15));
        // χ_j^ord is trivial on every unit
        for k in 0..15u32 {
            let v = s.chi(j, k).powu(ord as u32);
            assert!((v - 1.0).norm() < 1e-12);
        }
    }
}

#[test]
fn orthogonality_small_fields() {
    for (p, e, n) in [
        (2, 1, 1),
        (2, 1, 2),
        (2, 1, 3),
        (3, 1, 2),
        (2, 2, 2),
        (3, 1, 3),
        (7, 1, 1),
        (5, 1, 2),
    ] {
        let r = sys(p, e, n).orthogonality_check();
        assert!(r.pass, "{p}^{e}^{n}: {r:?}");
        assert!(r.mult_max_dev < 1e-12);
    }
}

#[test]
fn gauss_magnitudes() {
    let r = sys(3, 1, 2).gauss_magnitude_check();
    assert!(r.pass);
    assert_eq!(r.expected_magnitude, 3.0);
    assert_eq!(r.pairs, 8 * 7);
    let r = sys(2, 1, 2).gauss_magnitude_check();
    assert!(r.pass && r.expected_magnitude == 2.0);
    assert!(r.trivial_chi_unit_sum_dev < 1e-12);
    // direct summation for one pair in F_27
    let s = sys(3, 1, 3);
    let mut g = Complex64::new(0.0, 0.0);
    for k in 0..26u32 {
        g += s.chi(5, k) * s.psi(11, k);
    }
    assert!((g.norm() - 27f64.sqrt()).abs() < 1e-9);
}

#[test]
fn omega_on_f4() {
    let s = sys(2, 1, 2);
    let w = s.omega();
    let gens: Vec<usize> = (1..4).filter(|&i| (w[i] - 1.0).abs() < 1e-12).collect();
    assert_eq!(gens.len(), 2);
    assert!(w
        .iter()
        .skip(1)
        .all(|v| v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12));
    // ω(0) = θ(3) = 2/3
    assert!((w[0] - 2.0 / 3.0).abs() < 1e-12);
    assert!(s.omega_check().pass);
}

#[test]
fn normality_function_on_f4() {
    let s = sys(2, 1, 2);
    let lattice = s.order_lattice(1).unwrap();
    let v = s.normality_function(&lattice);
    // normal elements of F_4 over F_2 are the two roots of x^2 + x + 1
    let ones: Vec<usize> = (0..4).filter(|&i| (v[i] - 1.0).abs() < 1e-12).collect();
    assert_eq!(ones, vec![2, 3]);
    assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
}

#[test]
fn fft_matches_direct_summation() {
    for (p, e, n) in [
        (2, 1, 4),
        (3, 1, 3),
        (3, 1, 2),
        (2, 2, 2),
        (2, 1, 6),
        (5, 1, 2),
    ] {
        let s = sys(p, e, n);
        for l in divisors(n as u64) {
            let lattice = s.order_lattice(l).unwrap();
            let fast = s.normality_function(&lattice);
            for idx in 0..s.size() {
                let x = s.table().from_index(idx);
                let d = omega_l_direct(&s, &lattice, x);
                assert!(
                    (fast[idx as usize] - d).abs() < 1e-9,
                    "{p} {e} {n} l={l} idx={idx}"
                );
            }
        }
    }
}

#[test]
fn additive_orders_f4_over_f2() {
    let s = sys(2, 1, 2);
    let lattice = s.order_lattice(1).unwrap();
    // X^2 - 1 = (X - 1)^2 over F_2
    assert_eq!(lattice.factors.len(), 1);
    assert_eq!(lattice.multiplicity, 2);
    let mut by_degree = [0u64; 3];
    for a in std::iter::once(LOG_ZERO).chain(0..3) {
        by_degree[lattice.degree_of(&s.additive_order_exponents(&lattice, a))] += 1;
    }
    // orders 1, X - 1, (X - 1)^2 occur φ = 1, 1, 2 times
    assert_eq!(by_degree, [1, 1, 2]);
    let o = s.additive_order(&s.ctx().zero(), 1).unwrap();
    assert_eq!(o.degree, 0);
    assert_eq!(o.order_poly, vec![s.ctx().one()]);
    assert!(s.order_count_check(&lattice).pass);
}

#[test]
fn order_lattice_shapes() {
    // q = 4, n = 3: X^3 - 1 splits over F_4
    let s = sys(2, 2, 3);
    let lat = s.order_lattice(1).unwrap();
    assert_eq!(
        lat.factors.iter().map(|f| f.degree).collect::<Vec<_>>(),
        vec![1, 1, 1]
    );
    // q = 2, n = 5: (X - 1)(X^4 + X^3 + X^2 + X + 1)
    let s = sys(2, 1, 5);
    let lat = s.order_lattice(1).unwrap();
    assert_eq!(
        lat.factors.iter().map(|f| f.degree).collect::<Vec<_>>(),
        vec![1, 4]
    );
    // q = 2, n = 7: degrees 1, 3, 3
    let s = sys(2, 1, 7);
    let lat = s.order_lattice(1).unwrap();
    assert_eq!(
        lat.factors.iter().map(|f| f.degree).collect::<Vec<_>>(),
        vec![1, 3, 3]
    );
    assert!(s.order_count_check(&lat).pass);
    assert!(s.order_lattice(2).is_err());
}

#[test]
fn self_test_passes() {
    for (p, e, n) in [
        (2, 1, 1),
        (2, 1, 2),
        (2, 1, 3),
        (2, 1, 4),
        (2, 1, 6),
        (2, 2, 2),
        (2, 2, 3),
        (3, 1, 2),
        (3, 1, 4),
        (3, 2, 2),
        (5, 1, 2),
        (7, 1, 3),
        (13, 1, 1),
    ] {
        let r = chars_selftest(p, e, n).unwrap();
        assert!(r.pass, "{p} {e} {n}: {r:#?}");
    }
}

#[test]
fn identity_matches_counts() {
    // q = 2, n = 6: brute-force CN count
    let s = sys(2, 1, 6);
    let r = s.view_checks().unwrap();
    let cn = (0..64u64)
        .filter(|&i| crate::fqxpoly::is_completely_normal(s.ctx(), &s.ctx().from_index(i)))
        .count() as u64;
    assert_eq!(r.identity.cn, cn);
    assert!((r.identity.cn_sum - cn as f64).abs() < 1e-6);
    assert!(r.identity.pcn > 0);
}

#[test]
fn relabel_keeps_tables() {
    let s = sys(2, 1, 6);
    let t = s.relabel(2).unwrap();
    assert_eq!((t.q(), t.n()), (4, 3));
    assert_eq!(t.size(), s.size());
    assert!(t.view_checks().unwrap().pass);
    assert!(s.relabel(4).is_err());
}

#[test]
fn too_large() {
    assert!(matches!(
        CharSystem::new(2, 1, 13),
        Err(CharError::FieldTooLarge { .. })
    ));
}
