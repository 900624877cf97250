//! Oracle checks for the special-function layer: frozen extended-precision
//! reference values, an independent quadrature-plus-inversion oracle for
//! the Jacobi functions, and the functional identities on dense grids.

use twofield::elliptic::{complete_e, complete_k, jacobi, EllipticParameter};

fn param(m: f64) -> EllipticParameter {
    EllipticParameter::new(m).unwrap()
}

/// Reference values computed once at 40 significant digits (mpmath) and
/// frozen here; independent of the AGM implementation under test.
const K_REFERENCE: &[(f64, f64)] = &[
    (0.1, 1.6124413487202193982),
    (0.2, 1.6596235986105280009),
    (0.3, 1.713889448178791062),
    (0.4, 1.7775193714912533235),
    (0.5, 1.8540746773013719184),
    (0.6, 1.9495677498060258827),
    (0.7, 2.0753631352924691439),
    (0.8, 2.2572053268208536551),
    (0.9, 2.5780921133481731882),
    (0.95, 2.9083372484445521001),
    (0.99, 3.6956373629898746778),
];

const E_REFERENCE: &[(f64, f64)] = &[
    (0.1, 1.5307576368977632025),
    (0.2, 1.4890350580958529294),
    (0.3, 1.445363064412665262),
    (0.4, 1.3993921388974322503),
    (0.5, 1.3506438810476755025),
    (0.6, 1.2984280350469131676),
    (0.7, 1.2416705679458227509),
    (0.8, 1.178489924327838523),
    (0.9, 1.1047747327040733261),
    (0.95, 1.0604737277662782427),
    (0.99, 1.0159935450252239356),
];

#[test]
fn complete_k_matches_frozen_oracle() {
    for &(m, want) in K_REFERENCE {
        let got = complete_k(param(m)).unwrap();
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "K({m}) = {got}, oracle {want}"
        );
    }
}

#[test]
fn complete_e_matches_frozen_oracle() {
    for &(m, want) in E_REFERENCE {
        let got = complete_e(param(m));
        assert!(
            ((got - want) / want).abs() < 1e-12,
            "E({m}) = {got}, oracle {want}"
        );
    }
}

#[test]
fn complete_k_strictly_increasing() {
    let grid: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
    let mut prev = 0.0;
    for &m in &grid {
        let k = complete_k(param(m)).unwrap();
        assert!(k > prev, "K not increasing at m = {m}");
        prev = k;
    }
}

#[test]
fn complete_e_strictly_decreasing() {
    let mut prev = f64::INFINITY;
    for i in 0..=100 {
        let e = complete_e(param(i as f64 / 100.0));
        assert!(e < prev, "E not decreasing at m = {}", i as f64 / 100.0);
        prev = e;
    }
}

/// sn/cn/dn values frozen from mpmath at 40 digits.
#[test]
fn jacobi_matches_frozen_oracle() {
    let cases = [
        (1.2, 0.7, 0.86718329329023861836, 0.49798909208766409412, 0.68818253035572415095),
        (0.35, 0.25, 0.34126202739382265851, 0.93996820619585736784, 0.98533499743222581749),
        (2.5, 0.9, 0.99969453845058613495, 0.024714971010898632614, 0.31709580068626358868),
    ];
    for (u, m, sn, cn, dn) in cases {
        let t = jacobi(u, param(m));
        assert!((t.sn - sn).abs() < 1e-13, "sn({u}|{m}) = {}, oracle {sn}", t.sn);
        assert!((t.cn - cn).abs() < 1e-13, "cn({u}|{m}) = {}, oracle {cn}", t.cn);
        assert!((t.dn - dn).abs() < 1e-13, "dn({u}|{m}) = {}, oracle {dn}", t.dn);
    }
}

/// Independent oracle: invert the incomplete integral of the first kind,
/// F(φ|m) = ∫₀^φ dθ/√(1−m sin²θ), by bisection on φ. If F(φ|m) = u then
/// sn(u|m) = sin φ, cn = cos φ, dn = √(1−m sin²φ). The integral is done
/// with composite Simpson on a fine grid — no AGM anywhere.
fn incomplete_f(phi: f64, m: f64) -> f64 {
    let n = 20_000; // even
    let h = phi / n as f64;
    let f = |theta: f64| 1.0 / (1.0 - m * theta.sin().powi(2)).sqrt();
    let mut s = f(0.0) + f(phi);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 0 { 2.0 } else { 4.0 };
    }
    s * h / 3.0
}

#[test]
fn jacobi_agrees_with_integral_inversion_oracle() {
    let (u, m) = (1.2, 0.7);
    // Bisection for the amplitude phi with F(phi|m) = u.
    let (mut lo, mut hi) = (0.0_f64, std::f64::consts::FRAC_PI_2);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if incomplete_f(mid, m) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let phi = 0.5 * (lo + hi);
    let t = jacobi(u, param(m));
    assert!((t.sn - phi.sin()).abs() < 1e-9, "sn vs sin(amplitude)");
    assert!((t.cn - phi.cos()).abs() < 1e-9, "cn vs cos(amplitude)");
    let dn_oracle = (1.0 - m * phi.sin().powi(2)).sqrt();
    assert!((t.dn - dn_oracle).abs() < 1e-9, "dn vs sqrt(1 - m sin²)");
}

#[test]
fn pythagorean_identities_on_dense_grid() {
    for im in 0..=99 {
        let m = im as f64 / 100.0;
        let par = param(m);
        let k = complete_k(par).unwrap();
        for iu in -80..=80 {
            let u = 2.0 * k * iu as f64 / 80.0;
            let t = jacobi(u, par);
            let id1 = t.sn * t.sn + t.cn * t.cn - 1.0;
            let id2 = t.dn * t.dn + m * t.sn * t.sn - 1.0;
            assert!(id1.abs() < 1e-11, "sn²+cn²−1 = {id1:e} at u={u}, m={m}");
            assert!(id2.abs() < 1e-11, "dn²+m·sn²−1 = {id2:e} at u={u}, m={m}");
        }
    }
}

#[test]
fn dn_stays_within_bounds() {
    for im in 0..=99 {
        let m = im as f64 / 100.0;
        let par = param(m);
        let k = complete_k(par).unwrap();
        let floor = (1.0 - m).sqrt();
        for iu in -40..=40 {
            let t = jacobi(2.0 * k * iu as f64 / 40.0, par);
            assert!(t.dn <= 1.0 + 1e-12 && t.dn >= floor - 1e-12);
        }
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-5;
    for &m in &[0.1, 0.45, 0.8, 0.97] {
        let par = param(m);
        for &u in &[-1.7, -0.6, 0.25, 1.1, 2.3] {
            let plus = jacobi(u + h, par);
            let minus = jacobi(u - h, par);
            let at = jacobi(u, par);
            let dsn = (plus.sn - minus.sn) / (2.0 * h);
            let ddn = (plus.dn - minus.dn) / (2.0 * h);
            let want_dsn = at.cn * at.dn;
            let want_ddn = -m * at.sn * at.cn;
            assert!(
                ((dsn - want_dsn) / want_dsn.abs().max(1e-3)).abs() < 1e-6,
                "d/du sn mismatch at u={u}, m={m}: {dsn} vs {want_dsn}"
            );
            assert!(
                ((ddn - want_ddn) / want_ddn.abs().max(1e-3)).abs() < 1e-6,
                "d/du dn mismatch at u={u}, m={m}: {ddn} vs {want_ddn}"
            );
        }
    }
}

#[test]
fn parity_relations() {
    for &m in &[0.0, 0.2, 0.55, 0.9, 0.999] {
        let par = param(m);
        for &u in &[0.15, 0.8, 1.9, 3.4] {
            let pos = jacobi(u, par);
            let neg = jacobi(-u, par);
            assert!((pos.sn + neg.sn).abs() < 1e-12, "sn odd at u={u}, m={m}");
            assert!((pos.cn - neg.cn).abs() < 1e-12, "cn even at u={u}, m={m}");
            assert!((pos.dn - neg.dn).abs() < 1e-12, "dn even at u={u}, m={m}");
        }
    }
}

#[test]
fn sn_periodicity_over_full_period() {
    for &m in &[0.1, 0.5, 0.88] {
        let par = param(m);
        let k = complete_k(par).unwrap();
        for &u in &[-1.3, 0.0, 0.7, 2.1] {
            let a = jacobi(u, par);
            let b = jacobi(u + 4.0 * k, par);
            assert!(
                (a.sn - b.sn).abs() < 1e-10,
                "sn(u+4K) != sn(u) at u={u}, m={m}: {} vs {}",
                a.sn,
                b.sn
            );
        }
    }
}

#[test]
fn special_argument_values() {
    // sn(K|m) = 1, cn(K|m) = 0, dn(K|m) = sqrt(1-m).
    for &m in &[0.3, 0.6, 0.95] {
        let par = param(m);
        let k = complete_k(par).unwrap();
        let t = jacobi(k, par);
        assert!((t.sn - 1.0).abs() < 1e-12);
        assert!(t.cn.abs() < 1e-12);
        assert!((t.dn - (1.0 - m).sqrt()).abs() < 1e-12);
    }
}
