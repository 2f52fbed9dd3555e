use masterfield::equilibrium::solve_equilibrium;
use masterfield::oracle::{charsum_moments, kolmogorov_distance, mcmc_chain, mcmc_moment, CharacterSumConfig};
use masterfield::simple_field::phi_simple;

#[test]
fn large_n_sample_follows_the_semicircle() {
    let eq = solve_equilibrium(1.0).unwrap();
    let states = mcmc_chain(64, 1.0, 64 * 300, 20_000, 11, 0).unwrap();
    let d = kolmogorov_distance(&states, &eq).unwrap();
    println!("Kolmogorov distance at N = 64: {d:.4}");
    assert!(d < 0.05, "{d}");
}

#[test]
fn representation_identity_for_small_n() {
    let (t, a) = (1.0, 0.5);
    let moments = [(0, 1), (1, 1), (0, 2)];
    for n in 2..=4 {
        let exact = charsum_moments(&CharacterSumConfig::new(n, t, a).unwrap(), &moments).unwrap();
        let mut states = Vec::new();
        for chain in 0..2 {
            states.extend(mcmc_chain(n, t, n * 30_000, 2_000, 77, chain).unwrap());
        }
        for (k, &(m, p)) in moments.iter().enumerate() {
            let (mean, se) = mcmc_moment(&states, m, p, a, t - a).unwrap();
            let z = (mean - exact[k].value).abs() / se;
            println!("N={n} ({m},{p}): {mean:.5} +- {se:.1e} vs {:.5}", exact[k].value);
            assert!(z <= 3.0, "N={n} ({m},{p}): {z:.2} standard errors");
        }
    }
}

#[test]
fn character_sums_approach_the_limit() {
    for t in [1.0, 4.0] {
        let a = 0.5 * t;
        let limits: Vec<f64> = (1..=2).map(|n| phi_simple(n, a, t).unwrap()).collect();
        let mut last = [f64::INFINITY; 2];
        for n in 2..=6 {
            let v = charsum_moments(&CharacterSumConfig::new(n, t, a).unwrap(), &[(0, 1), (0, 2)]).unwrap();
            for k in 0..2 {
                let err = (v[k].value - limits[k]).abs();
                assert!(err < last[k], "T={t} n={} N={n}: {err:e} after {:e}", k + 1, last[k]);
                last[k] = err;
            }
        }
    }
}
