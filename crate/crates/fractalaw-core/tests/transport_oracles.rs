//! Independent oracles for the transport solvers.
//!
//! The LP is checked against brute-force enumeration of permutation plans
//! (optimal for uniform weights by Birkhoff–von Neumann), the assignment
//! solver against the factorial oracle, and the 1-D quantile coupling
//! against the LP.

use fractalaw_core::measure::{DiscreteMeasure, Point};
use fractalaw_core::rng::RngStream;
use fractalaw_core::transport::{
    assignment_solve, lq_1d, lq_dirac, lq_exact_small, optimal_cost, transport_plan,
};

fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut idx: Vec<usize> = (0..n).collect();
    heap_permute(&mut idx, n, &mut f);
}

fn heap_permute<F: FnMut(&[usize])>(idx: &mut Vec<usize>, k: usize, f: &mut F) {
    if k == 1 {
        f(idx);
        return;
    }
    for i in 0..k {
        heap_permute(idx, k - 1, f);
        if k % 2 == 0 {
            idx.swap(i, k - 1);
        } else {
            idx.swap(0, k - 1);
        }
    }
}

/// Minimal cost over permutation plans for uniform-weight measures.
fn brute_force_uniform_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure, q: f64) -> f64 {
    let n = mu.len();
    assert_eq!(n, nu.len());
    let w = 1.0 / n as f64;
    let mut best = f64::INFINITY;
    for_each_permutation(n, |perm| {
        let cost: f64 = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                w * mu.atoms()[i]
                    .point
                    .dist(&nu.atoms()[j].point)
                    .powf(q)
            })
            .sum();
        best = best.min(cost);
    });
    best
}

fn random_uniform_measure(stream: &mut RngStream, n: usize, dim: usize) -> DiscreteMeasure {
    let w = 1.0 / n as f64;
    let atoms: Vec<(Vec<f64>, f64)> = (0..n)
        .map(|_| {
            let coords: Vec<f64> = (0..dim).map(|_| stream.next_in(-2.0, 2.0)).collect();
            (coords, w)
        })
        .collect();
    let pairs: Vec<(&[f64], f64)> = atoms.iter().map(|(c, w)| (c.as_slice(), *w)).collect();
    DiscreteMeasure::from_pairs(&pairs).unwrap()
}

fn random_weighted_measure(stream: &mut RngStream, n: usize) -> DiscreteMeasure {
    let mut weights: Vec<f64> = (0..n).map(|_| stream.next_in(0.1, 1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    let pairs: Vec<(f64, f64)> = weights
        .iter()
        .map(|&w| (stream.next_in(-3.0, 3.0), w))
        .collect();
    DiscreteMeasure::from_pairs_1d(&pairs).unwrap()
}

#[test]
fn lp_matches_permutation_brute_force() {
    let mut stream = RngStream::from_key(0x0001);
    for trial in 0..60 {
        let n = 2 + (trial % 5); // 2..=6
        let dim = 1 + (trial % 2);
        let mu = random_uniform_measure(&mut stream, n, dim);
        let nu = random_uniform_measure(&mut stream, n, dim);
        for q in [0.5, 1.0, 2.0] {
            let lp = optimal_cost(&mu, &nu, q, 16).unwrap();
            let oracle = brute_force_uniform_cost(&mu, &nu, q);
            assert!(
                (lp - oracle).abs() <= 1e-9 * (1.0 + oracle),
                "trial {trial} q={q}: lp={lp} oracle={oracle}"
            );
        }
    }
}

#[test]
fn quantile_coupling_matches_lp() {
    let mut stream = RngStream::from_key(0x0002);
    for _ in 0..60 {
        let mu = random_weighted_measure(&mut stream, 5);
        let nu = random_weighted_measure(&mut stream, 7);
        for q in [1.0, 2.0, 3.5] {
            let fast = lq_1d(&mu, &nu, q).unwrap();
            let lp = lq_exact_small(&mu, &nu, q).unwrap();
            assert!((fast - lp).abs() <= 1e-9, "q={q}: 1d={fast} lp={lp}");
        }
    }
}

#[test]
fn assignment_matches_factorial_oracle() {
    let mut stream = RngStream::from_key(0x0003);
    for _ in 0..40 {
        let n = 6;
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| stream.next_in(0.0, 10.0)).collect())
            .collect();
        let (perm, total) = assignment_solve(&cost).unwrap();
        // perm must be a permutation.
        let mut seen = vec![false; n];
        for &j in &perm {
            assert!(!seen[j]);
            seen[j] = true;
        }
        let mut best = f64::INFINITY;
        for_each_permutation(n, |p| {
            let c: f64 = p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            best = best.min(c);
        });
        assert!((total - best).abs() <= 1e-9, "hungarian={total} oracle={best}");
    }
}

#[test]
fn metric_axioms_on_random_triples() {
    let mut stream = RngStream::from_key(0x0004);
    for trial in 0..40 {
        let n = 2 + (trial % 4);
        let mu = random_uniform_measure(&mut stream, n, 1);
        let nu = random_uniform_measure(&mut stream, n, 1);
        let rho = random_uniform_measure(&mut stream, n, 1);
        for q in [0.5, 1.0, 2.0] {
            let ab = lq_exact_small(&mu, &nu, q).unwrap();
            let ba = lq_exact_small(&nu, &mu, q).unwrap();
            assert_eq!(ab, ba, "symmetry must be exact");
            assert_eq!(lq_exact_small(&mu, &mu, q).unwrap(), 0.0);
            let ac = lq_exact_small(&mu, &rho, q).unwrap();
            let cb = lq_exact_small(&rho, &nu, q).unwrap();
            assert!(ab <= ac + cb + 1e-9, "triangle: {ab} > {ac} + {cb}");
        }
    }
}

#[test]
fn scaling_identity_in_mass() {
    use fractalaw_core::measure::mix;
    let mut stream = RngStream::from_key(0x0005);
    for _ in 0..40 {
        let mu = random_weighted_measure(&mut stream, 4);
        let nu = random_weighted_measure(&mut stream, 5);
        let alpha = stream.next_in(0.05, 1.0);
        let amu = mix(&[alpha], &[mu.clone()]).unwrap();
        let anu = mix(&[alpha], &[nu.clone()]).unwrap();
        for q in [0.5, 1.0, 2.0] {
            let base = optimal_cost(&mu, &nu, q, 16).unwrap();
            let scaled = optimal_cost(&amu, &anu, q, 16).unwrap();
            assert!(
                (scaled - alpha * base).abs() <= 1e-9 * (1.0 + base),
                "alpha={alpha} q={q}"
            );
        }
    }
}

#[test]
fn mixture_subadditivity() {
    use fractalaw_core::measure::mix;
    let mut stream = RngStream::from_key(0x0006);
    for _ in 0..40 {
        let mu1 = random_weighted_measure(&mut stream, 3);
        let nu1 = random_weighted_measure(&mut stream, 4);
        let mu2 = random_weighted_measure(&mut stream, 4);
        let nu2 = random_weighted_measure(&mut stream, 3);
        let msum = mix(&[0.5, 0.5], &[mu1.clone(), mu2.clone()]).unwrap();
        let nsum = mix(&[0.5, 0.5], &[nu1.clone(), nu2.clone()]).unwrap();
        let h1 = mix(&[0.5], &[mu1]).unwrap();
        let h2 = mix(&[0.5], &[nu1]).unwrap();
        let h3 = mix(&[0.5], &[mu2]).unwrap();
        let h4 = mix(&[0.5], &[nu2]).unwrap();
        for q in [0.5, 1.0, 2.0] {
            let joint = optimal_cost(&msum, &nsum, q, 32).unwrap();
            let split = optimal_cost(&h1, &h2, q, 16).unwrap()
                + optimal_cost(&h3, &h4, q, 16).unwrap();
            assert!(joint <= split + 1e-9, "q={q}: {joint} > {split}");
        }
    }
}

#[test]
fn lipschitz_pushforward_bound() {
    use fractalaw_core::scaling::AffineContraction;
    let mut stream = RngStream::from_key(0x0007);
    for _ in 0..40 {
        let mu = random_weighted_measure(&mut stream, 4);
        let nu = random_weighted_measure(&mut stream, 4);
        let map =
            AffineContraction::new_1d(stream.next_in(-1.5, 1.5), stream.next_in(-1.0, 1.0))
                .unwrap();
        let smu = mu.pushforward(&map).unwrap();
        let snu = nu.pushforward(&map).unwrap();
        let lip = map.lipschitz_ratio();
        for q in [0.5, 1.0, 2.0] {
            let before = lq_exact_small(&mu, &nu, q).unwrap();
            let after = lq_exact_small(&smu, &snu, q).unwrap();
            let factor = lip.powf(q.min(1.0));
            assert!(after <= factor * before + 1e-9, "q={q} lip={lip}");
        }
    }
}

#[test]
fn dirac_closed_forms_match_lp() {
    let mut stream = RngStream::from_key(0x0008);
    for _ in 0..40 {
        let mu = random_weighted_measure(&mut stream, 5);
        let a = Point::x(stream.next_in(-3.0, 3.0));
        let da = DiscreteMeasure::dirac(a);
        for q in [0.5, 1.0, 2.0] {
            let closed = lq_dirac(&mu, &a, q).unwrap();
            let lp = lq_exact_small(&mu, &da, q).unwrap();
            assert!((closed - lp).abs() <= 1e-10, "q={q}: {closed} vs {lp}");
        }
        // Pairs of point masses: l_q(δ_a, δ_b) = d^(1 ∧ q).
        let b = Point::x(stream.next_in(-3.0, 3.0));
        let d = a.dist(&b);
        for q in [0.5, 1.0, 2.0] {
            let v = lq_exact_small(&da, &DiscreteMeasure::dirac(b), q).unwrap();
            assert!((v - d.powf(q.min(1.0))).abs() <= 1e-10);
        }
    }
}

#[test]
fn plan_marginals_within_tolerance_on_random_instances() {
    let mut stream = RngStream::from_key(0x0009);
    for _ in 0..20 {
        let mu = random_weighted_measure(&mut stream, 6);
        let nu = random_weighted_measure(&mut stream, 5);
        let plan = transport_plan(&mu, &nu, 2.0, 16).unwrap();
        for (r, a) in plan.row_marginals().iter().zip(mu.atoms()) {
            assert!((r - a.weight).abs() <= 1e-10);
        }
        for (c, b) in plan.col_marginals().iter().zip(nu.atoms()) {
            assert!((c - b.weight).abs() <= 1e-10);
        }
    }
}
