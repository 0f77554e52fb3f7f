use gtnet_core::analysis::{spectral_check, verify_graph, CheckStatus, VerifyOptions};
use gtnet_core::graph::{normalize, synthesize, Scheme, SynthKind};

/// Twenty sparse random graphs, sizes 50 to 200, average degree roughly 2 to 6.
fn family() -> Vec<SynthKind> {
    (0..20)
        .map(|i| {
            let n = 50 + 150 * i / 19;
            let avg = 2.0 + 4.0 * (i % 5) as f64 / 4.0;
            SynthKind::ErdosRenyi { n, p: avg / (n - 1) as f64, seed: 1000 + i as u64 }
        })
        .collect()
}

#[test]
fn random_family_passes_every_check() {
    for kind in family() {
        let g = synthesize(&kind).unwrap();
        let rep = verify_graph(&g, &VerifyOptions::default()).unwrap();
        let s = spectral_check(&normalize(&g, Scheme::Symmetric)).unwrap();
        assert!(s.bounds_hold());

        assert!(rep.passed(), "{kind}\n{}", rep.to_text());
        assert_eq!(rep.get("convergence").unwrap().status, CheckStatus::Pass);
    }
}
