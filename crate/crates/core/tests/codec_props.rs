use proptest::prelude::*;
use regcode::codec::{encode, read_share, reconstruct, repair, write_share};
use regcode::construction::{build_code, build_explicit_steiner_code_with_layout, BuildOptions, CodeSpec, Layout};
use regcode::designs::{gen_complete_design, tables};
use regcode::ffield::PrimeField;
use std::sync::OnceLock;

fn golden() -> &'static CodeSpec {
    static SPEC: OnceLock<CodeSpec> = OnceLock::new();
    SPEC.get_or_init(|| {
        let design = tables::steiner_2_3_9();
        let layout = Layout::with_placement(&design, tables::steiner_2_3_9_placement()).unwrap();
        build_explicit_steiner_code_with_layout(&design, PrimeField::new(3).unwrap(), layout).unwrap()
    })
}

fn bibd() -> &'static CodeSpec {
    static SPEC: OnceLock<CodeSpec> = OnceLock::new();
    SPEC.get_or_init(|| {
        let opts = BuildOptions { q: Some(1009), ..BuildOptions::default() };
        build_code(&tables::steiner_2_3_7(), 4, &opts).unwrap()
    })
}

fn tdesign() -> &'static CodeSpec {
    static SPEC: OnceLock<CodeSpec> = OnceLock::new();
    SPEC.get_or_init(|| {
        let opts = BuildOptions { q: Some(10007), ..BuildOptions::default() };
        build_code(&gen_complete_design(3, 4, 6).unwrap(), 3, &opts).unwrap()
    })
}

fn specs() -> [&'static CodeSpec; 3] {
    [golden(), bibd(), tdesign()]
}

fn message(spec: &CodeSpec, seed: &[u64]) -> Vec<u64> {
    let q = spec.field.modulus();
    (0..spec.params.m).map(|i| seed[i % seed.len()].wrapping_mul(i as u64 + 1) % q).collect()
}

/// `n - k` distinct disks chosen by rotating through `pick`.
fn erasure(n: u32, count: u32, pick: &[u32]) -> Vec<u32> {
    let mut pool: Vec<u32> = (1..=n).collect();
    let mut out = Vec::new();
    for (i, p) in pick.iter().take(count as usize).enumerate() {
        out.push(pool.remove(*p as usize % (n as usize - i)));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_k_disks_recover_the_message(
        which in 0usize..3,
        seed in prop::collection::vec(any::<u64>(), 1..8),
        pick in prop::collection::vec(any::<u32>(), 4),
    ) {
        let spec = specs()[which];
        let msg = message(spec, &seed);
        let shares = encode(spec, &msg).unwrap();
        let a = erasure(spec.params.n, spec.params.n - spec.params.k, &pick);
        prop_assert_eq!(reconstruct(spec, &shares.without(&a)).unwrap(), msg);
    }

    #[test]
    fn repair_restores_exact_share(
        which in 0usize..3,
        seed in prop::collection::vec(any::<u64>(), 1..8),
        failed in any::<u32>(),
    ) {
        let spec = specs()[which];
        let msg = message(spec, &seed);
        let shares = encode(spec, &msg).unwrap();
        let failed = failed % spec.params.n + 1;
        let (rebuilt, tr) = repair(spec, failed, &shares.without(&[failed])).unwrap();
        prop_assert_eq!(&rebuilt, shares.disk(failed).unwrap());
        prop_assert_eq!(tr.total_symbols as u64, spec.params.gamma);
        if let Some(beta) = spec.params.beta {
            prop_assert!(tr.transfers.iter().all(|t| t.symbols.len() as u64 == beta));
        }
    }

    #[test]
    fn repaired_share_serves_reconstruction(
        seed in prop::collection::vec(any::<u64>(), 1..8),
        failed in 1u32..=9,
        other in 1u32..=9,
    ) {
        let spec = golden();
        let msg = message(spec, &seed);
        let shares = encode(spec, &msg).unwrap();
        let (rebuilt, _) = repair(spec, failed, &shares.without(&[failed])).unwrap();
        // the rebuilt share plus six survivors, leaving out `other` when it differs
        let drop = if other == failed { failed % 9 + 1 } else { other };
        let mut pool = vec![rebuilt];
        pool.extend(shares.without(&[failed, drop]).into_iter().take(6));
        prop_assert_eq!(reconstruct(spec, &pool).unwrap(), msg);
    }

    #[test]
    fn share_files_round_trip(which in 0usize..3, seed in prop::collection::vec(any::<u64>(), 1..8)) {
        let spec = specs()[which];
        let shares = encode(spec, &message(spec, &seed)).unwrap();
        for share in &shares.shares {
            let bytes = write_share(spec, share).unwrap();
            prop_assert_eq!(&read_share(spec, &bytes).unwrap(), share);
        }
    }
}

#[test]
fn every_erasure_set_of_the_bibd_code_decodes() {
    let spec = bibd();
    let msg = message(spec, &[3, 5, 7]);
    let shares = encode(spec, &msg).unwrap();
    let n = spec.params.n;
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                assert_eq!(reconstruct(spec, &shares.without(&[a, b, c])).unwrap(), msg, "A = {a},{b},{c}");
            }
        }
    }
}
