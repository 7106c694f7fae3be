use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use unramified::bernoulli::IrregularSet;
use unramified::modmath::{
    convolution_mod, convolution_schoolbook, mod_inv, series_inverse, PrimeModulus, Residue,
};
use unramified::packing::{
    brute_force_packing, conflict_diffs, max_disjoint_translates_exact,
    max_disjoint_translates_greedy, translates_disjoint, PackingInstance,
};
use unramified::pairing::{eligible_set, parse_pairing_table, PairingTable};

const PRIMES: [u64; 8] = [5, 7, 37, 101, 7_681, 65_537, 1_000_003, 4_294_967_291];

fn prime() -> impl Strategy<Value = PrimeModulus> {
    prop::sample::select(PRIMES.to_vec()).prop_map(|p| PrimeModulus::new(p).unwrap())
}

fn instance() -> impl Strategy<Value = PackingInstance> {
    (1u32..=30)
        .prop_map(|h| 2 * h)
        .prop_flat_map(|m| {
            (
                Just(m),
                prop::collection::btree_set(0..m, 1..=4),
                prop::collection::btree_set(0..m, 0..=20),
            )
        })
        .prop_map(|(m, r, i)| PackingInstance::new(m, r, i).unwrap())
}

proptest! {
    #[test]
    fn convolution_matches_schoolbook(
        p in prime(),
        u in prop::collection::vec(any::<u64>(), 0..160),
        v in prop::collection::vec(any::<u64>(), 0..160),
    ) {
        prop_assert_eq!(convolution_mod(&u, &v, p), convolution_schoolbook(&u, &v, p));
    }

    #[test]
    fn inverse_is_an_involution(p in prime(), a in 1u64..u64::MAX) {
        let x = Residue::new(a, p.as_u64());
        prop_assume!(!x.is_zero());
        let inv = mod_inv(x, p).unwrap();
        prop_assert_eq!(p.mul(inv.value(), x.value()), 1);
        prop_assert_eq!(mod_inv(inv, p).unwrap(), x);
    }

    #[test]
    fn series_inverse_inverts(p in prime(), f in prop::collection::vec(any::<u64>(), 1..60)) {
        prop_assume!(f[0] % p.as_u64() != 0);
        let n = f.len();
        let g = series_inverse(&f, n, p).unwrap();
        let prod = convolution_schoolbook(&f, &g, p);
        prop_assert_eq!(prod[0], 1);
        prop_assert!(prod[1..n].iter().all(|&c| c == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn exact_packing_matches_brute_force(inst in instance()) {
        let exact = max_disjoint_translates_exact(&inst);
        let brute = brute_force_packing(&inst).unwrap();
        let greedy = max_disjoint_translates_greedy(&inst);
        prop_assert!(exact.optimal);
        prop_assert_eq!(exact.d, brute.d);
        prop_assert_eq!(&exact.witness, &brute.witness);
        prop_assert!(greedy.d <= exact.d);
        let r = inst.shape().len();
        let s = inst.candidates().len();
        prop_assert!(greedy.d * (r * r - r + 1) >= s);
        for res in [&exact, &greedy, &brute] {
            prop_assert_eq!(res.witness.len(), res.d);
            prop_assert!(res.witness.iter().all(|i| inst.candidates().contains(i)));
            prop_assert!(translates_disjoint(inst.modulus(), inst.shape(), &res.witness));
        }
    }
}

proptest! {
    #[test]
    fn packing_is_shift_invariant(inst in instance(), c in 0u32..60) {
        let d = max_disjoint_translates_exact(&inst).d;
        prop_assert_eq!(max_disjoint_translates_exact(&inst.shifted(c)).d, d);
    }

    #[test]
    fn difference_set_is_symmetric(inst in instance()) {
        let m = inst.modulus();
        let d = conflict_diffs(inst.shape(), m);
        prop_assert!(d.contains(&0));
        for &x in &d {
            prop_assert!(d.contains(&((m - x) % m)));
        }
        let r = inst.shape().len();
        prop_assert!(d.len() <= r * r - r + 1);
    }
}

fn set_157() -> IrregularSet {
    IrregularSet::new(PrimeModulus::new(157).unwrap(), vec![62, 110]).unwrap()
}

fn e_entries() -> impl Strategy<Value = BTreeMap<(u32, u32), u64>> {
    prop::collection::btree_map(
        (
            (0u32..78).prop_map(|h| 2 * h + 1),
            prop::sample::select(vec![62u32, 110]),
        ),
        0u64..157,
        0..40,
    )
}

fn table_from(entries: &BTreeMap<(u32, u32), u64>) -> PairingTable {
    let r = set_157();
    let mut t = PairingTable::empty(r.prime());
    for (&(i, k), &v) in entries {
        t.insert_e(&r, i, k, v).unwrap();
    }
    t
}

proptest! {
    #[test]
    fn pairing_round_trip(
        entries in e_entries(),
        b in prop::option::of(1u64..157),
        order in any::<prop::sample::Index>(),
        comment in any::<bool>(),
    ) {
        let mut lines: Vec<String> = entries
            .iter()
            .map(|(&(i, k), v)| format!("E  157\t{i} {k}\t\t{v}"))
            .collect();
        if let Some(b) = b {
            lines.push(format!("B 157 62 110 {b}"));
        }
        if !lines.is_empty() {
            let at = order.index(lines.len());
            lines.rotate_left(at);
        }
        if comment {
            lines.insert(0, "# generated".into());
            lines.push(String::new());
        }
        let text = lines.join("\n");
        let t = parse_pairing_table(text.as_bytes(), &set_157()).unwrap();
        let canonical = t.to_tsv();
        let again = parse_pairing_table(canonical.as_bytes(), &set_157()).unwrap();
        prop_assert_eq!(again.to_tsv(), canonical.clone());
        let mut expected = String::new();
        if let Some(b) = b {
            expected.push_str(&format!("B\t157\t62\t110\t{b}\n"));
        }
        for (&(i, k), v) in &entries {
            expected.push_str(&format!("E\t157\t{i}\t{k}\t{v}\n"));
        }
        prop_assert_eq!(canonical, expected);
    }

    #[test]
    fn eligible_set_is_monotone(
        entries in e_entries(),
        key in ((0u32..78).prop_map(|h| 2 * h + 1), prop::sample::select(vec![62u32, 110])),
        value in 1u64..157,
    ) {
        let r = set_157();
        let before = eligible_set(&r, &table_from(&entries)).unwrap();
        let mut more = entries.clone();
        more.insert(key, value);
        let grown = eligible_set(&r, &table_from(&more)).unwrap();
        let before_i: BTreeSet<_> = before.eligible.iter().collect();
        let grown_i: BTreeSet<_> = grown.eligible.iter().collect();
        if entries.get(&key).is_none_or(|&v| v != 0) {
            prop_assert!(before_i.is_subset(&grown_i));
        }
        let mut fewer = entries.clone();
        fewer.insert(key, 0);
        let shrunk = eligible_set(&r, &table_from(&fewer)).unwrap();
        let shrunk_i: BTreeSet<_> = shrunk.eligible.iter().collect();
        prop_assert!(shrunk_i.is_subset(&before_i));
        for e in [&before, &grown, &shrunk] {
            prop_assert!(e.eligible.iter().all(|i| !e.missing.contains(i)));
        }
    }
}
