use unramified::bernoulli::irregular_sweep;

#[test]
fn counts_below_25000() {
    let sets = irregular_sweep(25_000, 2, None).unwrap();
    assert_eq!(sets.len(), 2759);
    let mut by_r = [0usize; 5];
    for s in &sets {
        by_r[s.r()] += 1;
    }
    assert_eq!(by_r, [1670, 831, 221, 35, 2]);

    let small: Vec<u32> = sets
        .iter()
        .filter(|s| s.r() >= 2 && s.prime().get() < 1000)
        .map(|s| s.prime().get())
        .collect();
    assert_eq!(
        small,
        [157, 353, 379, 467, 491, 547, 587, 617, 631, 647, 673, 691, 809, 929]
    );
    // everything with r >= 2 past 1000, apart from 1217, 7069 and 9829
    let rest = sets
        .iter()
        .filter(|s| s.r() >= 2 && s.prime().get() > 1000)
        .filter(|s| ![1217, 7069, 9829].contains(&s.prime().get()))
        .count();
    assert_eq!(rest, 241);
}
