// Independent slow census for cross-checking enumerate_classes.
use std::collections::BTreeSet;

fn connects(edges: &[u32], target: u32) -> bool {
    if target == 0 { return true; }
    let mut comp = target & target.wrapping_neg();
    loop {
        let before = comp;
        for &e in edges {
            if e & comp != 0 && e & !target == 0 { comp |= e; }
        }
        if comp == target { return true; }
        if comp == before { return false; }
    }
}

fn main() {
    let n: usize = std::env::args().nth(1).unwrap().parse().unwrap();
    let full: u32 = (1 << n) - 1;
    let cands: Vec<u32> = (0u32..=full).filter(|m| m.count_ones() >= 2).collect();
    let mc = cands.len();
    let perms: Vec<Vec<usize>> = perms_of(n);
    let mut classes: BTreeSet<Vec<u32>> = BTreeSet::new();
    for fam in 1u64..(1 << mc) {
        let set: Vec<u32> = (0..mc).filter(|&i| fam & (1 << i) != 0).map(|i| cands[i]).collect();
        let covered = set.iter().fold(0u32, |a, &m| a | m);
        if covered != full { continue; }
        if !connects(&set, full) { continue; }
        // fixpoint: no monomial removable by rule 5
        let removable = set.iter().any(|&m| {
            if m.count_ones() < 3 { return false; }
            let subs: Vec<u32> = set.iter().copied().filter(|&e| e != m && e & !m == 0).collect();
            !subs.is_empty() && connects(&subs, m)
        });
        if removable { continue; }
        // canonical form: minimal sorted mask vector over relabelings
        let mut best: Option<Vec<u32>> = None;
        for p in &perms {
            let mut v: Vec<u32> = set.iter().map(|&m| apply(m, p)).collect();
            v.sort_unstable();
            if best.as_ref().map_or(true, |b| v < *b) { best = Some(v); }
        }
        classes.insert(best.unwrap());
    }
    println!("{}", classes.len());
}

fn apply(m: u32, p: &[usize]) -> u32 {
    (0..p.len()).filter(|&i| m & (1 << i) != 0).fold(0, |a, i| a | (1 << p[i]))
}

fn perms_of(n: usize) -> Vec<Vec<usize>> {
    if n == 1 { return vec![vec![0]]; }
    let mut out = Vec::new();
    for p in perms_of(n - 1) {
        for pos in 0..n {
            let mut q: Vec<usize> = p.iter().map(|&x| if x >= pos { x + 1 } else { x }).collect();
            q.insert(0, pos);
            out.push(q);
        }
    }
    out
}
