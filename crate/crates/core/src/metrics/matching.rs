use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Maximum bipartite matching by Hopcroft-Karp.
///
/// `adj[u]` lists the right vertices adjacent to left vertex `u`; lists are
/// scanned in the given order, so the result is deterministic. Returns the
/// partner of every left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];

    loop {
        // BFS layering from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == FREE {
                augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut next);
            }
        }
    }
    match_l
        .into_iter()
        .map(|v| (v != FREE).then_some(v))
        .collect()
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[u] < adj[u].len() {
        let v = adj[u][next[u]];
        next[u] += 1;
        let w = match_r[v];
        let ok = if w == FREE {
            true
        } else if dist[w] == dist[u].wrapping_add(1) {
            augment(w, adj, match_l, match_r, dist, next)
        } else {
            false
        };
        if ok {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Vertices reachable from free left vertices along alternating paths, given
/// a maximum matching. The reachable left set `A` satisfies
/// `|N(A)| = |A| - #free`, a Hall-violation certificate when some left
/// vertex is free.
pub fn alternating_reach(
    adj: &[Vec<usize>],
    n_right: usize,
    match_l: &[Option<usize>],
) -> (Vec<usize>, Vec<usize>) {
    let mut match_r = vec![FREE; n_right];
    for (u, m) in match_l.iter().enumerate() {
        if let Some(v) = m {
            match_r[*v] = u;
        }
    }
    let mut seen_l = vec![false; adj.len()];
    let mut seen_r = vec![false; n_right];
    let mut queue: VecDeque<usize> = (0..adj.len()).filter(|&u| match_l[u].is_none()).collect();
    for &u in &queue {
        seen_l[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen_r[v] {
                seen_r[v] = true;
                let w = match_r[v];
                if w != FREE && !seen_l[w] {
                    seen_l[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    let left = (0..adj.len()).filter(|&u| seen_l[u]).collect();
    let right = (0..n_right).filter(|&v| seen_r[v]).collect();
    (left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_max(adj: &[Vec<usize>], n_right: usize) -> usize {
        fn go(u: usize, adj: &[Vec<usize>], used: &mut Vec<bool>) -> usize {
            if u == adj.len() {
                return 0;
            }
            let mut best = go(u + 1, adj, used);
            for &v in &adj[u] {
                if !used[v] {
                    used[v] = true;
                    best = best.max(1 + go(u + 1, adj, used));
                    used[v] = false;
                }
            }
            best
        }
        go(0, adj, &mut vec![false; n_right])
    }

    #[test]
    fn small_cases() {
        let adj = vec![vec![0, 1], vec![0], vec![]];
        let m = hopcroft_karp(&adj, 2);
        assert_eq!(m, vec![Some(1), Some(0), None]);
        let (a, n) = alternating_reach(&adj, 2, &m);
        assert_eq!((a, n), (vec![2], vec![]));
    }

    proptest! {
        #[test]
        fn matches_brute_force(bits in proptest::collection::vec(any::<bool>(), 36), nl in 1usize..6, nr in 1usize..6) {
            let adj: Vec<Vec<usize>> = (0..nl)
                .map(|u| (0..nr).filter(|&v| bits[u * 6 + v]).collect())
                .collect();
            let m = hopcroft_karp(&adj, nr);
            let size = m.iter().flatten().count();
            prop_assert_eq!(size, brute_max(&adj, nr));
            let mut used = vec![false; nr];
            for (u, v) in m.iter().enumerate() {
                if let Some(v) = v {
                    prop_assert!(adj[u].contains(v));
                    prop_assert!(!used[*v]);
                    used[*v] = true;
                }
            }
            let (a, n) = alternating_reach(&adj, nr, &m);
            let free = m.iter().filter(|x| x.is_none()).count();
            prop_assert_eq!(n.len() + free, a.len());
        }
    }
}
