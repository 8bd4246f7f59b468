//! Maximum bipartite matching (augmenting paths, Kuhn's algorithm).
//!
//! Boundary graphs between two groups are small (tens of edges), so the
//! simple O(V·E) augmenting-path search is plenty.

/// Maximum matching of a bipartite graph given as `(left, right)` edges.
///
/// Vertices are arbitrary `usize` labels. The edge order steers which of
/// several maximum matchings is returned: left vertices are tried in order of
/// first appearance and their candidate partners in edge order.
pub fn max_bipartite_matching(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut lefts: Vec<usize> = Vec::new();
    let mut rights: Vec<usize> = Vec::new();
    let index = |list: &mut Vec<usize>, x: usize| match list.iter().position(|&y| y == x) {
        Some(i) => i,
        None => {
            list.push(x);
            list.len() - 1
        }
    };
    let mut adj: Vec<Vec<usize>> = Vec::new();
    for &(l, r) in edges {
        let li = index(&mut lefts, l);
        let ri = index(&mut rights, r);
        if adj.len() <= li {
            adj.resize(li + 1, Vec::new());
        }
        if !adj[li].contains(&ri) {
            adj[li].push(ri);
        }
    }
    let mut match_right: Vec<Option<usize>> = vec![None; rights.len()];
    for l in 0..lefts.len() {
        let mut visited = vec![false; rights.len()];
        augment(l, &adj, &mut match_right, &mut visited);
    }
    let mut out: Vec<(usize, usize)> = match_right
        .iter()
        .enumerate()
        .filter_map(|(r, m)| m.map(|l| (lefts[l], rights[r])))
        .collect();
    out.sort_unstable();
    out
}

fn augment(l: usize, adj: &[Vec<usize>], match_right: &mut [Option<usize>], visited: &mut [bool]) -> bool {
    for &r in &adj[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        if match_right[r].is_none_or(|other| augment(other, adj, match_right, visited)) {
            match_right[r] = Some(l);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(edges: &[(usize, usize)]) -> usize {
        let m = edges.len();
        (0u32..1 << m)
            .filter(|mask| {
                let chosen: Vec<_> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
                chosen.iter().enumerate().all(|(i, a)| chosen[i + 1..].iter().all(|b| a.0 != b.0 && a.1 != b.1))
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn needs_augmentation() {
        // greedy would match 0-10 and strand 1
        let edges = [(0, 10), (0, 11), (1, 10)];
        let m = max_bipartite_matching(&edges);
        assert_eq!(m, vec![(0, 11), (1, 10)]);
    }

    #[test]
    fn star_matches_once() {
        let edges = [(0, 10), (0, 11), (0, 12)];
        assert_eq!(max_bipartite_matching(&edges).len(), 1);
    }

    #[test]
    fn agrees_with_brute_force() {
        let cases: [&[(usize, usize)]; 4] = [
            &[(0, 5), (1, 5), (1, 6), (2, 6), (2, 7), (3, 7)],
            &[(0, 5), (0, 6), (1, 5), (2, 5)],
            &[(4, 9), (3, 9), (3, 8), (2, 8), (1, 7), (0, 7), (0, 6)],
            &[],
        ];
        for edges in cases {
            let m = max_bipartite_matching(edges);
            let size = if edges.is_empty() { 0 } else { brute_force(edges) };
            assert_eq!(m.len(), size);
            for (i, a) in m.iter().enumerate() {
                assert!(edges.contains(a));
                assert!(m[i + 1..].iter().all(|b| a.0 != b.0 && a.1 != b.1));
            }
        }
    }
}
