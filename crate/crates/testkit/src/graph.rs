//! Distance and closeness references over plain edge lists.

/// All-pairs hop distances by Floyd–Warshall. `None` means unreachable.
pub fn all_pairs(n: usize, edges: &[(usize, usize)], directed: bool) -> Vec<Vec<Option<usize>>> {
    let mut d = vec![vec![None; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = Some(0);
    }
    for &(a, b) in edges {
        if a != b {
            d[a][b] = Some(1);
            if !directed {
                d[b][a] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    if d[i][j].is_none_or(|ij| ik + kj < ij) {
                        d[i][j] = Some(ik + kj);
                    }
                }
            }
        }
    }
    d
}

/// Component-normalized closeness straight from the distance matrix.
pub fn closeness(dist: &[Vec<Option<usize>>]) -> Vec<f64> {
    let n = dist.len();
    dist.iter()
        .enumerate()
        .map(|(v, row)| {
            let reach: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|&(w, d)| w != v && d.is_some())
                .map(|(_, d)| d.unwrap())
                .collect();
            if reach.is_empty() {
                return 0.0;
            }
            let r = reach.len() as f64;
            let s: usize = reach.iter().sum();
            (r / (n - 1) as f64) * (r / s as f64)
        })
        .collect()
}

/// Node ids by descending score, ascending id on ties.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..scores.len()).collect();
    ids.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    ids
}
