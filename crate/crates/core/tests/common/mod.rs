//! Brute-force oracles written without the library's predicates, used to
//! cross-check counts and verdicts.
#![allow(dead_code)]

/// Every flat `n × n` grid with entries in `0..n`, lexicographically.
pub fn all_grids(n: usize) -> Vec<Vec<usize>> {
    let cells = n * n;
    let mut out = Vec::new();
    let mut grid = vec![0; cells];
    loop {
        out.push(grid.clone());
        let mut i = cells;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            grid[i] += 1;
            if grid[i] < n {
                break;
            }
            grid[i] = 0;
        }
    }
}

pub fn left_sd(n: usize, t: &[usize]) -> bool {
    let op = |x: usize, y: usize| t[x * n + y];
    (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| op(x, op(y, z)) == op(op(x, y), op(x, z)))))
}

pub fn right_sd(n: usize, t: &[usize]) -> bool {
    let op = |x: usize, y: usize| t[x * n + y];
    (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| op(op(x, y), z) == op(op(x, z), op(y, z)))))
}

/// Each row `y ↦ t[x][y]` hits every element (image-count test).
pub fn rows_onto(n: usize, t: &[usize]) -> bool {
    (0..n).all(|x| {
        let mut seen = vec![0; n];
        for y in 0..n {
            seen[t[x * n + y]] += 1;
        }
        seen.iter().all(|&c| c == 1)
    })
}

pub fn columns_onto(n: usize, t: &[usize]) -> bool {
    (0..n).all(|y| {
        let mut seen = vec![0; n];
        for x in 0..n {
            seen[t[x * n + y]] += 1;
        }
        seen.iter().all(|&c| c == 1)
    })
}

/// Braid relation for a map on pairs, checked on raw triples.
pub fn braid(n: usize, r: impl Fn(usize, usize) -> (usize, usize)) -> bool {
    let r12 = |(x, y, z): (usize, usize, usize)| {
        let (a, b) = r(x, y);
        (a, b, z)
    };
    let r23 = |(x, y, z): (usize, usize, usize)| {
        let (b, c) = r(y, z);
        (x, b, c)
    };
    (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| r12(r23(r12((x, y, z)))) == r23(r12(r23((x, y, z)))))))
}

/// Number of `(λ, ρ)` grid pairs on `n` elements whose map satisfies the
/// braid relation, with `r(x, y) = (λ[x][y], ρ[y][x])`.
pub fn solution_count(n: usize) -> usize {
    let grids = all_grids(n);
    let mut count = 0;
    for l in &grids {
        for p in &grids {
            if braid(n, |x, y| (l[x * n + y], p[y * n + x])) {
                count += 1;
            }
        }
    }
    count
}
