//! Dense linear algebra over GF(p) for small primes.
//!
//! Vectors are `Vec<u8>` with entries in `0..p`. Matrices act on column
//! vectors: `(M v)[r] = Σ_c M[r][c]·v[c]`.

pub type Vector = Vec<u8>;
pub type Matrix = Vec<Vec<u8>>;

pub fn inv_mod(a: u8, p: u8) -> u8 {
    debug_assert!(a % p != 0);
    let (a, p) = (a as u32, p as u32);
    // p is prime, so a^(p-2) is the inverse
    let mut result = 1u32;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result as u8
}

pub fn apply(m: &Matrix, v: &[u8], p: u8) -> Vector {
    m.iter()
        .map(|row| {
            let s: u32 = row.iter().zip(v).map(|(&a, &b)| a as u32 * b as u32).sum();
            (s % p as u32) as u8
        })
        .collect()
}

pub fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|r| (0..d).map(|c| u8::from(r == c)).collect())
        .collect()
}

/// Reduces `rows` to reduced row echelon form in place (zero rows dropped)
/// and returns the pivot columns.
pub fn rref(rows: &mut Vec<Vector>, p: u8) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = ((*x as u32 * inv as u32) % p as u32) as u8;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c] as u32;
                for k in 0..ncols {
                    let sub = (f * rows[r][k] as u32) % p as u32;
                    rows[i][k] = ((rows[i][k] as u32 + p as u32 - sub) % p as u32) as u8;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Reduces `v` against an RREF basis, leaving zeros at the pivot columns.
pub fn reduce(v: &mut [u8], basis: &[Vector], pivots: &[usize], p: u8) {
    for (row, &c) in basis.iter().zip(pivots) {
        let f = v[c] as u32;
        if f != 0 {
            for (x, &b) in v.iter_mut().zip(row) {
                *x = ((*x as u32 + (p as u32 - f) * b as u32) % p as u32) as u8;
            }
        }
    }
}

/// Number of `k`-dimensional subspaces of GF(p)^d.
pub fn gaussian_binomial(d: u32, k: u32, p: u64) -> u64 {
    if k > d {
        return 0;
    }
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..k {
        num *= (p as u128).pow(d - i) - 1;
        den *= (p as u128).pow(i + 1) - 1;
    }
    (num / den) as u64
}

/// Every subspace of GF(p)^d whose dimension satisfies `keep_dim`, each as an
/// RREF basis. Ordered by dimension, then pivot set, then free entries.
pub fn subspaces(p: u8, d: usize, mut keep_dim: impl FnMut(usize) -> bool) -> Vec<Vec<Vector>> {
    let mut out = Vec::new();
    for k in 0..=d {
        if !keep_dim(k) {
            continue;
        }
        for pivots in combinations(d, k) {
            // free positions: row r may be nonzero at columns after its pivot that are not pivots
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &pc)| {
                    let pivots = &pivots;
                    (pc + 1..d)
                        .filter(move |c| !pivots.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let total = (p as u64).pow(free.len() as u32);
            for mut idx in 0..total {
                let mut basis: Vec<Vector> = pivots
                    .iter()
                    .map(|&pc| {
                        let mut v = vec![0u8; d];
                        v[pc] = 1;
                        v
                    })
                    .collect();
                for &(r, c) in &free {
                    basis[r][c] = (idx % p as u64) as u8;
                    idx /= p as u64;
                }
                out.push(basis);
            }
        }
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Image of a subspace under a linear map, in RREF.
pub fn image_subspace(m: &Matrix, basis: &[Vector], p: u8) -> Vec<Vector> {
    let mut rows: Vec<Vector> = basis.iter().map(|v| apply(m, v, p)).collect();
    rref(&mut rows, p);
    rows
}

/// True if `m` maps the span of `basis` into itself.
pub fn is_invariant(m: &Matrix, basis: &[Vector], pivots: &[usize], p: u8) -> bool {
    basis.iter().all(|v| {
        let mut w = apply(m, v, p);
        reduce(&mut w, basis, pivots, p);
        w.iter().all(|&x| x == 0)
    })
}

/// Solution set of `A x = b`: a particular solution and a basis of the kernel
/// of `A`, or `None` if the system is inconsistent. `a` has one row per
/// equation and `ncols` columns.
pub fn solve_affine(a: &[Vector], b: &[u8], ncols: usize, p: u8) -> Option<(Vector, Vec<Vector>)> {
    let mut aug: Vec<Vector> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    if aug.is_empty() {
        let kernel = (0..ncols)
            .map(|i| {
                let mut v = vec![0u8; ncols];
                v[i] = 1;
                v
            })
            .collect();
        return Some((vec![0u8; ncols], kernel));
    }
    let pivots = rref(&mut aug, p);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut particular = vec![0u8; ncols];
    for (row, &c) in aug.iter().zip(&pivots) {
        particular[c] = row[ncols];
    }
    let mut kernel = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u8; ncols];
        v[free] = 1;
        for (row, &c) in aug.iter().zip(&pivots) {
            v[c] = (p - row[free]) % p;
        }
        kernel.push(v);
    }
    Some((particular, kernel))
}

/// All vectors `base + Σ c_i·dirs[i]`, in mixed-radix order of the coefficients.
pub fn affine_span(base: &[u8], dirs: &[Vector], p: u8) -> Vec<Vector> {
    let total = (p as u64).pow(dirs.len() as u32);
    let mut out = Vec::with_capacity(total as usize);
    for mut idx in 0..total {
        let mut v = base.to_vec();
        for dir in dirs {
            let c = (idx % p as u64) as u32;
            idx /= p as u64;
            if c != 0 {
                for (x, &d) in v.iter_mut().zip(dir) {
                    *x = ((*x as u32 + c * d as u32) % p as u32) as u8;
                }
            }
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for (p, d, total) in [(2u8, 2usize, 5usize), (2, 3, 16), (3, 2, 6), (2, 4, 67), (5, 2, 8)] {
            let all = subspaces(p, d, |_| true);
            assert_eq!(all.len(), total, "p={p} d={d}");
            let by_formula: u64 = (0..=d as u32).map(|k| gaussian_binomial(d as u32, k, p as u64)).sum();
            assert_eq!(by_formula as usize, total);
            // all distinct and already reduced
            let mut seen = std::collections::HashSet::new();
            for b in &all {
                let mut r = b.clone();
                rref(&mut r, p);
                assert_eq!(&r, b);
                assert!(seen.insert(b.clone()));
            }
        }
    }

    #[test]
    fn inverse_mod_p() {
        for p in [2u8, 3, 5, 7, 251] {
            for a in 1..p {
                assert_eq!((a as u32 * inv_mod(a, p) as u32) % p as u32, 1);
            }
        }
    }

    #[test]
    fn inconsistent_system() {
        // x = 0 and x = 1
        assert!(solve_affine(&[vec![1], vec![1]], &[0, 1], 1, 2).is_none());
    }

    proptest! {
        #[test]
        fn affine_solutions_satisfy_the_system(
            p in prop::sample::select(vec![2u8, 3, 5]),
            entries in prop::collection::vec(0u8..5, 12),
            rhs in prop::collection::vec(0u8..5, 3),
        ) {
            let a: Vec<Vector> = entries.chunks(4).map(|c| c.iter().map(|x| x % p).collect()).collect();
            let b: Vec<u8> = rhs.iter().map(|x| x % p).collect();
            let brute: Vec<Vector> = affine_span(&[0, 0, 0, 0], &identity(4), p)
                .into_iter()
                .filter(|x| apply(&a, x, p) == b)
                .collect();
            match solve_affine(&a, &b, 4, p) {
                None => prop_assert!(brute.is_empty()),
                Some((x0, ker)) => {
                    let mut sols = affine_span(&x0, &ker, p);
                    sols.sort();
                    let mut brute = brute;
                    brute.sort();
                    prop_assert_eq!(sols, brute);
                }
            }
        }
    }
}
