//! Dense linear algebra over the prime field F_p.

/// Modular inverse of a non-zero residue mod a prime.
pub fn inv_mod(a: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (a as i64 % p as i64, p as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    s0.rem_euclid(p as i64) as u32
}

/// Reduces `rows` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot column of each remaining row.
pub fn rref(rows: &mut Vec<Vec<u32>>, p: u32) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else {
            continue;
        };
        rows.swap(r, k);
        let inv = inv_mod(rows[r][c], p);
        for v in rows[r].iter_mut() {
            *v = (*v as u64 * inv as u64 % p as u64) as u32;
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c] != 0 {
                let f = rows[k][c] as u64;
                for j in 0..cols {
                    let sub = f * rows[r][j] as u64 % p as u64;
                    rows[k][j] = ((rows[k][j] as u64 + p as u64 - sub) % p as u64) as u32;
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

pub fn rank(rows: &[Vec<u32>], p: u32) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, p).len()
}

/// Basis of `{x : M x = 0}` for the `cols`-column matrix `M`.
pub fn nullspace(rows: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, p);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u32; cols];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - m[r][free]) % p;
        }
        out.push(v);
    }
    out
}

/// Basis of `{a : sum a_i rows[i] = 0}`.
pub fn left_nullspace(rows: &[Vec<u32>], cols: usize, p: u32) -> Vec<Vec<u32>> {
    let t: Vec<Vec<u32>> = (0..cols).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    nullspace(&t, rows.len(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_annihilates() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let ns = nullspace(&m, 3, 5);
        assert_eq!(ns.len(), 1);
        for v in &ns {
            for r in &m {
                let s: u32 = r.iter().zip(v).map(|(a, b)| a * b).sum();
                assert_eq!(s % 5, 0);
            }
        }
        assert_eq!(rank(&m, 5), 2);
        assert_eq!(left_nullspace(&m, 3, 5).len(), 1);
    }

    #[test]
    fn inverses() {
        for a in 1..7 {
            assert_eq!(a * inv_mod(a, 7) % 7, 1);
        }
    }
}
