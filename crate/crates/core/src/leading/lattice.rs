//! Integer row reduction with unimodular transforms.

use num_integer::Integer;

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn transpose(a: &IntMatrix, cols: usize) -> IntMatrix {
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|r| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(0i64, |acc, k| {
                        acc.checked_add(r[k].checked_mul(b[k][j]).expect("lattice overflow")).expect("lattice overflow")
                    })
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[i64], m: &IntMatrix) -> Vec<i64> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| v.iter().zip(m).map(|(a, r)| a * r[j]).sum()).collect()
}

/// Row echelon form `H = U A` with `U` unimodular, returned with `U⁻¹` and
/// the rank. Pivots are positive and entries above each pivot are reduced
/// into `[0, pivot)`.
pub struct Echelon {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub rank: usize,
}

pub fn echelon(a: &IntMatrix, cols: usize) -> Echelon {
    let rows = a.len();
    let mut h = a.clone();
    let mut u = identity(rows);
    let mut ui = identity(rows);
    // Row op on (h, u): rows (i, j) <- E (rows i, j) with E = [[x, y], [-b, c]],
    // det 1. On u_inv the inverse acts on columns: cols (i, j) <- cols · E⁻¹.
    let apply = |h: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, i: usize, j: usize, e: [i64; 4]| {
        let [p, q, r, s] = e;
        for m in [&mut *h, &mut *u] {
            for k in 0..m[i].len() {
                let (a, b) = (m[i][k], m[j][k]);
                m[i][k] = p * a + q * b;
                m[j][k] = r * a + s * b;
            }
        }
        // E⁻¹ = [[s, -q], [-r, p]]
        for row in ui.iter_mut() {
            let (a, b) = (row[i], row[j]);
            row[i] = a * s - b * r;
            row[j] = -a * q + b * p;
        }
    };
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for i in r + 1..rows {
            if h[i][c] == 0 {
                continue;
            }
            let (a, b) = (h[r][c], h[i][c]);
            let eg = a.extended_gcd(&b);
            let g = eg.gcd;
            // x a + y b = g; second row -(b/g) a + (a/g) b = 0.
            apply(&mut h, &mut u, &mut ui, r, i, [eg.x, eg.y, -b / g, a / g]);
        }
        if h[r][c] == 0 {
            continue;
        }
        if h[r][c] < 0 {
            for m in [&mut h, &mut u] {
                for x in m[r].iter_mut() {
                    *x = -*x;
                }
            }
            for row in ui.iter_mut() {
                row[r] = -row[r];
            }
        }
        let piv = h[r][c];
        for i in 0..r {
            let f = Integer::div_floor(&h[i][c], &piv);
            if f != 0 {
                apply(&mut h, &mut u, &mut ui, i, r, [1, -f, 0, 1]);
            }
        }
        r += 1;
    }
    Echelon { h, u, u_inv: ui, rank: r }
}
