//! Shared linear-algebra oracle for erasure determinedness, used by both
//! the reliability-table and decoder cross-checks. Everything here is an
//! independent route: u64 row masks and pivot bookkeeping, no library
//! matrix code.
#![allow(dead_code)]

/// Row `i` of the n-fold Kronecker power of [[1,1],[0,1]] as a column
/// bitmask: entry (i, b) is 1 exactly when `i & !b == 0`.
pub fn encoder_row(i: usize, n: usize) -> u64 {
    let nn = 1usize << n;
    let mut row = 0u64;
    for b in 0..nn {
        if i & !b & (nn - 1) == 0 {
            row |= 1 << b;
        }
    }
    row
}

pub fn basis_insert(basis: &mut [u64; 64], mut v: u64) {
    while v != 0 {
        let c = v.trailing_zeros() as usize;
        if basis[c] == 0 {
            basis[c] = v;
            return;
        }
        v ^= basis[c];
    }
}

pub fn basis_reduce(basis: &[u64; 64], mut v: u64) -> u64 {
    while v != 0 {
        let c = v.trailing_zeros() as usize;
        if basis[c] == 0 {
            return v;
        }
        v ^= basis[c];
    }
    0
}

/// Bitmask of synthetic channels whose input stays undetermined under the
/// given erasure pattern, assuming earlier inputs are revealed in order.
pub fn undetermined_channels(rows: &[u64], erased: u64) -> u64 {
    let nn = rows.len();
    let mut basis = [0u64; 64];
    for (i, &row) in rows.iter().enumerate() {
        if erased >> i & 1 == 0 {
            basis_insert(&mut basis, row);
        }
    }
    let mut undetermined = 0u64;
    for a in 0..nn {
        let unit = 1u64 << a;
        if basis_reduce(&basis, unit) != 0 {
            undetermined |= unit;
        }
        basis_insert(&mut basis, unit);
    }
    undetermined
}
