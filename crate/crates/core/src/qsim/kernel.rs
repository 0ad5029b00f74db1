//! In-place kernels over amplitude vectors indexed MSB-first.

use super::gate::ComplexAmp;

/// Applies the 2×2 matrix `m` to every index pair differing only in `mask`.
pub(crate) fn apply_1q(data: &mut [ComplexAmp], mask: usize, m: &[[ComplexAmp; 2]; 2]) {
    for i in 0..data.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (a, b) = (data[i], data[j]);
            data[i] = m[0][0] * a + m[0][1] * b;
            data[j] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Controlled-X as an index permutation.
pub(crate) fn apply_cx(data: &mut [ComplexAmp], control_mask: usize, target_mask: usize) {
    for i in 0..data.len() {
        if i & control_mask != 0 && i & target_mask == 0 {
            data.swap(i, i | target_mask);
        }
    }
}

pub(crate) fn conj_matrix(m: &[[ComplexAmp; 2]; 2]) -> [[ComplexAmp; 2]; 2] {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}
