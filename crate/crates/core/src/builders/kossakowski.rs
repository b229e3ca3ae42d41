use alloc::vec::Vec;

use crate::builders::GeneratorParts;
use crate::error::{QmeError, Result};
use crate::linalg::{c, cr, hermitian_eigenvalues, hermitian_part, max_abs, CMatrix, C64};
use crate::operator::superop::{hamiltonian_superop, left_multiply, right_multiply, vectorize};

/// Orthonormal traceless basis: symmetric, antisymmetric, then diagonal generators.
pub fn gell_mann_basis(d: usize) -> Vec<CMatrix> {
    let s = 1.0 / libm::sqrt(2.0);
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = cr(s);
            m[(k, j)] = cr(s);
            out.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::zeros(d, d);
            m[(j, k)] = c(0.0, -s);
            m[(k, j)] = c(0.0, s);
            out.push(m);
        }
    }
    for l in 1..d {
        let mut m = CMatrix::zeros(d, d);
        let norm = 1.0 / libm::sqrt((l * (l + 1)) as f64);
        for k in 0..l {
            m[(k, k)] = cr(norm);
        }
        m[(l, l)] = cr(-(l as f64) * norm);
        out.push(m);
    }
    out
}

#[derive(Debug, Clone)]
pub struct KossakowskiMatrix {
    pub basis: Vec<CMatrix>,
    pub matrix: CMatrix,
    pub min_eigenvalue: f64,
    pub lamb_shift: CMatrix,
    pub reassembly_mismatch: f64,
}

/// Swap the roles of (row of ρ_out, row of ρ_in) so that ρ ↦ AρB† becomes vec(A)vec(B)†.
fn reshuffle(m: &CMatrix, d: usize) -> CMatrix {
    let mut r = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    r[(a + d * cc, b + d * dd)] = m[(a + d * b, cc + d * dd)];
                }
            }
        }
    }
    r
}

fn unshuffle(r: &CMatrix, d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    m[(a + d * b, cc + d * dd)] = r[(a + d * cc, b + d * dd)];
                }
            }
        }
    }
    m
}

/// Decompose a trace- and Hermiticity-preserving generator as
/// −i[H, ρ] + Σ a_ij (F_i ρ F_j† − ½{F_j†F_i, ρ}) over the Gell-Mann basis.
pub fn kossakowski_of(generator: &CMatrix) -> Result<KossakowskiMatrix> {
    let n = generator.nrows();
    let d = libm::round(libm::sqrt(n as f64)) as usize;
    if d * d != n || !generator.is_square() {
        return Err(QmeError::NotPerfectSquare(n));
    }
    let basis = gell_mann_basis(d);
    let mut full = CMatrix::zeros(n, n);
    full.set_column(0, &vectorize(&(CMatrix::identity(d, d) * cr(1.0 / libm::sqrt(d as f64)))));
    for (i, f) in basis.iter().enumerate() {
        full.set_column(i + 1, &vectorize(f));
    }
    let coeffs = full.adjoint() * reshuffle(generator, d) * &full;

    let a = coeffs.view((1, 1), (n - 1, n - 1)).into_owned();
    let mut g = CMatrix::identity(d, d) * (coeffs[(0, 0)] / cr(2.0 * d as f64));
    for (i, f) in basis.iter().enumerate() {
        g += f * (coeffs[(i + 1, 0)] / cr(libm::sqrt(d as f64)));
    }
    let h = (&g - g.adjoint()) * c(0.0, 0.5);

    let mut sandwiches = CMatrix::zeros(n, n);
    let mut bmat = CMatrix::zeros(n, n - 1);
    for (i, f) in basis.iter().enumerate() {
        bmat.set_column(i, &vectorize(f));
    }
    sandwiches += unshuffle(&(&bmat * &a * bmat.adjoint()), d);
    let mut anti = CMatrix::zeros(d, d);
    for (j, fj) in basis.iter().enumerate() {
        let mut col = CMatrix::zeros(d, d);
        for (i, fi) in basis.iter().enumerate() {
            let aij: C64 = a[(i, j)];
            if aij != cr(0.0) {
                col += fi * aij;
            }
        }
        anti += fj.adjoint() * col;
    }
    let rebuilt = hamiltonian_superop(&h) + sandwiches
        - (left_multiply(&anti) + right_multiply(&anti)) * cr(0.5);
    let mismatch = max_abs(&(rebuilt - generator));
    if mismatch > 1e-8 * max_abs(generator).max(1.0) {
        return Err(QmeError::ExtractionFailed { mismatch });
    }
    let a_herm = hermitian_part(&a);
    let min_eigenvalue = hermitian_eigenvalues(&a_herm)[0];
    Ok(KossakowskiMatrix { basis, matrix: a_herm, min_eigenvalue, lamb_shift: h, reassembly_mismatch: mismatch })
}

/// Kossakowski matrix of the full dissipator (including ε² and Lamb shift).
pub fn extract_kossakowski(parts: &GeneratorParts) -> Result<KossakowskiMatrix> {
    kossakowski_of(parts.dissipator.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::superop::dissipator_superop;

    #[test]
    fn basis_is_orthonormal() {
        let b = gell_mann_basis(3);
        assert_eq!(b.len(), 8);
        for (i, x) in b.iter().enumerate() {
            assert!(x.trace().norm() < 1e-15);
            for (j, y) in b.iter().enumerate() {
                let ip = (x.adjoint() * y).trace();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - cr(want)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn single_jump_is_rank_one() {
        let l = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(1.0), cr(0.0)]);
        let k = kossakowski_of(&(dissipator_superop(&l) * cr(0.7))).unwrap();
        let ev = hermitian_eigenvalues(&k.matrix);
        assert!((ev[2] - 0.7).abs() < 1e-14);
        assert!(ev[0].abs() < 1e-14 && ev[1].abs() < 1e-14);
        assert!(max_abs(&k.lamb_shift) < 1e-14);
    }
}
