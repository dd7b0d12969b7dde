//! Coxeter systems: matrices, canonical reduced words, enumeration, and the
//! length-aware multiplication the Hecke algebra is built on.
//!
//! Elements are stored by their ShortLex-minimal reduced words (shortest
//! length first, then lexicographic in the generator order), so element ids
//! are stable and canonical. Two enumeration paths exist on purpose: a
//! closed-form construction for rank <= 2 (the production path for polygon
//! walks) and a generic string-closure search that works for every finite
//! system; the tests hold them against each other.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;
use crate::Result;

/// Generator index, 0-based.
pub type Gen = u8;

/// Default cap on enumerated elements.
pub const DEFAULT_ELEMENT_CAP: usize = 1_000_000;

/// A Coxeter matrix: symmetric, 1 on the diagonal, entries `>= 2` off it,
/// with `0` encoding an infinite bond.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCoxeterMatrix", into = "RawCoxeterMatrix")]
pub struct CoxeterMatrix {
    rank: usize,
    m: Vec<Vec<u32>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawCoxeterMatrix {
    rank: usize,
    m: Vec<Vec<u32>>,
}

impl TryFrom<RawCoxeterMatrix> for CoxeterMatrix {
    type Error = Error;
    fn try_from(raw: RawCoxeterMatrix) -> Result<Self> {
        if raw.m.len() != raw.rank {
            return Err(Error::Deserialize(format!(
                "matrix has {} rows but rank {}",
                raw.m.len(),
                raw.rank
            )));
        }
        CoxeterMatrix::new(raw.m)
    }
}

impl From<CoxeterMatrix> for RawCoxeterMatrix {
    fn from(m: CoxeterMatrix) -> Self {
        RawCoxeterMatrix { rank: m.rank, m: m.m }
    }
}

impl CoxeterMatrix {
    /// Validating constructor. `m` must be square and symmetric with 1 on the
    /// diagonal and off-diagonal entries 0 (infinity) or `>= 2`.
    pub fn new(m: Vec<Vec<u32>>) -> Result<Self> {
        let rank = m.len();
        if rank == 0 {
            return Err(Error::InvalidInput("rank must be at least 1".into()));
        }
        for (i, row) in m.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} entries, expected {rank}",
                    row.len()
                )));
            }
            if row[i] != 1 {
                return Err(Error::InvalidInput(format!(
                    "diagonal entry ({i},{i}) must be 1, got {}",
                    row[i]
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if i != j && v == 1 {
                    return Err(Error::InvalidInput(format!(
                        "off-diagonal entry ({i},{j}) must be 0 or >= 2"
                    )));
                }
                if v != m[j][i] {
                    return Err(Error::InvalidInput(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(CoxeterMatrix { rank, m })
    }

    /// Path-shaped diagram: `labels[i]` is the bond between nodes `i` and
    /// `i+1`; all other pairs commute.
    pub fn path(labels: &[u32]) -> Self {
        let rank = labels.len() + 1;
        let mut m = vec![vec![2u32; rank]; rank];
        for i in 0..rank {
            m[i][i] = 1;
        }
        for (i, &l) in labels.iter().enumerate() {
            m[i][i + 1] = l;
            m[i + 1][i] = l;
        }
        CoxeterMatrix::new(m).expect("path labels are validated by construction")
    }

    /// Rank-2 system with a single bond of order `m` (0 for infinite).
    pub fn dihedral(m: u32) -> Self {
        CoxeterMatrix::new(vec![vec![1, m], vec![m, 1]]).expect("valid dihedral matrix")
    }

    pub fn type_a(n: usize) -> Self {
        assert!(n >= 1);
        CoxeterMatrix::path(&vec![3; n - 1])
    }

    pub fn type_b(n: usize) -> Self {
        assert!(n >= 2);
        let mut labels = vec![3; n - 1];
        labels[n - 2] = 4;
        CoxeterMatrix::path(&labels)
    }

    pub fn type_d(n: usize) -> Self {
        assert!(n >= 4);
        let mut mat = CoxeterMatrix::path(&vec![3; n - 2]).m;
        // grow by the fork node attached to node n-3
        for row in mat.iter_mut() {
            row.push(2);
        }
        let mut last = vec![2; n];
        last[n - 1] = 1;
        last[n - 3] = 3;
        mat.push(last);
        mat[n - 3][n - 1] = 3;
        CoxeterMatrix::new(mat).expect("fork diagram is valid")
    }

    pub fn type_e(n: usize) -> Self {
        assert!((6..=8).contains(&n));
        let mut mat = CoxeterMatrix::path(&vec![3; n - 2]).m;
        for row in mat.iter_mut() {
            row.push(2);
        }
        let mut last = vec![2; n];
        last[n - 1] = 1;
        last[2] = 3;
        mat.push(last);
        mat[2][n - 1] = 3;
        CoxeterMatrix::new(mat).expect("branch diagram is valid")
    }

    pub fn type_f4() -> Self {
        CoxeterMatrix::path(&[3, 4, 3])
    }

    pub fn type_h3() -> Self {
        CoxeterMatrix::path(&[5, 3])
    }

    pub fn type_h4() -> Self {
        CoxeterMatrix::path(&[5, 3, 3])
    }

    /// Euclidean triangle-group diagram on `n + 1` nodes: a cycle of 3-bonds
    /// for `n >= 2`, the infinite bond for `n = 1`.
    pub fn affine_a(n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return CoxeterMatrix::dihedral(0);
        }
        let rank = n + 1;
        let mut m = vec![vec![2u32; rank]; rank];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for i in 0..rank {
            let j = (i + 1) % rank;
            m[i][j] = 3;
            m[j][i] = 3;
        }
        CoxeterMatrix::new(m).expect("cycle diagram is valid")
    }

    /// Path on `n + 1` nodes with 4-bonds at both ends (3-bonds between).
    pub fn affine_c(n: usize) -> Self {
        assert!(n >= 2);
        let mut labels = vec![3; n];
        labels[0] = 4;
        labels[n - 1] = 4;
        CoxeterMatrix::path(&labels)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Bond order between generators `s` and `t`; 0 encodes infinity.
    pub fn m(&self, s: usize, t: usize) -> u32 {
        self.m[s][t]
    }

    /// Partition of the generators into classes linked by odd bonds; Hecke
    /// parameters must be constant on each class.
    pub fn odd_bond_classes(&self) -> Vec<usize> {
        let mut class: Vec<usize> = (0..self.rank).collect();
        fn find(class: &mut Vec<usize>, i: usize) -> usize {
            if class[i] != i {
                let r = find(class, class[i]);
                class[i] = r;
            }
            class[i]
        }
        for s in 0..self.rank {
            for t in s + 1..self.rank {
                let m = self.m[s][t];
                if m != 0 && m % 2 == 1 {
                    let (a, b) = (find(&mut class, s), find(&mut class, t));
                    class[a.max(b)] = a.min(b);
                }
            }
        }
        let roots: Vec<usize> = (0..self.rank).map(|i| find(&mut class, i)).collect();
        // renumber classes 0..k in order of first appearance
        let mut seen: Vec<usize> = Vec::new();
        roots
            .into_iter()
            .map(|r| {
                if let Some(pos) = seen.iter().position(|&x| x == r) {
                    pos
                } else {
                    seen.push(r);
                    seen.len() - 1
                }
            })
            .collect()
    }
}

/// Human-readable word: generators are printed 1-based, identity as `e`.
pub fn word_name(word: &[Gen]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    word.iter().map(|&g| format!("s{}", g + 1)).collect()
}

/// A finite Coxeter group, fully enumerated, with canonical ShortLex normal
/// forms and the complete right-multiplication table.
pub struct CoxeterGroup {
    matrix: CoxeterMatrix,
    words: Vec<Vec<Gen>>,
    /// flattened `order x rank` table: `right[w * rank + s] = w s`
    right: Vec<usize>,
    inverse: Vec<usize>,
}

impl fmt::Debug for CoxeterGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CoxeterGroup(rank {}, order {})",
            self.matrix.rank(),
            self.words.len()
        )
    }
}

impl CoxeterGroup {
    /// Enumerate with the default element cap.
    pub fn new(matrix: CoxeterMatrix) -> Result<Self> {
        Self::with_cap(matrix, DEFAULT_ELEMENT_CAP)
    }

    /// Enumerate with an explicit cap; infinite or over-cap systems produce
    /// [`Error::GroupTooLarge`].
    pub fn with_cap(matrix: CoxeterMatrix, cap: usize) -> Result<Self> {
        let (words, right) = match matrix.rank() {
            1 => (vec![vec![], vec![0 as Gen]], vec![1usize, 0usize]),
            2 => enumerate_dihedral(matrix.m(0, 1), cap)?,
            _ => enumerate_generic(&matrix, cap)?,
        };
        Ok(Self::from_tables(matrix, words, right))
    }

    /// Rank-2 system with bond order `m >= 2`, the Weyl group of a
    /// generalized `m`-gon. Generator 0 fixes lines, generator 1 fixes
    /// points, in the incidence-model convention.
    pub fn dihedral_system(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput(format!(
                "bond order must be at least 2, got {m}"
            )));
        }
        Self::new(CoxeterMatrix::dihedral(m))
    }

    fn from_tables(matrix: CoxeterMatrix, words: Vec<Vec<Gen>>, right: Vec<usize>) -> Self {
        let rank = matrix.rank();
        let mut g = CoxeterGroup {
            matrix,
            words,
            right,
            inverse: Vec::new(),
        };
        let mut inverse = vec![0usize; g.words.len()];
        for w in 0..g.words.len() {
            let mut cur = 0usize;
            for &s in g.words[w].iter().rev() {
                cur = g.right[cur * rank + s as usize];
            }
            inverse[w] = cur;
            debug_assert_eq!(g.words[cur].len(), g.words[w].len());
        }
        g.inverse = inverse;
        g
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    /// Identity element id.
    pub const IDENTITY: usize = 0;

    /// ShortLex normal form of element `w`.
    pub fn word(&self, w: usize) -> &[Gen] {
        &self.words[w]
    }

    pub fn length(&self, w: usize) -> usize {
        self.words[w].len()
    }

    pub fn inverse(&self, w: usize) -> usize {
        self.inverse[w]
    }

    /// All element ids in ShortLex order.
    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.words.len()
    }

    /// `w s` together with the length change: `+1` when the product is
    /// longer, `-1` when shorter (never 0).
    pub fn right_multiply(&self, w: usize, s: usize) -> (usize, i32) {
        assert!(s < self.rank(), "generator index out of range");
        let ws = self.right[w * self.rank() + s];
        let sign = if self.words[ws].len() > self.words[w].len() {
            1
        } else {
            -1
        };
        (ws, sign)
    }

    /// `s w` together with the length change.
    pub fn left_multiply(&self, s: usize, w: usize) -> (usize, i32) {
        // (s w)^{-1} = w^{-1} s and inversion preserves length
        let (x, sign) = self.right_multiply(self.inverse[w], s);
        (self.inverse[x], sign)
    }

    /// Fold an arbitrary word down to its element.
    pub fn reduce(&self, word: &[Gen]) -> Result<usize> {
        let rank = self.rank();
        let mut cur = 0usize;
        for &s in word {
            if (s as usize) >= rank {
                return Err(Error::InvalidInput(format!(
                    "letter {} out of range for rank {rank}",
                    s + 1
                )));
            }
            cur = self.right[cur * rank + s as usize];
        }
        Ok(cur)
    }

    /// Product of per-letter parameters along the normal form of `w` — the
    /// size of a `w`-sphere in a regular building with those parameters.
    pub fn q_w<S: Scalar>(&self, w: usize, params: &[S]) -> S {
        assert_eq!(params.len(), self.rank());
        let mut acc = S::one();
        for &s in &self.words[w] {
            acc = acc * params[s as usize].clone();
        }
        acc
    }

    /// `sum_w q_w`: the number of chambers at any fixed chamber's horizon,
    /// i.e. the total mass the parameters assign to the group.
    pub fn poincare_sum<S: Scalar>(&self, params: &[S]) -> S {
        let mut acc = S::zero();
        for w in self.elements() {
            acc = acc + self.q_w(w, params);
        }
        acc
    }

    /// Length histogram: entry `l` counts elements of length `l`.
    pub fn length_histogram(&self) -> Vec<usize> {
        let max = self.words.last().map_or(0, |w| w.len());
        let mut h = vec![0usize; max + 1];
        for w in &self.words {
            h[w.len()] += 1;
        }
        h
    }

    /// Ids of elements of maximal length (a singleton for finite irreducible
    /// systems enumerated completely).
    pub fn longest_elements(&self) -> Vec<usize> {
        let max = self.words.last().map_or(0, |w| w.len());
        self.elements()
            .filter(|&w| self.words[w].len() == max)
            .collect()
    }
}

/// Closed-form enumeration of the rank-2 group of order `2m`: the identity,
/// two alternating-word chains, and the single longest element.
fn enumerate_dihedral(m: u32, cap: usize) -> Result<(Vec<Vec<Gen>>, Vec<usize>)> {
    if m == 0 {
        return Err(Error::GroupTooLarge { cap });
    }
    let order = 2 * m as usize;
    if order > cap {
        return Err(Error::GroupTooLarge { cap });
    }
    // ids: 0 = e; for 0 < l < m the two chain elements (2l-1) + start; 2m-1 = top
    let id = |l: u32, start: u32| -> usize {
        if l == 0 {
            0
        } else if l == m {
            order - 1
        } else {
            (2 * l - 1) as usize + start as usize
        }
    };
    let alt_word = |l: u32, start: u32| -> Vec<Gen> {
        (0..l).map(|i| ((start + i) % 2) as Gen).collect()
    };
    let mut words = vec![Vec::new()];
    for l in 1..m {
        words.push(alt_word(l, 0));
        words.push(alt_word(l, 1));
    }
    words.push(alt_word(m, 0));
    let mut right = vec![0usize; order * 2];
    for l in 0..=m {
        let starts: &[u32] = if l == 0 || l == m { &[0] } else { &[0, 1] };
        for &start in starts {
            let w = id(l, start);
            for s in 0..2u32 {
                let ws = if l == 0 {
                    id(1, s)
                } else if l == m {
                    // descend: pick the representation ending with s
                    id(m - 1, s ^ ((m - 1) & 1))
                } else {
                    let last = start ^ ((l - 1) & 1);
                    if s == last {
                        id(l - 1, start)
                    } else {
                        id(l + 1, start)
                    }
                };
                right[w * 2 + s as usize] = ws;
            }
        }
    }
    Ok((words, right))
}

/// Generic enumeration by string closure: elements are created in ShortLex
/// order, and every time a new element tops a finite `{s,t}`-string the
/// closing edge is registered from the opposite chain. Works for any finite
/// system and any rank; also the cross-check oracle for the rank-2 fast path.
pub fn enumerate_generic(
    matrix: &CoxeterMatrix,
    cap: usize,
) -> Result<(Vec<Vec<Gen>>, Vec<usize>)> {
    let rank = matrix.rank();
    let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
    let mut right: Vec<Vec<Option<usize>>> = vec![vec![None; rank]];
    let mut iw = 0usize;
    while iw < words.len() {
        for s in 0..rank {
            if right[iw][s].is_some() {
                continue;
            }
            if words.len() >= cap {
                return Err(Error::GroupTooLarge { cap });
            }
            let y = words.len();
            let mut wy = words[iw].clone();
            wy.push(s as Gen);
            words.push(wy);
            right.push(vec![None; rank]);
            right[iw][s] = Some(y);
            right[y][s] = Some(iw);
            // Find the other descents of y: for each t, walk the {s,t}-string
            // downward; y tops it exactly when the walk takes m(s,t) steps.
            for t in 0..rank {
                if t == s {
                    continue;
                }
                let m = matrix.m(s, t);
                if m == 0 {
                    continue;
                }
                let mut cur = iw; // after descending from y by s
                let mut steps = 1u32;
                let mut dletter = t;
                let mut dother = s;
                while steps < m {
                    match right[cur][dletter] {
                        Some(x) if words[x].len() < words[cur].len() => {
                            cur = x;
                            std::mem::swap(&mut dletter, &mut dother);
                            steps += 1;
                        }
                        _ => break,
                    }
                }
                if steps == m {
                    // cur is the string's bottom; ascend the opposite chain.
                    let mut up = cur;
                    let mut aletter = dletter;
                    let mut aother = dother;
                    for _ in 0..m - 1 {
                        up = right[up][aletter]
                            .expect("interior string edges are registered before use");
                        std::mem::swap(&mut aletter, &mut aother);
                    }
                    debug_assert_eq!(aletter, t);
                    debug_assert!(right[y][t].is_none() && right[up][t].is_none());
                    right[y][t] = Some(up);
                    right[up][t] = Some(y);
                }
            }
        }
        iw += 1;
    }
    let flat: Vec<usize> = right
        .into_iter()
        .flat_map(|row| {
            row.into_iter()
                .map(|e| e.expect("complete enumeration resolves every edge"))
        })
        .collect();
    Ok((words, flat))
}

/// Verdict on a surface-group presentation with rotation orders `k_1..k_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FuchsianVerdict {
    /// The angle sum admits no hyperbolic polygon (`sum 1/k_i >= n - 2`).
    NotHyperbolic,
    /// Hyperbolic, but no thick building has these gonalities.
    HyperbolicNoThickBuilding,
    /// Hyperbolic, and a thick building with these gonalities exists.
    HyperbolicThickBuilding,
}

/// Classify rotation orders: first the hyperbolicity inequality
/// `sum 1/k_i < n - 2` (checked in exact arithmetic), then whether every
/// gonality is realizable by a finite thick geometry (all in {2,3,4,6,8})
/// with the parity condition: some `k_i` in {2,4}, or an even number of 8s.
pub fn fuchsian_admissible(ks: &[u32]) -> Result<FuchsianVerdict> {
    if ks.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 rotation orders, got {}",
            ks.len()
        )));
    }
    if let Some(&bad) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::InvalidInput(format!(
            "rotation orders must be at least 2, got {bad}"
        )));
    }
    // sum 1/k_i < n - 2  <=>  sum_{i} prod_{j != i} k_j < (n-2) prod_j k_j,
    // in u128 to stay exact for any plausible input.
    let n = ks.len() as u128;
    let prod: u128 = ks.iter().map(|&k| k as u128).product();
    let sum_unit: u128 = ks.iter().map(|&k| prod / k as u128).sum();
    if sum_unit >= (n - 2) * prod {
        return Ok(FuchsianVerdict::NotHyperbolic);
    }
    let all_realizable = ks.iter().all(|k| matches!(k, 2 | 3 | 4 | 6 | 8));
    let has_24 = ks.iter().any(|k| matches!(k, 2 | 4));
    let eights_even = ks.iter().filter(|&&k| k == 8).count() % 2 == 0;
    if all_realizable && (has_24 || eights_even) {
        Ok(FuchsianVerdict::HyperbolicThickBuilding)
    } else {
        Ok(FuchsianVerdict::HyperbolicNoThickBuilding)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    /// Coefficients of prod_i (1 + q + ... + q^{d_i - 1}): the classical
    /// length generating function, an oracle independent of the enumerator.
    fn length_poly(degrees: &[usize]) -> Vec<usize> {
        let mut poly = vec![1usize];
        for &d in degrees {
            let mut next = vec![0usize; poly.len() + d - 1];
            for (i, &c) in poly.iter().enumerate() {
                for j in 0..d {
                    next[i + j] += c;
                }
            }
            poly = next;
        }
        poly
    }

    fn group(matrix: CoxeterMatrix) -> CoxeterGroup {
        CoxeterGroup::new(matrix).expect("finite test group")
    }

    #[test]
    fn length_histograms_match_degree_products() {
        let cases: Vec<(CoxeterMatrix, Vec<usize>)> = vec![
            (CoxeterMatrix::type_a(1), vec![2]),
            (CoxeterMatrix::type_a(2), vec![2, 3]),
            (CoxeterMatrix::type_a(3), vec![2, 3, 4]),
            (CoxeterMatrix::type_a(4), vec![2, 3, 4, 5]),
            (CoxeterMatrix::type_b(2), vec![2, 4]),
            (CoxeterMatrix::type_b(3), vec![2, 4, 6]),
            (CoxeterMatrix::type_b(4), vec![2, 4, 6, 8]),
            (CoxeterMatrix::type_d(4), vec![2, 4, 6, 4]),
            (CoxeterMatrix::dihedral(6), vec![2, 6]),
            (CoxeterMatrix::type_f4(), vec![2, 6, 8, 12]),
            (CoxeterMatrix::type_h3(), vec![2, 6, 10]),
            (CoxeterMatrix::type_h4(), vec![2, 12, 20, 30]),
            (CoxeterMatrix::type_e(6), vec![2, 5, 6, 8, 9, 12]),
        ];
        for (matrix, degrees) in cases {
            let g = group(matrix);
            let expect = length_poly(&degrees);
            assert_eq!(
                g.length_histogram(),
                expect,
                "histogram mismatch for {:?}",
                g
            );
            assert_eq!(g.order(), degrees.iter().product::<usize>());
            assert_eq!(g.longest_elements().len(), 1);
        }
    }

    #[test]
    fn dihedral_fast_path_agrees_with_generic_enumeration() {
        for m in [2u32, 3, 4, 5, 6, 7, 8, 12] {
            let (wa, ra) = enumerate_dihedral(m, 10_000).unwrap();
            let (wb, rb) = enumerate_generic(&CoxeterMatrix::dihedral(m), 10_000).unwrap();
            assert_eq!(wa, wb, "word tables differ at m={m}");
            assert_eq!(ra, rb, "multiplication tables differ at m={m}");
        }
    }

    #[test]
    fn symmetric_group_model_is_faithful_with_inversion_lengths() {
        // Generators of the rank-3 path act as adjacent transpositions on
        // 4 letters; Coxeter length must equal the inversion number.
        let g = group(CoxeterMatrix::type_a(3));
        assert_eq!(g.order(), 24);
        let mut seen = std::collections::HashSet::new();
        for w in g.elements() {
            let mut perm = [0usize, 1, 2, 3];
            for &s in g.word(w) {
                perm.swap(s as usize, s as usize + 1);
            }
            let inv = (0..4)
                .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            assert_eq!(inv, g.length(w));
            assert!(seen.insert(perm), "two elements mapped to one permutation");
        }
    }

    #[test]
    fn normal_forms_are_shortlex_minimal() {
        for matrix in [
            CoxeterMatrix::type_a(3),
            CoxeterMatrix::type_b(3),
            CoxeterMatrix::dihedral(5),
            CoxeterMatrix::type_d(4),
        ] {
            let g = group(matrix);
            for w in g.elements() {
                if w == CoxeterGroup::IDENTITY {
                    continue;
                }
                // the normal form must beat every reduced word obtained by
                // peeling any descent
                for s in 0..g.rank() {
                    let (ws, sign) = g.right_multiply(w, s);
                    if sign < 0 {
                        let mut alt = g.word(ws).to_vec();
                        alt.push(s as Gen);
                        assert!(
                            g.word(w) <= alt.as_slice(),
                            "normal form {:?} beaten by {:?}",
                            g.word(w),
                            alt
                        );
                        assert_eq!(g.reduce(&alt).unwrap(), w);
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_and_left_multiplication_are_consistent() {
        let g = group(CoxeterMatrix::type_b(3));
        for w in g.elements() {
            assert_eq!(g.inverse(g.inverse(w)), w);
            let rev: Vec<Gen> = g.word(w).iter().rev().copied().collect();
            assert_eq!(g.reduce(&rev).unwrap(), g.inverse(w));
            for s in 0..g.rank() {
                let (sw, sign) = g.left_multiply(s, w);
                let mut word = vec![s as Gen];
                word.extend_from_slice(g.word(w));
                assert_eq!(g.reduce(&word).unwrap(), sw);
                assert_eq!(
                    sign,
                    if g.length(sw) > g.length(w) { 1 } else { -1 }
                );
            }
        }
    }

    #[test]
    fn infinite_and_oversized_systems_hit_the_cap() {
        match CoxeterGroup::new(CoxeterMatrix::dihedral(0)) {
            Err(Error::GroupTooLarge { .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
        match CoxeterGroup::with_cap(CoxeterMatrix::affine_a(2), 500) {
            Err(Error::GroupTooLarge { cap: 500 }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
        match CoxeterGroup::with_cap(CoxeterMatrix::affine_c(2), 2_000) {
            Err(Error::GroupTooLarge { .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn sphere_weights_total_known_chamber_counts() {
        // rank-2 bond 3 with parameter 2: 1+2+2+4+4+8 = 21
        let g = CoxeterGroup::dihedral_system(3).unwrap();
        let q = BigRational::from_integer(2.into());
        let total = g.poincare_sum(&[q.clone(), q.clone()]);
        assert_eq!(total, BigRational::from_integer(21.into()));
        // rank-2 bond 4 with parameter 2: 45
        let g = CoxeterGroup::dihedral_system(4).unwrap();
        let total = g.poincare_sum(&[q.clone(), q]);
        assert_eq!(total, BigRational::from_integer(45.into()));
    }

    #[test]
    fn odd_bond_classes_partition_generators() {
        assert_eq!(CoxeterMatrix::type_a(3).odd_bond_classes(), vec![0, 0, 0]);
        assert_eq!(CoxeterMatrix::type_b(3).odd_bond_classes(), vec![0, 0, 1]);
        assert_eq!(CoxeterMatrix::dihedral(4).odd_bond_classes(), vec![0, 1]);
        assert_eq!(CoxeterMatrix::dihedral(7).odd_bond_classes(), vec![0, 0]);
        assert_eq!(CoxeterMatrix::affine_c(2).odd_bond_classes(), vec![0, 1, 2]);
    }

    #[test]
    fn matrix_serialization_uses_zero_for_infinity() {
        let m = CoxeterMatrix::affine_a(1);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"rank":2,"m":[[1,0],[0,1]]}"#);
        let back: CoxeterMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        // invalid matrices are rejected on the way in
        assert!(serde_json::from_str::<CoxeterMatrix>(r#"{"rank":2,"m":[[1,3],[4,1]]}"#).is_err());
        assert!(serde_json::from_str::<CoxeterMatrix>(r#"{"rank":2,"m":[[1,1],[1,1]]}"#).is_err());
        assert!(serde_json::from_str::<CoxeterMatrix>(r#"{"rank":3,"m":[[1,2],[2,1]]}"#).is_err());
    }

    #[test]
    fn surface_group_classification() {
        use FuchsianVerdict::*;
        let cases: Vec<(&[u32], FuchsianVerdict)> = vec![
            (&[2, 3, 7], HyperbolicNoThickBuilding), // 7 not a finite gonality
            (&[2, 4, 8], HyperbolicThickBuilding),
            (&[3, 3, 3], NotHyperbolic),  // Euclidean triangle
            (&[2, 3, 6], NotHyperbolic),  // Euclidean
            (&[2, 2, 2, 2], NotHyperbolic),
            (&[5, 5, 5], HyperbolicNoThickBuilding),
            (&[8, 8, 8], HyperbolicNoThickBuilding), // odd number of 8s, no 2 or 4
            (&[8, 8, 8, 8], HyperbolicThickBuilding),
            (&[3, 3, 8, 8], HyperbolicThickBuilding),
            (&[3, 3, 4], HyperbolicThickBuilding),
            (&[6, 6, 6], HyperbolicThickBuilding), // 1/2 < 1, all 6s, no 8s
            (&[2, 2, 2, 3], HyperbolicThickBuilding),
        ];
        for (ks, expect) in cases {
            assert_eq!(fuchsian_admissible(ks).unwrap(), expect, "orders {ks:?}");
        }
        assert!(fuchsian_admissible(&[2, 2]).is_err());
        assert!(fuchsian_admissible(&[1, 3, 3]).is_err());
    }

    proptest! {
        #[test]
        fn reduce_respects_parity_and_concatenation(
            word in proptest::collection::vec(0u8..3, 0..20),
            split in 0usize..20
        ) {
            let g = group(CoxeterMatrix::type_b(3));
            let w = g.reduce(&word).unwrap();
            prop_assert_eq!(g.length(w) % 2, word.len() % 2);
            prop_assert!(g.length(w) <= word.len());
            // folding in two stages agrees with one pass
            let k = split.min(word.len());
            let front = g.reduce(&word[..k]).unwrap();
            let mut cur = front;
            for &s in &word[k..] {
                cur = g.right_multiply(cur, s as usize).0;
            }
            prop_assert_eq!(cur, w);
        }

        #[test]
        fn right_multiplication_is_an_involution_per_generator(
            word in proptest::collection::vec(0u8..2, 0..30)
        ) {
            let g = CoxeterGroup::dihedral_system(8).unwrap();
            let w = g.reduce(&word).unwrap();
            for s in 0..2 {
                let (ws, sign) = g.right_multiply(w, s);
                let (back, sign2) = g.right_multiply(ws, s);
                prop_assert_eq!(back, w);
                prop_assert_eq!(sign * sign2, -1);
            }
        }
    }
}
