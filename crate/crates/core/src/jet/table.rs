//! Multi-index bookkeeping for truncated Taylor coefficients.
//!
//! Coefficients of a jet in `dim` variables at order `K` are stored densely,
//! one slot per multi-index of total degree <= K, in graded lexicographic
//! order: degree 0 first, then degree 1, ..., and within a degree the index
//! with the larger leading exponent first ((2,0) before (1,1) before (0,2)).
//! This enumeration has the prefix property: the table for order K-1 is
//! exactly the first `n_coeffs(dim, K-1)` entries of the table for order K,
//! which makes truncation a slice copy.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

pub const MAX_ORDER: usize = 4;
pub const MAX_DIM: usize = 6;

/// Marker for "product exceeds the truncation order" / "no successor".
pub(crate) const NONE: u32 = u32::MAX;

/// Number of coefficients of an order-`order` jet in `dim` variables:
/// C(dim + order, order).
pub fn n_coeffs(dim: usize, order: usize) -> usize {
    let mut num = 1usize;
    let mut den = 1usize;
    for k in 1..=order {
        num *= dim + k;
        den *= k;
    }
    num / den
}

pub(crate) struct IndexTable {
    pub dim: usize,
    pub order: usize,
    /// Multi-indices in graded lexicographic order; indices[i] has length dim.
    pub indices: Vec<Vec<u8>>,
    /// Flattened N x N product map: prod[i*N + j] is the slot of
    /// indices[i] + indices[j], or NONE if the sum exceeds `order`.
    pub prod: Vec<u32>,
    /// succ[axis*N + i] is the slot of indices[i] + e_axis, or NONE.
    pub succ: Vec<u32>,
    /// Slot lookup by multi-index.
    pub position: HashMap<Vec<u8>, u32>,
}

fn push_degree(dim: usize, total: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if dim == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for lead in (0..=total).rev() {
        prefix.push(lead);
        push_degree(dim - 1, total - lead, prefix, out);
        prefix.pop();
    }
}

impl IndexTable {
    fn build(dim: usize, order: usize) -> IndexTable {
        let mut indices = Vec::with_capacity(n_coeffs(dim, order));
        for d in 0..=order as u8 {
            let mut scratch = Vec::with_capacity(dim);
            push_degree(dim, d, &mut scratch, &mut indices);
        }
        let n = indices.len();
        debug_assert_eq!(n, n_coeffs(dim, order));

        let degree: Vec<u8> = indices.iter().map(|m| m.iter().sum()).collect();
        let position: HashMap<Vec<u8>, u32> = indices
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();

        let mut prod = vec![NONE; n * n];
        let mut sum = vec![0u8; dim];
        for i in 0..n {
            for j in 0..n {
                if (degree[i] + degree[j]) as usize > order {
                    continue;
                }
                for (s, (a, b)) in sum.iter_mut().zip(indices[i].iter().zip(&indices[j])) {
                    *s = a + b;
                }
                prod[i * n + j] = position[&sum];
            }
        }

        let mut succ = vec![NONE; dim * n];
        for i in 0..n {
            if degree[i] as usize == order {
                continue;
            }
            for axis in 0..dim {
                let mut m = indices[i].clone();
                m[axis] += 1;
                succ[axis * n + i] = position[&m];
            }
        }

        IndexTable {
            dim,
            order,
            indices,
            prod,
            succ,
            position,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }
}

static CACHE: LazyLock<Mutex<HashMap<(usize, usize), Arc<IndexTable>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Shared table for the given shape. Panics if the shape is outside the
/// supported range (dim in 1..=MAX_DIM, order in 0..=MAX_ORDER); callers
/// validate user-facing inputs before reaching this point.
pub(crate) fn table(dim: usize, order: usize) -> Arc<IndexTable> {
    assert!(
        (1..=MAX_DIM).contains(&dim) && order <= MAX_ORDER,
        "unsupported jet shape: dim {dim}, order {order}"
    );
    let mut cache = CACHE.lock().unwrap();
    cache
        .entry((dim, order))
        .or_insert_with(|| Arc::new(IndexTable::build(dim, order)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_counts() {
        assert_eq!(n_coeffs(1, 4), 5);
        assert_eq!(n_coeffs(2, 2), 6);
        assert_eq!(n_coeffs(3, 3), 20);
        assert_eq!(n_coeffs(5, 4), 126);
    }

    #[test]
    fn graded_lex_order_dim2() {
        let t = table(2, 2);
        let want: Vec<Vec<u8>> = vec![
            vec![0, 0],
            vec![1, 0],
            vec![0, 1],
            vec![2, 0],
            vec![1, 1],
            vec![0, 2],
        ];
        assert_eq!(t.indices, want);
    }

    #[test]
    fn lower_order_table_is_prefix() {
        for dim in 1..=4 {
            for order in 1..=MAX_ORDER {
                let hi = table(dim, order);
                let lo = table(dim, order - 1);
                assert_eq!(&hi.indices[..lo.len()], &lo.indices[..]);
            }
        }
    }

    #[test]
    fn product_map_roundtrip() {
        let t = table(3, 3);
        let n = t.len();
        let deg = |i: usize| t.indices[i].iter().sum::<u8>();
        for i in 0..n {
            for j in 0..n {
                let p = t.prod[i * n + j];
                if (deg(i) + deg(j)) as usize > t.order {
                    assert_eq!(p, NONE);
                } else {
                    let sum: Vec<u8> = t.indices[i]
                        .iter()
                        .zip(&t.indices[j])
                        .map(|(a, b)| a + b)
                        .collect();
                    assert_eq!(t.indices[p as usize], sum);
                }
            }
        }
    }
}
