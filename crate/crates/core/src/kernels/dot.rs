use crate::sparse::{Node, SparseVector};
use crate::{Error, Result};

/// Sink for multiply counts. `()` discards them; `u64` accumulates.
pub trait MulCounter {
    fn add(&mut self, muls: usize);
}

impl MulCounter for () {
    #[inline(always)]
    fn add(&mut self, _: usize) {}
}

impl MulCounter for u64 {
    #[inline(always)]
    fn add(&mut self, muls: usize) {
        *self += muls as u64;
    }
}

/// Inner product of a dense fiber with the sparse segment starting at
/// `sparse[0]`. Walks nodes until the sentinel, so only stored entries are
/// multiplied.
///
/// Panics if a node indexes past `dense`; use [`dot_dense_sparse_checked`]
/// for untrusted input.
#[inline]
pub fn dot_dense_sparse(dense: &[f32], sparse: &[Node]) -> f32 {
    dot_counted(dense, sparse, &mut ())
}

#[inline(always)]
pub(crate) fn dot_counted<C: MulCounter>(dense: &[f32], sparse: &[Node], counter: &mut C) -> f32 {
    let mut x = 0.0f32;
    let mut visited = 0;
    for node in sparse {
        if node.index == -1 {
            break;
        }
        x += dense[node.index as usize] * node.value;
        visited += 1;
    }
    counter.add(visited);
    x
}

pub fn dot_dense_sparse_checked(dense: &[f32], sparse: &SparseVector) -> Result<f32> {
    sparse.validate()?;
    if sparse.len() > dense.len() {
        return Err(Error::format(format!(
            "sparse vector of length {} against dense fiber of length {}",
            sparse.len(),
            dense.len()
        )));
    }
    Ok(dot_dense_sparse(dense, sparse.nodes()))
}
