use super::Expr;
use std::sync::{Arc, RwLock};

/// `h, h', h'', ...` computed on demand and cached. Readers share the cache;
/// extension takes the write lock.
#[derive(Debug)]
pub struct DerivativeTower {
    entries: RwLock<Vec<Arc<Expr>>>,
}

impl DerivativeTower {
    pub fn new(base: Expr) -> Self {
        Self {
            entries: RwLock::new(vec![Arc::new(base.simplify())]),
        }
    }

    pub fn base(&self) -> Arc<Expr> {
        self.get(0)
    }

    /// The `order`-th derivative.
    pub fn get(&self, order: usize) -> Arc<Expr> {
        if let Some(e) = self.entries.read().expect("tower lock").get(order) {
            return Arc::clone(e);
        }
        let mut entries = self.entries.write().expect("tower lock");
        while entries.len() <= order {
            let next = entries.last().expect("base present").differentiate();
            entries.push(Arc::new(next));
        }
        Arc::clone(&entries[order])
    }

    /// Number of derivatives materialised so far, including the base.
    pub fn len(&self) -> usize {
        self.entries.read().expect("tower lock").len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Clone for DerivativeTower {
    fn clone(&self) -> Self {
        Self {
            entries: RwLock::new(self.entries.read().expect("tower lock").clone()),
        }
    }
}
