use std::cmp::Ordering;

/// Binary min-heap whose order comes from a caller-supplied comparison,
/// so comparisons may consult (and update) outside state.
#[derive(Debug, Clone)]
pub struct CmpHeap<T> {
    items: Vec<T>,
    pushes: u64,
}

impl<T> Default for CmpHeap<T> {
    fn default() -> Self {
        CmpHeap { items: Vec::new(), pushes: 0 }
    }
}

impl<T> CmpHeap<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn pushes(&self) -> u64 {
        self.pushes
    }

    pub fn push<F: FnMut(&T, &T) -> Ordering>(&mut self, x: T, cmp: &mut F) {
        self.pushes += 1;
        self.items.push(x);
        let mut i = self.items.len() - 1;
        while i > 0 {
            let p = (i - 1) / 2;
            if cmp(&self.items[i], &self.items[p]) != Ordering::Less {
                break;
            }
            self.items.swap(i, p);
            i = p;
        }
    }

    pub fn pop<F: FnMut(&T, &T) -> Ordering>(&mut self, cmp: &mut F) -> Option<T> {
        if self.items.is_empty() {
            return None;
        }
        let last = self.items.len() - 1;
        self.items.swap(0, last);
        let top = self.items.pop();
        let n = self.items.len();
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && cmp(&self.items[l], &self.items[m]) == Ordering::Less {
                m = l;
            }
            if r < n && cmp(&self.items[r], &self.items[m]) == Ordering::Less {
                m = r;
            }
            if m == i {
                break;
            }
            self.items.swap(i, m);
            i = m;
        }
        top
    }
}

/// Min-heap over vertex ids `0..n` with `Ord` keys; equal keys pop the
/// smaller id first. Supports removal by id.
#[derive(Debug, Clone)]
pub struct IndexedHeap<K> {
    heap: Vec<(K, usize)>,
    pos: Vec<Option<usize>>,
}

impl<K: Ord> IndexedHeap<K> {
    pub fn new(n: usize) -> Self {
        IndexedHeap { heap: Vec::new(), pos: vec![None; n] }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn less(&self, a: usize, b: usize) -> bool {
        let (x, y) = (&self.heap[a], &self.heap[b]);
        (&x.0, x.1) < (&y.0, y.1)
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].1] = Some(a);
        self.pos[self.heap[b].1] = Some(b);
    }

    fn up(&mut self, mut i: usize) {
        while i > 0 {
            let p = (i - 1) / 2;
            if !self.less(i, p) {
                break;
            }
            self.swap(i, p);
            i = p;
        }
    }

    fn down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && self.less(l, m) {
                m = l;
            }
            if r < n && self.less(r, m) {
                m = r;
            }
            if m == i {
                return;
            }
            self.swap(i, m);
            i = m;
        }
    }

    /// Inserts `v`, which must not be present.
    pub fn push(&mut self, v: usize, key: K) {
        debug_assert!(self.pos[v].is_none());
        self.heap.push((key, v));
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i);
    }

    pub fn pop(&mut self) -> Option<(usize, K)> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.swap(0, last);
        let (k, v) = self.heap.pop().unwrap();
        self.pos[v] = None;
        if !self.heap.is_empty() {
            self.down(0);
        }
        Some((v, k))
    }

    pub fn remove(&mut self, v: usize) -> Option<K> {
        let i = self.pos[v]?;
        let last = self.heap.len() - 1;
        self.swap(i, last);
        let (k, _) = self.heap.pop().unwrap();
        self.pos[v] = None;
        if i < self.heap.len() {
            self.down(i);
            self.up(i);
        }
        Some(k)
    }
}
