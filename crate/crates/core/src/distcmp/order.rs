use std::cmp::Ordering;
use std::collections::HashMap;

/// Vertices of one cover set, sorted into groups of equal key. Groups carry
/// increasing `u64` labels so two members are ranked by a label lookup.
#[derive(Debug, Clone, Default)]
pub struct ClusterOrder {
    groups: Vec<(u64, Vec<u32>)>,
    label: HashMap<u32, u64>,
    /// Set once a member could not be placed; the order is then unusable.
    degraded: bool,
}

const GAP: u64 = 1 << 32;

impl ClusterOrder {
    pub fn singleton(v: u32) -> Self {
        let mut o = ClusterOrder::default();
        o.groups.push((GAP, vec![v]));
        o.label.insert(v, GAP);
        o
    }

    pub fn len(&self) -> usize {
        self.label.len()
    }

    pub fn is_empty(&self) -> bool {
        self.label.is_empty()
    }

    pub fn is_degraded(&self) -> bool {
        self.degraded
    }

    pub fn contains(&self, v: u32) -> bool {
        self.label.contains_key(&v)
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Members in order, grouped.
    pub fn groups(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.groups.iter().map(|(_, g)| g.as_slice())
    }

    /// Records `v` as a member without placing it and marks the order unusable.
    pub fn degrade(&mut self, v: u32) {
        self.degraded = true;
        self.label.insert(v, 0);
    }

    /// Places `v` by binary search. `cmp(rep)` orders `v` against the group
    /// holding `rep`; `Ok(None)` means no answer and degrades the order.
    pub fn insert_with<E, F>(&mut self, v: u32, mut cmp: F) -> Result<bool, E>
    where
        F: FnMut(u32) -> Result<Option<Ordering>, E>,
    {
        if self.degraded {
            self.label.insert(v, 0);
            return Ok(false);
        }
        let (mut lo, mut hi) = (0usize, self.groups.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match cmp(self.groups[mid].1[0])? {
                None => {
                    self.degrade(v);
                    return Ok(false);
                }
                Some(Ordering::Less) => hi = mid,
                Some(Ordering::Greater) => lo = mid + 1,
                Some(Ordering::Equal) => {
                    let l = self.groups[mid].0;
                    self.groups[mid].1.push(v);
                    self.label.insert(v, l);
                    return Ok(true);
                }
            }
        }
        let before = if lo == 0 { 0 } else { self.groups[lo - 1].0 };
        let after = if lo == self.groups.len() { before.saturating_add(2 * GAP) } else { self.groups[lo].0 };
        if after - before < 2 {
            self.relabel();
            return self.insert_with(v, cmp);
        }
        let l = before + (after - before) / 2;
        self.groups.insert(lo, (l, vec![v]));
        self.label.insert(v, l);
        Ok(true)
    }

    fn relabel(&mut self) {
        for (i, (l, members)) in self.groups.iter_mut().enumerate() {
            *l = (i as u64 + 1) * GAP;
            for &m in members.iter() {
                self.label.insert(m, *l);
            }
        }
    }

    pub fn remove(&mut self, v: u32) {
        let Some(l) = self.label.remove(&v) else { return };
        if self.degraded {
            return;
        }
        if let Ok(i) = self.groups.binary_search_by_key(&l, |g| g.0) {
            self.groups[i].1.retain(|&x| x != v);
            if self.groups[i].1.is_empty() {
                self.groups.remove(i);
            }
        }
    }

    /// Relative rank of two members, `None` if either is missing or the
    /// order is degraded.
    pub fn rank_cmp(&self, u: u32, v: u32) -> Option<Ordering> {
        if self.degraded {
            return None;
        }
        Some(self.label.get(&u)?.cmp(self.label.get(&v)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_key(keys: &[i32]) -> impl Fn(u32, u32) -> Result<Option<Ordering>, ()> + '_ {
        move |v, rep| Ok(Some(keys[v as usize].cmp(&keys[rep as usize])))
    }

    #[test]
    fn groups_and_ranks() {
        let keys = [5, 3, 5, 9, 1, 3];
        let cmp = by_key(&keys);
        let mut o = ClusterOrder::singleton(0);
        for v in 1..6 {
            o.insert_with(v, |rep| cmp(v, rep)).unwrap();
        }
        let gs: Vec<Vec<u32>> = o.groups().map(|g| g.to_vec()).collect();
        assert_eq!(gs, vec![vec![4], vec![1, 5], vec![0, 2], vec![3]]);
        assert_eq!(o.rank_cmp(1, 5), Some(Ordering::Equal));
        assert_eq!(o.rank_cmp(4, 3), Some(Ordering::Less));
        o.remove(4);
        assert_eq!(o.group_count(), 3);
        assert_eq!(o.rank_cmp(4, 3), None);
    }

    #[test]
    fn dense_insertions_relabel() {
        let keys: Vec<i32> = (0..200).map(|i: i32| -i).collect();
        let cmp = by_key(&keys);
        let mut o = ClusterOrder::singleton(0);
        for v in 1..200u32 {
            o.insert_with(v, |rep| cmp(v, rep)).unwrap();
        }
        for v in 1..200u32 {
            assert_eq!(o.rank_cmp(v, v - 1), Some(Ordering::Less));
        }
    }

    #[test]
    fn degrade() {
        let mut o = ClusterOrder::singleton(0);
        let r: Result<bool, ()> = o.insert_with(1, |_| Ok(None));
        assert_eq!(r, Ok(false));
        assert!(o.is_degraded());
        assert_eq!(o.rank_cmp(0, 1), None);
    }
}
