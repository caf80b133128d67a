//! Frame of discernment and the subset algebra over its power set.
//!
//! A [`Frame`] is an ordered list of class labels. Subsets of the frame are
//! addressed by [`SubsetId`], a bit pattern whose i-th bit marks membership
//! of the i-th label, so intersection and union are single machine ops.

use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported frame (2^16 subsets).
pub const MAX_LABELS: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SubsetId(u32);

impl SubsetId {
    pub const EMPTY: SubsetId = SubsetId(0);

    pub const fn from_bits(bits: u32) -> Self {
        SubsetId(bits)
    }

    pub fn singleton(index: usize) -> Self {
        SubsetId(1 << index)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn cardinality(self) -> u32 {
        self.0.count_ones()
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_singleton(self) -> bool {
        self.0.count_ones() == 1
    }

    /// Index of the only member, if this is a singleton.
    pub fn singleton_index(self) -> Option<usize> {
        self.is_singleton().then(|| self.0.trailing_zeros() as usize)
    }

    pub const fn intersect(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 & other.0)
    }

    pub const fn union(self, other: SubsetId) -> SubsetId {
        SubsetId(self.0 | other.0)
    }

    pub const fn is_subset_of(self, other: SubsetId) -> bool {
        self.0 & other.0 == self.0
    }

    pub const fn intersects(self, other: SubsetId) -> bool {
        self.0 & other.0 != 0
    }

    pub const fn contains(self, index: usize) -> bool {
        (self.0 >> index) & 1 == 1
    }

    /// Member indices in ascending order.
    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }
}

impl fmt::Debug for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetId({:#b})", self.0)
    }
}

#[derive(Clone)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyFrame);
        }
        if labels.len() > MAX_LABELS {
            return Err(Error::FrameTooLarge(labels.len()));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Frame {
            labels: labels.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// The whole frame, Θ.
    pub fn theta(&self) -> SubsetId {
        SubsetId((1u32 << self.len()) - 1)
    }

    pub fn complement(&self, subset: SubsetId) -> SubsetId {
        SubsetId(self.theta().0 ^ subset.0)
    }

    pub fn singleton(&self, label: &str) -> Result<SubsetId> {
        self.index_of(label)
            .map(SubsetId::singleton)
            .ok_or_else(|| Error::UnknownLabel(label.to_owned()))
    }

    /// Subset containing the named labels. Order and repeats are ignored.
    pub fn subset_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<SubsetId> {
        labels.iter().try_fold(SubsetId::EMPTY, |acc, l| {
            Ok(acc.union(self.singleton(l.as_ref())?))
        })
    }

    pub fn check(&self, subset: SubsetId) -> Result<SubsetId> {
        if subset.0 > self.theta().0 {
            Err(Error::SubsetOutOfRange {
                bits: subset.0,
                size: self.len(),
            })
        } else {
            Ok(subset)
        }
    }

    pub fn singletons(&self) -> impl Iterator<Item = SubsetId> {
        (0..self.len()).map(SubsetId::singleton)
    }

    /// Every non-empty subset, in increasing bit order.
    pub fn subsets(&self) -> impl Iterator<Item = SubsetId> {
        (1..=self.theta().0).map(SubsetId)
    }

    /// Member labels sorted lexicographically, the serialized form of a subset.
    pub fn subset_labels(&self, subset: SubsetId) -> Vec<&str> {
        let mut out: Vec<&str> = subset.members().map(|i| self.label(i)).collect();
        out.sort_unstable();
        out
    }

    /// `{Ve, Vi}` style rendering in frame order.
    pub fn format_subset(&self, subset: SubsetId) -> String {
        if subset == self.theta() && self.len() > 1 {
            return "Θ".to_owned();
        }
        let names: Vec<&str> = subset.members().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Frame").field(&self.labels).finish()
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels.serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Frame {
        Frame::new(["A", "B", "C"]).unwrap()
    }

    #[test]
    fn construction() {
        let f = abc();
        assert_eq!(f.len(), 3);
        assert_eq!(f.theta().bits(), 7);
        let iris = Frame::new(["Se", "Ve", "Vi"]).unwrap();
        assert_eq!(iris.label(1), "Ve");
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(Frame::new(["A", "A"]), Err(Error::DuplicateLabel(l)) if l == "A"));
        assert!(matches!(Frame::new(Vec::<String>::new()), Err(Error::EmptyFrame)));
        assert!(matches!(Frame::new([""]), Err(Error::EmptyLabel)));
        let many: Vec<String> = (0..17).map(|i| format!("c{i}")).collect();
        assert!(matches!(Frame::new(many), Err(Error::FrameTooLarge(17))));
        let sixteen: Vec<String> = (0..16).map(|i| format!("c{i}")).collect();
        assert_eq!(Frame::new(sixteen).unwrap().theta().bits(), 0xFFFF);
    }

    #[test]
    fn subset_encoding() {
        let f = abc();
        assert_eq!(f.subset_of(&["B", "C"]).unwrap().bits(), 0b110);
        assert_eq!(f.subset_of::<&str>(&[]).unwrap(), SubsetId::EMPTY);
        assert_eq!(f.subset_of(&["C", "B"]).unwrap(), f.subset_of(&["B", "C"]).unwrap());
        assert_eq!(f.subset_of(&["B", "B", "C"]).unwrap().bits(), 0b110);
        assert!(matches!(f.subset_of(&["D"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn cardinality() {
        assert_eq!(SubsetId::from_bits(0b110).cardinality(), 2);
        assert_eq!(SubsetId::EMPTY.cardinality(), 0);
        assert_eq!(SubsetId::from_bits(0b111).cardinality(), 3);
    }

    #[test]
    fn out_of_range_subset_rejected() {
        let f = abc();
        assert!(f.check(SubsetId::from_bits(8)).is_err());
        assert!(f.check(SubsetId::from_bits(7)).is_ok());
    }

    #[test]
    fn complement_and_subset_relation_exhaustive() {
        for k in 1..=4 {
            let f = Frame::new((0..k).map(|i| format!("l{i}"))).unwrap();
            let all: Vec<SubsetId> = (0..=f.theta().bits()).map(SubsetId::from_bits).collect();
            for &a in &all {
                let c = f.complement(a);
                assert_eq!(a.cardinality() + c.cardinality(), k as u32);
                assert!(!a.intersects(c));
                for &b in &all {
                    let by_members = b.members().all(|i| a.contains(i));
                    assert_eq!(b.is_subset_of(a), by_members);
                }
            }
        }
    }

    #[test]
    fn serialized_labels_are_sorted() {
        let f = Frame::new(["C", "A", "B"]).unwrap();
        let s = f.subset_of(&["B", "C"]).unwrap();
        assert_eq!(f.subset_labels(s), vec!["B", "C"]);
        assert_eq!(f.format_subset(s), "{C, B}");
        assert_eq!(f.format_subset(f.theta()), "Θ");
    }

    #[test]
    fn members_iterates_ascending() {
        let s = SubsetId::from_bits(0b1011);
        assert_eq!(s.members().collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(SubsetId::from_bits(0b100).singleton_index(), Some(2));
        assert_eq!(SubsetId::from_bits(0b101).singleton_index(), None);
    }
}
