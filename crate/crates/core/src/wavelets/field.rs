//! Sparse storage of wavelet coefficients.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient convention. The only one in use is
/// `c_k = ⟨·, φ(· − k)⟩`, `c_{ijk} = 2^{dj} ⟨·, ψ^{(i)}(2^j · − k)⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    DyadicL1,
}

/// `(j, i, k)` ordered by level first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DetailKey {
    pub j: u32,
    pub i: u32,
    pub k: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    /// Error surrogate attached by the producer (quadrature or sewing gap).
    pub error: f64,
}

impl Entry {
    pub fn exact(value: f64) -> Self {
        Entry { value, error: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub d: usize,
    pub basis_order: u32,
    pub normalization: Normalization,
    pub scaling: BTreeMap<Vec<i64>, Entry>,
    pub detail: BTreeMap<DetailKey, Entry>,
    /// Highest level `j` for which every relevant detail coefficient was computed.
    pub populated_to: Option<u32>,
    /// False when a budget cut the computation short.
    pub complete: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldHeader {
    pub d: usize,
    pub basis_order: u32,
    pub normalization: Normalization,
    pub populated_to: Option<u32>,
    pub complete: bool,
    pub scaling_count: usize,
    pub detail_count: usize,
}

impl CoefficientField {
    pub fn new(d: usize, basis_order: u32) -> Self {
        CoefficientField {
            d,
            basis_order,
            normalization: Normalization::DyadicL1,
            scaling: BTreeMap::new(),
            detail: BTreeMap::new(),
            populated_to: None,
            complete: true,
        }
    }

    pub fn scaling(&self, k: &[i64]) -> f64 {
        self.scaling.get(k).map_or(0.0, |e| e.value)
    }

    pub fn detail(&self, i: u32, j: u32, k: &[i64]) -> f64 {
        self.detail
            .get(&DetailKey { j, i, k: k.to_vec() })
            .map_or(0.0, |e| e.value)
    }

    pub fn insert_detail(&mut self, i: u32, j: u32, k: Vec<i64>, e: Entry) {
        self.detail.insert(DetailKey { j, i, k }, e);
    }

    pub fn is_empty(&self) -> bool {
        self.scaling.is_empty() && self.detail.is_empty()
    }

    /// Entries of level `j`.
    pub fn level(&self, j: u32) -> impl Iterator<Item = (&DetailKey, &Entry)> {
        let lo = DetailKey { j, i: 0, k: Vec::new() };
        self.detail.range(lo..).take_while(move |(key, _)| key.j == j)
    }

    pub fn detail_count(&self, j: u32) -> usize {
        self.level(j).count()
    }

    pub fn level_max_abs(&self, j: u32) -> f64 {
        self.level(j).fold(0.0, |m, (_, e)| m.max(e.value.abs()))
    }

    pub fn level_l1(&self, j: u32) -> f64 {
        self.level(j).map(|(_, e)| e.value.abs()).sum()
    }

    /// Levels that hold at least one entry, ascending.
    pub fn levels(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.detail.keys().map(|k| k.j).collect();
        v.dedup();
        v
    }

    pub fn check_compatible(&self, other: &CoefficientField) -> Result<()> {
        if self.normalization != other.normalization || self.basis_order != other.basis_order || self.d != other.d {
            return Err(Error::NormalizationMismatch);
        }
        Ok(())
    }

    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            d: self.d,
            basis_order: self.basis_order,
            normalization: self.normalization,
            populated_to: self.populated_to,
            complete: self.complete,
            scaling_count: self.scaling.len(),
            detail_count: self.detail.len(),
        }
    }

    /// Rows `i, j, k_1..k_d, value`; scaling coefficients use `i = 0, j = 0`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut head = vec!["i".to_string(), "j".to_string()];
        head.extend((1..=self.d).map(|a| format!("k{a}")));
        head.push("value".into());
        wr.write_record(&head)?;
        let row = |i: u32, j: u32, k: &[i64], v: f64| {
            let mut r = vec![i.to_string(), j.to_string()];
            r.extend(k.iter().map(i64::to_string));
            r.push(format!("{v:e}"));
            r
        };
        for (k, e) in &self.scaling {
            wr.write_record(row(0, 0, k, e.value))?;
        }
        for (key, e) in &self.detail {
            wr.write_record(row(key.i, key.j, &key.k, e.value))?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_access_and_levels() {
        let mut f = CoefficientField::new(2, 4);
        f.insert_detail(1, 2, vec![0, 1], Entry::exact(0.5));
        f.insert_detail(3, 2, vec![-1, 1], Entry::exact(-2.0));
        f.insert_detail(2, 4, vec![5, 5], Entry::exact(1.0));
        assert_eq!(f.detail(3, 2, &[-1, 1]), -2.0);
        assert_eq!(f.detail(3, 2, &[0, 0]), 0.0);
        assert_eq!(f.levels(), vec![2, 4]);
        assert_eq!(f.detail_count(2), 2);
        assert_eq!(f.level_max_abs(2), 2.0);
        assert_eq!(f.level_l1(2), 2.5);
        assert_eq!(f.detail_count(3), 0);
    }

    #[test]
    fn csv_layout() {
        let mut f = CoefficientField::new(1, 2);
        f.scaling.insert(vec![0], Entry::exact(1.0));
        f.insert_detail(1, 3, vec![-2], Entry::exact(0.25));
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, "i,j,k1,value\n0,0,0,1e0\n1,3,-2,2.5e-1\n");
    }

    #[test]
    fn mismatch_detected() {
        let a = CoefficientField::new(2, 4);
        let b = CoefficientField::new(2, 6);
        assert!(matches!(a.check_compatible(&b), Err(Error::NormalizationMismatch)));
        assert!(a.check_compatible(&a.clone()).is_ok());
    }
}
