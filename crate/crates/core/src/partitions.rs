//! Young diagrams and the index sets of torus fixed points.
//!
//! Fixed points of the framed moduli space on P2 are r-tuples of Young
//! diagrams; fixed points on the blow-up are triples (Y, Z, k) of two such
//! tuples and an integer vector. All enumerations here are deterministic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Young diagram, stored as its weakly decreasing list of positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

/// A box of a Young diagram, 1-based in matrix convention: row `i`, column `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "partition parts must be positive: {parts:?}"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "partition parts must be weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// λ_i with 1-based `i`; zero beyond the length.
    pub fn row(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// λᵗ_j, the length of column `j` (1-based); zero beyond the width.
    pub fn column(&self, j: usize) -> usize {
        if j == 0 {
            return 0;
        }
        self.parts.iter().take_while(|&&p| p >= j).count()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.i >= 1 && cell.j >= 1 && cell.j <= self.row(cell.i)
    }

    /// Boxes in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (1..=len).map(move |j| Cell::new(r + 1, j)))
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.parts.first().copied().unwrap_or(0);
        Partition {
            parts: (1..=width).map(|j| self.column(j)).collect(),
        }
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (idx, p) in self.parts.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("partition must be bracketed: {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad part {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Signed arm and leg lengths `(λ_i − j, λᵗ_j − i)` of `cell` measured in `p`.
///
/// The cell need not lie in `p`; outside boxes give negative values.
pub fn arm_leg(p: &Partition, cell: Cell) -> (i64, i64) {
    let arm = p.row(cell.i) as i64 - cell.j as i64;
    let leg = p.column(cell.j) as i64 - cell.i as i64;
    (arm, leg)
}

/// All partitions of `n` in descending lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn go(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            prefix.push(part);
            go(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// An r-tuple of Young diagrams.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartitionTuple(pub Vec<Partition>);

impl PartitionTuple {
    pub fn empty(rank: usize) -> Self {
        Self(vec![Partition::empty(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> usize {
        self.0.iter().map(Partition::size).sum()
    }

    pub fn entries(&self) -> &[Partition] {
        &self.0
    }
}

impl fmt::Display for PartitionTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, p) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, ";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PartitionTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(';')
            .map(str::parse)
            .collect::<Result<Vec<Partition>>>()
            .map(PartitionTuple)
    }
}

/// All r-tuples of partitions of total size `n`.
///
/// The first entry's size runs from `n` down to 0; within a size, entries
/// follow [`enumerate_partitions`] order.
pub fn enumerate_tuples(rank: usize, n: usize) -> Vec<PartitionTuple> {
    assert!(rank >= 1, "rank must be at least 1");
    // partitions[m] for all m ≤ n, shared across the recursion
    let table: Vec<Vec<Partition>> = (0..=n).map(enumerate_partitions).collect();

    fn go(
        table: &[Vec<Partition>],
        slots: usize,
        remaining: usize,
        prefix: &mut Vec<Partition>,
        out: &mut Vec<PartitionTuple>,
    ) {
        if slots == 1 {
            for p in &table[remaining] {
                let mut entries = prefix.clone();
                entries.push(p.clone());
                out.push(PartitionTuple(entries));
            }
            return;
        }
        for size in (0..=remaining).rev() {
            for p in &table[size] {
                prefix.push(p.clone());
                go(table, slots - 1, remaining - size, prefix, out);
                prefix.pop();
            }
        }
    }

    let mut out = Vec::new();
    go(&table, rank, n, &mut Vec::new(), &mut out);
    out
}

/// An integer vector (k₁,…,k_r).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// Σ_{i<j} (k_i − k_j)².
    pub fn pair_form(&self) -> i64 {
        self.pairs().map(|d| d * d).sum()
    }

    /// Σ_{i<j} (k_i − k_j).
    pub fn pair_sum(&self) -> i64 {
        self.pairs().sum()
    }

    /// Differences k_i − k_j over all i < j.
    pub fn pairs(&self) -> impl Iterator<Item = i64> + '_ {
        let k = &self.0;
        (0..k.len()).flat_map(move |i| ((i + 1)..k.len()).map(move |j| k[i] - k[j]))
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, v) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LatticeVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::Parse(format!("bad lattice entry {v:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(LatticeVector)
    }
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// All integer vectors of length `rank` summing to `k` with pair form at most
/// `bound`.
///
/// Ordered by pair form ascending, then lexicographically descending.
pub fn enumerate_lattice_vectors(rank: usize, k: i64, bound: i64) -> Vec<LatticeVector> {
    assert!(rank >= 1, "rank must be at least 1");
    if bound < 0 {
        return Vec::new();
    }
    if rank == 1 {
        return vec![LatticeVector(vec![k])];
    }
    // |k_i − k/r| ≤ max_j |k_i − k_j| ≤ sqrt(bound)
    let r = rank as i64;
    let radius = isqrt(bound) + 1;
    let lo = k.div_euclid(r) - radius;
    let hi = k.div_euclid(r) + 1 + radius;

    let mut out = Vec::new();
    let mut current = vec![0i64; rank];
    #[allow(clippy::too_many_arguments)]
    fn scan(
        pos: usize,
        partial: i64,
        lo: i64,
        hi: i64,
        k: i64,
        bound: i64,
        current: &mut Vec<i64>,
        out: &mut Vec<LatticeVector>,
    ) {
        let rank = current.len();
        if pos == rank - 1 {
            current[pos] = k - partial;
            let v = LatticeVector(current.clone());
            if v.pair_form() <= bound {
                out.push(v);
            }
            return;
        }
        for value in lo..=hi {
            current[pos] = value;
            scan(pos + 1, partial + value, lo, hi, k, bound, current, out);
        }
    }
    scan(0, 0, lo, hi, k, bound, &mut current, &mut out);
    out.sort_by(|a, b| a.pair_form().cmp(&b.pair_form()).then_with(|| b.cmp(a)));
    out
}

/// A torus fixed point on the blow-up: two r-tuples of diagrams (one per
/// fixed point of the blown-up plane) and the lattice vector recording the
/// multiple of the exceptional curve in each summand.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlowupFixedPoint {
    pub y_tuple: PartitionTuple,
    pub z_tuple: PartitionTuple,
    pub kvec: LatticeVector,
}

impl BlowupFixedPoint {
    pub fn rank(&self) -> usize {
        self.kvec.rank()
    }

    pub fn k(&self) -> i64 {
        self.kvec.sum()
    }

    /// Σ |Y_i| + |Z_i|.
    pub fn diagram_weight(&self) -> usize {
        self.y_tuple.size() + self.z_tuple.size()
    }

    /// 2r·Σ(|Y_i|+|Z_i|) + Σ_{i<j}(k_i−k_j)², the grading of this fixed point
    /// (equal to 2rn + k(r−k)).
    pub fn q_exponent(&self) -> i64 {
        2 * self.rank() as i64 * self.diagram_weight() as i64 + self.kvec.pair_form()
    }

    /// The instanton number n recovered from the fixed-point constraint.
    pub fn instanton_number(&self) -> Result<i64> {
        let r = self.rank() as i64;
        let k = self.k();
        let numerator = self.q_exponent() - k * (r - k);
        if numerator.rem_euclid(2 * r) != 0 {
            return Err(Error::IntegralityViolation(format!(
                "fixed point {self} has non-integral instanton number {numerator}/{}",
                2 * r
            )));
        }
        Ok(numerator / (2 * r))
    }
}

impl fmt::Display for BlowupFixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.y_tuple, self.z_tuple, self.kvec)
    }
}

impl std::str::FromStr for BlowupFixedPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split('|').collect();
        let [y, z, k] = fields.as_slice() else {
            return Err(Error::Parse(format!("blow-up fixed point needs 3 fields: {s:?}")));
        };
        Ok(Self {
            y_tuple: y.parse()?,
            z_tuple: z.parse()?,
            kvec: k.parse()?,
        })
    }
}

/// Validates `0 ≤ k < rank`.
pub fn check_k_range(rank: usize, k: i64) -> Result<()> {
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    if k < 0 || k >= rank as i64 {
        return Err(Error::InvalidArgument(format!("k = {k} outside [0, {rank})")));
    }
    Ok(())
}

/// All blow-up fixed points with instanton number `n`, i.e. triples with
/// 2r·Σ(|Y_i|+|Z_i|) + Σ_{i<j}(k_i−k_j)² = 2rn + k(r−k).
pub fn enumerate_blowup_fixed_points(rank: usize, k: i64, n: i64) -> Result<Vec<BlowupFixedPoint>> {
    check_k_range(rank, k)?;
    let r = rank as i64;
    let target = 2 * r * n + k * (r - k);
    if target < 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for kvec in enumerate_lattice_vectors(rank, k, target) {
        let rest = target - kvec.pair_form();
        if rest.rem_euclid(2 * r) != 0 {
            continue;
        }
        let weight = (rest / (2 * r)) as usize;
        for both in enumerate_tuples(2 * rank, weight) {
            let mut entries = both.0;
            let z = entries.split_off(rank);
            out.push(BlowupFixedPoint {
                y_tuple: PartitionTuple(entries),
                z_tuple: PartitionTuple(z),
                kvec: kvec.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn arm_leg_examples() {
        assert_eq!(arm_leg(&p(&[2, 1]), Cell::new(1, 1)), (1, 1));
        assert_eq!(arm_leg(&p(&[2, 1]), Cell::new(1, 2)), (0, 0));
        assert_eq!(arm_leg(&Partition::empty(), Cell::new(1, 1)), (-1, -1));
    }

    #[test]
    fn arm_leg_outside_is_negative() {
        let lam = p(&[3, 1]);
        // below the diagram: leg negative
        assert!(arm_leg(&lam, Cell::new(3, 1)).1 < 0);
        // right of row 2: arm negative
        assert!(arm_leg(&lam, Cell::new(2, 2)).0 < 0);
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
    }

    #[test]
    fn partitions_small() {
        assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
        assert_eq!(enumerate_partitions(1), vec![p(&[1])]);
        let four = enumerate_partitions(4);
        assert_eq!(four.len(), 5);
        assert_eq!(four[0], p(&[4]));
        assert_eq!(four[1], p(&[3, 1]));
        assert_eq!(four[4], p(&[1, 1, 1, 1]));
    }

    #[test]
    fn tuples_small() {
        assert_eq!(
            enumerate_tuples(1, 2),
            vec![PartitionTuple(vec![p(&[2])]), PartitionTuple(vec![p(&[1, 1])])]
        );
        assert_eq!(enumerate_tuples(2, 2).len(), 5);
        assert_eq!(enumerate_tuples(2, 0), vec![PartitionTuple::empty(2)]);
    }

    #[test]
    fn lattice_vectors_examples() {
        assert_eq!(enumerate_lattice_vectors(1, 0, 100), vec![LatticeVector(vec![0])]);
        assert_eq!(
            enumerate_lattice_vectors(2, 1, 9),
            vec![
                LatticeVector(vec![1, 0]),
                LatticeVector(vec![0, 1]),
                LatticeVector(vec![2, -1]),
                LatticeVector(vec![-1, 2]),
            ]
        );
        assert_eq!(enumerate_lattice_vectors(2, 0, 0), vec![LatticeVector(vec![0, 0])]);
    }

    #[test]
    fn blowup_fixed_points_examples() {
        let fp = enumerate_blowup_fixed_points(1, 0, 0).unwrap();
        assert_eq!(fp.len(), 1);
        assert_eq!(fp[0].to_string(), "[]|[]|0");

        let fp = enumerate_blowup_fixed_points(1, 0, 1).unwrap();
        let shown: Vec<String> = fp.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["[1]|[]|0", "[]|[1]|0"]);

        let fp = enumerate_blowup_fixed_points(2, 1, 0).unwrap();
        let shown: Vec<String> = fp.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["[];[]|[];[]|1,0", "[];[]|[];[]|0,1"]);
    }

    #[test]
    fn blowup_rejects_k_out_of_range() {
        assert!(enumerate_blowup_fixed_points(2, 2, 0).is_err());
        assert!(enumerate_blowup_fixed_points(2, -1, 0).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let fp = BlowupFixedPoint {
            y_tuple: PartitionTuple(vec![p(&[2, 1]), Partition::empty()]),
            z_tuple: PartitionTuple(vec![Partition::empty(), p(&[1])]),
            kvec: LatticeVector(vec![2, -1]),
        };
        let text = fp.to_string();
        assert_eq!(text, "[2,1];[]|[];[1]|2,-1");
        assert_eq!(text.parse::<BlowupFixedPoint>().unwrap(), fp);
    }

    #[test]
    fn conjugate_matches_columns() {
        let lam = p(&[4, 2, 1]);
        assert_eq!(lam.conjugate(), p(&[3, 2, 1, 1]));
        assert_eq!(lam.conjugate().conjugate(), lam);
    }
}
