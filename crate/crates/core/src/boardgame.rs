//! Exact combinatorics of iterated Duhamel bookkeeping: admissible collapse
//! maps, their nondecreasing (reduced) representatives, the bijection onto
//! increasing index sequences, and the binomial/power bounds.
//!
//! Everything here is exact integer arithmetic; tests enumerate exhaustively.

use crate::error::{Error, Result};

/// Hard cap on k and j. Counting works anywhere in this range; materializing
/// the full admissible list is additionally capped by item count.
pub const MAX_KJ: u32 = 8;

/// Maps with more admissible variants than this refuse to materialize.
pub const MAX_ENUMERATION: u128 = 20_000_000;

/// A map `mu : {k+1, ..., k+j} -> {1, ..., k+j-1}` with `mu(l) < l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleMap {
    pub k: u32,
    pub j: u32,
    /// `values[a] = mu(k + a + 1)`, 1-based targets.
    pub values: Vec<u32>,
}

impl AdmissibleMap {
    pub fn new(k: u32, j: u32, values: Vec<u32>) -> Result<Self> {
        check_range(k, j)?;
        if values.len() != j as usize {
            return Err(Error::InvalidParameter(format!(
                "expected {j} values, got {}",
                values.len()
            )));
        }
        for (a, &v) in values.iter().enumerate() {
            let l = k + a as u32 + 1;
            if v < 1 || v >= l {
                return Err(Error::InvalidParameter(format!(
                    "mu({l}) = {v} violates 1 <= mu(l) < l"
                )));
            }
        }
        Ok(AdmissibleMap { k, j, values })
    }

    /// Reduced means nondecreasing.
    pub fn is_reduced(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

fn check_range(k: u32, j: u32) -> Result<()> {
    if !(1..=MAX_KJ).contains(&k) || !(1..=MAX_KJ).contains(&j) {
        return Err(Error::RangeExceeded(format!(
            "k and j must lie in 1..={MAX_KJ}, got k={k}, j={j}"
        )));
    }
    Ok(())
}

/// `prod_{l=k+1}^{k+j} (l-1)`, the number of admissible maps.
pub fn admissible_count(k: u32, j: u32) -> Result<u128> {
    check_range(k, j)?;
    Ok((k + 1..=k + j).map(|l| (l - 1) as u128).product())
}

/// Materialize every admissible map in lexicographic order.
pub fn enumerate_admissible(k: u32, j: u32) -> Result<Vec<AdmissibleMap>> {
    let count = admissible_count(k, j)?;
    if count > MAX_ENUMERATION {
        return Err(Error::RangeExceeded(format!(
            "k={k}, j={j} has {count} admissible maps, above the {MAX_ENUMERATION} materialization cap"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut values = vec![1u32; j as usize];
    loop {
        out.push(AdmissibleMap {
            k,
            j,
            values: values.clone(),
        });
        // odometer increment; digit a ranges over 1..=k+a
        let mut a = j as usize;
        loop {
            if a == 0 {
                return Ok(out);
            }
            a -= 1;
            let l = k + a as u32 + 1;
            if values[a] < l - 1 {
                values[a] += 1;
                values[a + 1..].iter_mut().for_each(|v| *v = 1);
                break;
            }
        }
    }
}

/// Count of reduced (nondecreasing) admissible maps, by dynamic programming
/// over (position, last value); no materialization.
pub fn count_reduced(k: u32, j: u32) -> Result<u128> {
    check_range(k, j)?;
    // ways[v] = number of nondecreasing prefixes ending with value v
    let mut ways = vec![0u128; (k + j) as usize + 1];
    for v in 1..=k {
        ways[v as usize] = 1;
    }
    for a in 2..=j {
        let cap = k + a - 1;
        let mut prefix = 0u128;
        let mut next = vec![0u128; ways.len()];
        for v in 1..=cap {
            prefix += ways[v as usize];
            next[v as usize] = prefix;
        }
        ways = next;
    }
    Ok(ways.iter().sum())
}

/// `binom(k + 2j - 2, j)`, the lattice-path bound on the reduced count.
pub fn catalan_bound(k: u32, j: u32) -> Result<u128> {
    check_range(k, j)?;
    Ok(binomial((k + 2 * j - 2) as u128, j as u128))
}

/// `2^{k + 2j - 2}`, the cruder bound that dominates the binomial one.
pub fn power_bound(k: u32, j: u32) -> Result<u128> {
    check_range(k, j)?;
    Ok(1u128 << (k + 2 * j - 2))
}

fn binomial(n: u128, mut r: u128) -> u128 {
    if r > n {
        return 0;
    }
    if r > n - r {
        r = n - r;
    }
    let mut acc = 1u128;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Encode a reduced map as the strictly increasing sequence
/// `s(a) = mu(k+a) + a - 1` inside `{1, ..., k+2j-2}`.
pub fn map_to_sequence(map: &AdmissibleMap) -> Result<Vec<u32>> {
    if !map.is_reduced() {
        return Err(Error::NotReduced);
    }
    Ok(map
        .values
        .iter()
        .enumerate()
        .map(|(a, &v)| v + a as u32)
        .collect())
}

/// Invert the encoding: `mu(k+a) = s(a) - a + 1`. Returns `Ok(None)` when the
/// candidate violates admissibility; the sequence count over-counts the
/// reduced maps and the surplus is exactly these rejects.
pub fn sequence_to_map(s: &[u32], k: u32, j: u32) -> Result<Option<AdmissibleMap>> {
    check_range(k, j)?;
    if s.len() != j as usize {
        return Err(Error::InvalidParameter(format!(
            "sequence length {} differs from j = {j}",
            s.len()
        )));
    }
    let top = k + 2 * j - 2;
    for (i, w) in s.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(Error::InvalidParameter(format!(
                "sequence not strictly increasing at position {i}"
            )));
        }
        let _ = w;
    }
    if s[0] < 1 || s[j as usize - 1] > top {
        return Err(Error::InvalidParameter(format!(
            "sequence entries must lie in 1..={top}"
        )));
    }
    let mut values = Vec::with_capacity(j as usize);
    for (a, &sa) in s.iter().enumerate() {
        let v = sa - a as u32; // s(a) - a + 1 with zero-based a
        let l = k + a as u32 + 1;
        if v >= l {
            return Ok(None);
        }
        values.push(v);
    }
    Ok(Some(AdmissibleMap { k, j, values }))
}

/// Enumerate all strictly increasing length-j sequences in `{1..k+2j-2}`.
pub fn enumerate_sequences(k: u32, j: u32) -> Result<Vec<Vec<u32>>> {
    check_range(k, j)?;
    let top = k + 2 * j - 2;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(j as usize);
    fn rec(start: u32, top: u32, want: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if want == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=top + 1 - want as u32 {
            cur.push(v);
            rec(v + 1, top, want - 1, cur, out);
            cur.pop();
        }
    }
    rec(1, top, j as usize, &mut cur, &mut out);
    Ok(out)
}

/// One row of the counting table exposed on the command line.
#[derive(Clone, Debug)]
pub struct CountRow {
    pub k: u32,
    pub j: u32,
    pub admissible: u128,
    pub reduced: u128,
    pub catalan_bound: u128,
    pub power_bound: u128,
}

/// Full counting table over `1..=k_max x 1..=j_max`.
pub fn counting_table(k_max: u32, j_max: u32) -> Result<Vec<CountRow>> {
    let mut rows = Vec::new();
    for k in 1..=k_max {
        for j in 1..=j_max {
            rows.push(CountRow {
                k,
                j,
                admissible: admissible_count(k, j)?,
                reduced: count_reduced(k, j)?,
                catalan_bound: catalan_bound(k, j)?,
                power_bound: power_bound(k, j)?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_cases() {
        // (k=1, j=1): exactly one map, mu(2) = 1
        let maps = enumerate_admissible(1, 1).unwrap();
        assert_eq!(maps.len(), 1);
        assert_eq!(maps[0].values, vec![1]);

        // (k=2, j=1): mu(3) in {1, 2}
        let maps = enumerate_admissible(2, 1).unwrap();
        assert_eq!(maps.len(), 2);

        // (k=1, j=3): 1 * 2 * 3 = 6
        assert_eq!(admissible_count(1, 3).unwrap(), 6);
        assert_eq!(enumerate_admissible(1, 3).unwrap().len(), 6);
    }

    #[test]
    fn reduced_counts_match_enumeration() {
        for k in 1..=6 {
            for j in 1..=6 {
                let by_filter = enumerate_admissible(k, j)
                    .unwrap()
                    .iter()
                    .filter(|m| m.is_reduced())
                    .count() as u128;
                assert_eq!(count_reduced(k, j).unwrap(), by_filter, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn known_reduced_values() {
        // (k=2, j=2): pairs mu(3) <= mu(4): (1,1),(1,2),(1,3),(2,2),(2,3)
        assert_eq!(count_reduced(2, 2).unwrap(), 5);
        assert_eq!(catalan_bound(2, 2).unwrap(), 6);
        // j = 1: any mu(k+1) in {1..k}; the binomial bound is tight
        for k in 1..=8 {
            assert_eq!(count_reduced(k, 1).unwrap(), k as u128);
            assert_eq!(catalan_bound(k, 1).unwrap(), k as u128);
        }
        assert_eq!(count_reduced(1, 1).unwrap(), 1);
        assert_eq!(catalan_bound(1, 1).unwrap(), 1);
    }

    #[test]
    fn bounds_chain() {
        for k in 1..=6 {
            for j in 1..=6 {
                let r = count_reduced(k, j).unwrap();
                let c = catalan_bound(k, j).unwrap();
                let p = power_bound(k, j).unwrap();
                assert!(r <= c, "k={k} j={j}: reduced {r} > binom {c}");
                assert!(c <= p, "k={k} j={j}: binom {c} > power {p}");
            }
        }
    }

    #[test]
    fn bijection_examples() {
        // k=2, j=2, mu=(1,1) -> s=(1,2)
        let m = AdmissibleMap::new(2, 2, vec![1, 1]).unwrap();
        assert_eq!(map_to_sequence(&m).unwrap(), vec![1, 2]);
        // k=2, j=2, mu=(2,3) -> s=(2,4)
        let m = AdmissibleMap::new(2, 2, vec![2, 3]).unwrap();
        assert_eq!(map_to_sequence(&m).unwrap(), vec![2, 4]);
        // k=1, j=2, s=(2,3) -> mu(2)=2 violates mu(2)<2: reject
        assert_eq!(sequence_to_map(&[2, 3], 1, 2).unwrap(), None);
    }

    #[test]
    fn roundtrip_and_overcount_accounting() {
        for k in 1..=6 {
            for j in 1..=6 {
                let reduced: Vec<AdmissibleMap> = enumerate_admissible(k, j)
                    .unwrap()
                    .into_iter()
                    .filter(|m| m.is_reduced())
                    .collect();
                for m in &reduced {
                    let s = map_to_sequence(m).unwrap();
                    assert!(s.windows(2).all(|w| w[0] < w[1]));
                    let back = sequence_to_map(&s, k, j).unwrap().expect("roundtrip");
                    assert_eq!(&back, m);
                }
                let seqs = enumerate_sequences(k, j).unwrap();
                assert_eq!(seqs.len() as u128, catalan_bound(k, j).unwrap());
                let mut accepted = Vec::new();
                let mut rejects = 0u128;
                for s in &seqs {
                    match sequence_to_map(s, k, j).unwrap() {
                        Some(m) => {
                            assert!(m.is_reduced());
                            accepted.push(m);
                        }
                        None => rejects += 1,
                    }
                }
                accepted.sort_by(|a, b| a.values.cmp(&b.values));
                accepted.dedup();
                assert_eq!(accepted.len() as u128, count_reduced(k, j).unwrap());
                assert_eq!(
                    accepted.len() as u128 + rejects,
                    catalan_bound(k, j).unwrap(),
                    "k={k} j={j}"
                );
            }
        }
    }

    #[test]
    fn specific_overcounts() {
        // k=2, j=2: exactly 1 of the 6 sequences rejects
        let seqs = enumerate_sequences(2, 2).unwrap();
        let rejects = seqs
            .iter()
            .filter(|s| sequence_to_map(s, 2, 2).unwrap().is_none())
            .count();
        assert_eq!(rejects, 1);
        // k=3, j=1: all binom(3,1)=3 sequences accept
        let seqs = enumerate_sequences(3, 1).unwrap();
        assert_eq!(seqs.len(), 3);
        assert!(seqs
            .iter()
            .all(|s| sequence_to_map(s, 3, 1).unwrap().is_some()));
    }

    #[test]
    fn range_and_materialization_guards() {
        assert!(enumerate_admissible(9, 1).is_err());
        assert!(enumerate_admissible(0, 1).is_err());
        assert!(count_reduced(1, 9).is_err());
        // k=8, j=8: 259 459 200 admissible maps; counting fine, listing refused
        assert_eq!(admissible_count(8, 8).unwrap(), 259_459_200);
        assert!(enumerate_admissible(8, 8).is_err());
        assert!(count_reduced(8, 8).is_ok());
    }
}
