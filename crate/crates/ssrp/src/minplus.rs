//! Min-plus products and APSP routed through single-source replacement
//! paths on a weighted gadget: normalization of integer matrices into
//! [1,2) rationals, the layered gadget whose replacement distances encode
//! one product row block per spine failure, and reference solvers.
//!
//! All arithmetic is exact binary fixed point; equality checks are
//! bit-exact.

use crate::oracle::{weighted_ssrp_oracle, WeightedGraph};
use crate::par;
use crate::{Error, Result};

/// Binary scale: rationals are stored as `value * 2^32`.
pub const SCALE_BITS: u32 = 32;
const ONE: u64 = 1 << SCALE_BITS;

/// Exact nonnegative binary fixed-point rational with an infinity sentinel.
/// Represents every input of the form `a / 2^k` with `k <= 32`; addition is
/// exact and sums of up to `2^16` terms stay in range.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FixedRational(u64);

impl FixedRational {
    pub const INFINITY: FixedRational = FixedRational(u64::MAX);
    pub const ZERO: FixedRational = FixedRational(0);

    pub fn from_int(v: u32) -> FixedRational {
        FixedRational((v as u64) << SCALE_BITS)
    }

    pub fn from_scaled(s: u64) -> FixedRational {
        debug_assert!(s != u64::MAX);
        FixedRational(s)
    }

    pub fn scaled(self) -> u64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0 != u64::MAX
    }

    pub fn is_integer(self) -> bool {
        self.is_finite() && self.0 & (ONE - 1) == 0
    }

    pub fn integer_value(self) -> Option<u64> {
        if self.is_integer() {
            Some(self.0 >> SCALE_BITS)
        } else {
            None
        }
    }

    /// Parses `inf`, a nonnegative integer, or a decimal whose fraction
    /// terminates in binary at scale 32 (e.g. `1.75`).
    pub fn parse(s: &str) -> Result<FixedRational> {
        let fail = || Error::Parse {
            line: 0,
            msg: format!("malformed matrix entry '{s}'"),
        };
        if s == "inf" {
            return Ok(FixedRational::INFINITY);
        }
        let (int_part, frac_part) = match s.split_once('.') {
            None => (s, ""),
            Some((a, b)) => (a, b),
        };
        let int: u64 = int_part.parse().map_err(|_| fail())?;
        if int >= 1 << 30 {
            return Err(Error::NotRepresentable(SCALE_BITS));
        }
        let mut scaled = int << SCALE_BITS;
        if !frac_part.is_empty() {
            if frac_part.len() > 15 || frac_part.bytes().any(|b| !b.is_ascii_digit()) {
                return Err(fail());
            }
            let frac: u64 = frac_part.parse().map_err(|_| fail())?;
            let den = 10u64.pow(frac_part.len() as u32);
            let num = (frac as u128) << SCALE_BITS;
            if num % den as u128 != 0 {
                return Err(Error::NotRepresentable(SCALE_BITS));
            }
            scaled += (num / den as u128) as u64;
        }
        Ok(FixedRational(scaled))
    }
}

impl std::ops::Add for FixedRational {
    type Output = FixedRational;
    fn add(self, rhs: FixedRational) -> FixedRational {
        if self.is_finite() && rhs.is_finite() {
            let v = self.0.checked_add(rhs.0).expect("fixed-point overflow");
            debug_assert!(v != u64::MAX);
            FixedRational(v)
        } else {
            FixedRational::INFINITY
        }
    }
}

impl std::fmt::Debug for FixedRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

impl std::fmt::Display for FixedRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if !self.is_finite() {
            return write!(f, "inf");
        }
        write!(f, "{}", self.0 >> SCALE_BITS)?;
        let mut frac = self.0 & (ONE - 1);
        if frac != 0 {
            write!(f, ".")?;
            while frac != 0 {
                frac *= 10;
                write!(f, "{}", frac >> SCALE_BITS)?;
                frac &= ONE - 1;
            }
        }
        Ok(())
    }
}

/// Square matrix over `FixedRational`-or-infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinPlusMatrix {
    pub n: usize,
    pub entries: Vec<FixedRational>,
}

impl MinPlusMatrix {
    pub fn filled(n: usize, v: FixedRational) -> MinPlusMatrix {
        MinPlusMatrix {
            n,
            entries: vec![v; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<FixedRational>>) -> MinPlusMatrix {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n));
        MinPlusMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FixedRational {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FixedRational) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FixedRational] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Count of finite entries.
    pub fn finite_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_finite()).count()
    }
}

/// Textbook triple loop, exact arithmetic.
pub fn minplus_direct(x: &MinPlusMatrix, y: &MinPlusMatrix) -> Result<MinPlusMatrix> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch(x.n, y.n));
    }
    let n = x.n;
    let mut z = MinPlusMatrix::filled(n, FixedRational::INFINITY);
    for i in 0..n {
        for k in 0..n {
            let a = x.get(i, k);
            if !a.is_finite() {
                continue;
            }
            for j in 0..n {
                let b = y.get(k, j);
                if b.is_finite() {
                    let v = a + b;
                    if v < z.get(i, j) {
                        z.set(i, j, v);
                    }
                }
            }
        }
    }
    Ok(z)
}

/// Scales two integer matrices into [1,2): divide by the least power of two
/// above the max finite entry, then add one. Infinite entries stay infinite.
pub fn normalize_matrices(
    a: &MinPlusMatrix,
    b: &MinPlusMatrix,
) -> Result<(MinPlusMatrix, MinPlusMatrix, u64)> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n, b.n));
    }
    let mut max: Option<u64> = None;
    for e in a.entries.iter().chain(b.entries.iter()) {
        if e.is_finite() {
            let v = e
                .integer_value()
                .ok_or(Error::NotRepresentable(SCALE_BITS))?;
            max = Some(max.map_or(v, |m| m.max(v)));
        }
    }
    let max = max.ok_or(Error::AllInfinite)?;
    let mut m_bar = 1u64;
    while m_bar <= max {
        m_bar *= 2;
    }
    let shift = m_bar.trailing_zeros();
    if shift > SCALE_BITS {
        return Err(Error::NotRepresentable(SCALE_BITS));
    }
    let norm = |m: &MinPlusMatrix| MinPlusMatrix {
        n: m.n,
        entries: m
            .entries
            .iter()
            .map(|e| {
                if e.is_finite() {
                    FixedRational::from_scaled((e.scaled() >> shift) + ONE)
                } else {
                    FixedRational::INFINITY
                }
            })
            .collect(),
    };
    Ok((norm(a), norm(b), m_bar))
}

/// Undoes the normalization of a product: subtract two, multiply back.
pub fn denormalize(c_bar: &MinPlusMatrix, m_bar: u64) -> MinPlusMatrix {
    let shift = m_bar.trailing_zeros();
    MinPlusMatrix {
        n: c_bar.n,
        entries: c_bar
            .entries
            .iter()
            .map(|e| {
                if e.is_finite() {
                    FixedRational::from_scaled((e.scaled() - 2 * ONE) << shift)
                } else {
                    FixedRational::INFINITY
                }
            })
            .collect(),
    }
}

/// The SSRP gadget for one block of product rows: layers `a`, `b`, `c`
/// carry the matrix entries as edge lengths, and a spine of `x` vertices
/// with calibrated tails turns each row into one spine-edge failure.
pub struct Gadget {
    pub graph: WeightedGraph,
    pub l: usize,
    pub spine: Vec<u32>,
    pub a_ids: Vec<u32>,
    pub b_ids: Vec<u32>,
    pub c_ids: Vec<u32>,
}

impl Gadget {
    /// `d(x_1, a_i)` by construction.
    pub fn calibration(&self, i: usize) -> FixedRational {
        FixedRational::from_int((8 * self.l - 7 * i + 1) as u32)
    }
}

/// Builds the gadget for `x_rows` (the block, row slot `i` is `x_rows[i-1]`)
/// against the full `Y`. Entries must be in [1,2) or infinite.
pub fn build_gadget(x_rows: &[&[FixedRational]], y: &MinPlusMatrix) -> Result<Gadget> {
    let n = y.n;
    let l = x_rows.len() + 1;
    let two = FixedRational::from_int(2);
    let one = FixedRational::from_int(1);
    for e in x_rows.iter().flat_map(|r| r.iter()).chain(y.entries.iter()) {
        if e.is_finite() && (*e < one || *e >= two) {
            return Err(Error::NotRepresentable(SCALE_BITS));
        }
    }

    let mut next_id = 0u32;
    let mut fresh = |count: usize| {
        let ids: Vec<u32> = (next_id..next_id + count as u32).collect();
        next_id += count as u32;
        ids
    };
    let spine = fresh(l);
    let a_ids = fresh(l);
    let b_ids = fresh(n);
    let c_ids = fresh(n);

    let mut edges: Vec<(u32, u32, FixedRational)> = Vec::new();
    for i in 0..l - 1 {
        edges.push((spine[i], spine[i + 1], one));
    }
    // Tail from x_i down to a_i, calibrated so that d(x_1, a_i) = 8L - 7i + 1
    // with the spine contributing i - 1.
    let mut tail_total = 0usize;
    for i in 1..=l {
        let len = 8 * (l - i) + 2;
        tail_total += len - 1;
        let inner = fresh(len - 1);
        let mut prev = spine[i - 1];
        for &v in &inner {
            edges.push((prev, v, one));
            prev = v;
        }
        edges.push((prev, a_ids[i - 1], one));
    }
    let _ = tail_total;
    for (slot, row) in x_rows.iter().enumerate() {
        for (k, &e) in row.iter().enumerate() {
            if e.is_finite() {
                edges.push((a_ids[slot], b_ids[k], e));
            }
        }
    }
    for k in 0..n {
        for j in 0..n {
            let e = y.get(k, j);
            if e.is_finite() {
                edges.push((b_ids[k], c_ids[j], e));
            }
        }
    }

    Ok(Gadget {
        graph: WeightedGraph::new(next_id as usize, &edges, true),
        l,
        spine,
        a_ids,
        b_ids,
        c_ids,
    })
}

/// Exact min-plus product of [1,2) matrices via one weighted SSRP
/// invocation per block of `L - 1` rows, shifting rows between blocks.
pub fn minplus_via_ssrp(x: &MinPlusMatrix, y: &MinPlusMatrix) -> Result<MinPlusMatrix> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch(x.n, y.n));
    }
    let n = x.n;
    let l = crate::rp::isqrt(n)
        + if crate::rp::isqrt(n).pow(2) == n {
            0
        } else {
            1
        }
        + 1;
    let rows_per_batch = l - 1;
    let batch_count = n.div_ceil(rows_per_batch);
    let inf_row = vec![FixedRational::INFINITY; n];

    let batches: Vec<usize> = (0..batch_count).collect();
    let results = par::map_slice(&batches, |&q| -> Result<Vec<Vec<FixedRational>>> {
        let start = q * rows_per_batch;
        let x_rows: Vec<&[FixedRational]> = (0..rows_per_batch)
            .map(|i| {
                if start + i < n {
                    x.row(start + i)
                } else {
                    inf_row.as_slice()
                }
            })
            .collect();
        let gadget = build_gadget(&x_rows, y)?;
        let failures: Vec<(u32, u32)> = (0..l - 1)
            .map(|i| (gadget.spine[i], gadget.spine[i + 1]))
            .collect();
        let dists = weighted_ssrp_oracle(&gadget.graph, gadget.spine[0], &failures);
        let mut rows = Vec::new();
        for slot in 1..=rows_per_batch {
            if start + slot > n {
                break;
            }
            let alpha = &dists[slot - 1];
            let base = gadget.calibration(slot);
            let threshold = base + FixedRational::from_int(4);
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let d = alpha[gadget.c_ids[j] as usize];
                if d < threshold {
                    row.push(FixedRational::from_scaled(d.scaled() - base.scaled()));
                } else {
                    row.push(FixedRational::INFINITY);
                }
            }
            rows.push(row);
        }
        Ok(rows)
    });

    let mut z = MinPlusMatrix::filled(n, FixedRational::INFINITY);
    let mut row_idx = 0usize;
    for batch in results {
        for row in batch? {
            for (j, v) in row.into_iter().enumerate() {
                z.set(row_idx, j, v);
            }
            row_idx += 1;
        }
    }
    debug_assert_eq!(row_idx, n);
    Ok(z)
}

/// Repeated min-plus squaring with entrywise min against the previous
/// iterate; each squaring runs normalize -> product -> denormalize.
pub fn apsp_via_minplus(w0: &MinPlusMatrix, via_ssrp: bool) -> Result<MinPlusMatrix> {
    let n = w0.n;
    for e in &w0.entries {
        if e.is_finite() && !e.is_integer() {
            return Err(Error::NotRepresentable(SCALE_BITS));
        }
    }
    let mut m = w0.clone();
    for i in 0..n {
        m.set(i, i, FixedRational::ZERO);
    }
    let rounds = (usize::BITS - n.leading_zeros()) as usize; // ceil(log2 n) for n >= 1
    for _ in 0..rounds {
        let sq = if m.finite_count() == 0 {
            MinPlusMatrix::filled(n, FixedRational::INFINITY)
        } else {
            let (a_bar, b_bar, m_bar) = normalize_matrices(&m, &m)?;
            let prod = if via_ssrp {
                minplus_via_ssrp(&a_bar, &b_bar)?
            } else {
                minplus_direct(&a_bar, &b_bar)?
            };
            denormalize(&prod, m_bar)
        };
        for i in 0..n * n {
            if sq.entries[i] < m.entries[i] {
                m.entries[i] = sq.entries[i];
            }
        }
    }
    Ok(m)
}

/// Textbook exact APSP referee.
pub fn floyd_warshall(w0: &MinPlusMatrix) -> MinPlusMatrix {
    let n = w0.n;
    let mut d = w0.clone();
    for i in 0..n {
        d.set(i, i, FixedRational::ZERO);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d.get(i, k);
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let v = dik + d.get(k, j);
                if v < d.get(i, j) {
                    d.set(i, j, v);
                }
            }
        }
    }
    d
}

/// Matrix file: first line `n`, then `n` lines of `n` entries, `inf`
/// allowed, integer or binary-terminating decimal.
pub fn parse_matrix(text: &str) -> Result<MinPlusMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line_no, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        msg: "missing size line".into(),
    })?;
    let n: usize = header.parse().map_err(|_| Error::Parse {
        line: line_no,
        msg: "malformed size".into(),
    })?;
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n {
        let (line_no, line) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "matrix ended early".into(),
        })?;
        let row: Vec<&str> = line.split_whitespace().collect();
        if row.len() != n {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {n} entries, found {}", row.len()),
            });
        }
        for tok in row {
            entries.push(FixedRational::parse(tok).map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("malformed matrix entry '{tok}'"),
            })?);
        }
    }
    Ok(MinPlusMatrix { n, entries })
}

pub fn write_matrix(m: &MinPlusMatrix) -> String {
    let mut out = format!("{}\n", m.n);
    for i in 0..m.n {
        let row: Vec<String> = m.row(i).iter().map(|e| e.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fr(s: &str) -> FixedRational {
        FixedRational::parse(s).unwrap()
    }

    fn int_matrix(rows: &[&[i64]]) -> MinPlusMatrix {
        MinPlusMatrix::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|&v| {
                            if v < 0 {
                                FixedRational::INFINITY
                            } else {
                                FixedRational::from_int(v as u32)
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }

    #[test]
    fn rational_parse_and_display() {
        assert_eq!(fr("1.75").scaled(), (7 << SCALE_BITS) / 4);
        assert_eq!(fr("2").to_string(), "2");
        assert_eq!(fr("1.5").to_string(), "1.5");
        assert_eq!(FixedRational::INFINITY.to_string(), "inf");
        assert!(FixedRational::parse("1.3").is_err()); // not binary-terminating
        assert!(FixedRational::parse("x").is_err());
    }

    #[test]
    fn normalize_three() {
        let a = int_matrix(&[&[3]]);
        let (a_bar, _, m_bar) = normalize_matrices(&a, &a).unwrap();
        assert_eq!(m_bar, 4);
        assert_eq!(a_bar.get(0, 0), fr("1.75"));
    }

    #[test]
    fn normalize_one() {
        let a = int_matrix(&[&[1]]);
        let (a_bar, _, m_bar) = normalize_matrices(&a, &a).unwrap();
        assert_eq!(m_bar, 2);
        assert_eq!(a_bar.get(0, 0), fr("1.5"));
    }

    #[test]
    fn normalize_keeps_infinity_and_rejects_all_inf() {
        let a = int_matrix(&[&[3, -1], &[-1, 2]]);
        let (a_bar, _, _) = normalize_matrices(&a, &a).unwrap();
        assert!(!a_bar.get(0, 1).is_finite());
        let inf = int_matrix(&[&[-1]]);
        assert!(matches!(
            normalize_matrices(&inf, &inf),
            Err(Error::AllInfinite)
        ));
    }

    #[test]
    fn denormalize_single_entry_pipeline() {
        let a = int_matrix(&[&[3]]);
        let b = int_matrix(&[&[5]]);
        let (a_bar, b_bar, m_bar) = normalize_matrices(&a, &b).unwrap();
        let c = denormalize(&minplus_direct(&a_bar, &b_bar).unwrap(), m_bar);
        assert_eq!(c.get(0, 0), FixedRational::from_int(8));
    }

    #[test]
    fn denormalize_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let n = 4;
            let rand_m = |rng: &mut ChaCha8Rng| {
                MinPlusMatrix::from_rows(
                    (0..n)
                        .map(|_| {
                            (0..n)
                                .map(|_| {
                                    if rng.gen_bool(0.2) {
                                        FixedRational::INFINITY
                                    } else {
                                        FixedRational::from_int(rng.gen_range(0..50))
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                )
            };
            let a = rand_m(&mut rng);
            let b = rand_m(&mut rng);
            let reference = minplus_direct(&a, &b).unwrap();
            match normalize_matrices(&a, &b) {
                Ok((a_bar, b_bar, m_bar)) => {
                    let c = denormalize(&minplus_direct(&a_bar, &b_bar).unwrap(), m_bar);
                    assert_eq!(c, reference);
                }
                Err(Error::AllInfinite) => {
                    assert_eq!(reference.finite_count(), 0);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn gadget_calibration_small() {
        // L = 3: d(x_1, a_1) = 18, d(x_1, a_2) = 11, d(x_1, a_3) = 4.
        let y = MinPlusMatrix::filled(4, FixedRational::INFINITY);
        let row = vec![FixedRational::INFINITY; 4];
        let rows: Vec<&[FixedRational]> = vec![&row, &row];
        let gadget = build_gadget(&rows, &y).unwrap();
        assert_eq!(gadget.l, 3);
        let d = gadget.graph.distances(gadget.spine[0], None);
        for i in 1..=3usize {
            assert_eq!(
                d[gadget.a_ids[i - 1] as usize],
                FixedRational::from_int((8 * 3 - 7 * i + 1) as u32),
                "calibration at i = {i}"
            );
        }
    }

    #[test]
    fn gadget_rejects_out_of_range_entries() {
        let y = MinPlusMatrix::from_rows(vec![vec![fr("2.5")]]);
        let row = vec![FixedRational::INFINITY];
        let rows: Vec<&[FixedRational]> = vec![&row];
        assert!(build_gadget(&rows, &y).is_err());
    }

    #[test]
    fn gadget_spine_and_empty_rows() {
        let y = MinPlusMatrix::filled(2, FixedRational::INFINITY);
        let row = vec![FixedRational::INFINITY; 2];
        let rows: Vec<&[FixedRational]> = vec![&row];
        let g = build_gadget(&rows, &y).unwrap();
        let d = g.graph.distances(g.spine[0], None);
        // Spine edge exists: x_2 is one step away.
        assert_eq!(d[g.spine[1] as usize], FixedRational::from_int(1));
        // All-infinite X row leaves c unreachable.
        assert!(!d[g.c_ids[0] as usize].is_finite());
    }

    #[test]
    fn via_ssrp_two_by_two() {
        let inf = FixedRational::INFINITY;
        let x = MinPlusMatrix::from_rows(vec![vec![fr("1.5"), fr("1.25")], vec![inf, fr("1")]]);
        let y = MinPlusMatrix::from_rows(vec![vec![fr("1"), inf], vec![fr("1.5"), fr("1.5")]]);
        let z = minplus_via_ssrp(&x, &y).unwrap();
        let expect = MinPlusMatrix::from_rows(vec![
            vec![fr("2.5"), fr("2.75")],
            vec![fr("2.5"), fr("2.5")],
        ]);
        assert_eq!(z, expect);
        assert_eq!(minplus_direct(&x, &y).unwrap(), expect);
    }

    #[test]
    fn via_ssrp_all_infinite() {
        let x = MinPlusMatrix::filled(3, FixedRational::INFINITY);
        let z = minplus_via_ssrp(&x, &x).unwrap();
        assert_eq!(z.finite_count(), 0);
    }

    #[test]
    fn via_ssrp_random_eight() {
        let vals = ["1", "1.25", "1.5", "1.75"];
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let rand_m = |rng: &mut ChaCha8Rng| {
                MinPlusMatrix::from_rows(
                    (0..8)
                        .map(|_| {
                            (0..8)
                                .map(|_| {
                                    if rng.gen_bool(0.3) {
                                        FixedRational::INFINITY
                                    } else {
                                        fr(vals[rng.gen_range(0..4)])
                                    }
                                })
                                .collect()
                        })
                        .collect(),
                )
            };
            let x = rand_m(&mut rng);
            let y = rand_m(&mut rng);
            assert_eq!(
                minplus_via_ssrp(&x, &y).unwrap(),
                minplus_direct(&x, &y).unwrap()
            );
        }
    }

    #[test]
    fn via_ssrp_size_one() {
        let x = MinPlusMatrix::from_rows(vec![vec![fr("1.5")]]);
        let y = MinPlusMatrix::from_rows(vec![vec![fr("1.25")]]);
        let z = minplus_via_ssrp(&x, &y).unwrap();
        assert_eq!(z.get(0, 0), fr("2.75"));
    }

    #[test]
    fn apsp_triangle_cycle() {
        // Directed 3-cycle with unit lengths: off-diagonal distances 1 or 2.
        let m = int_matrix(&[&[-1, 1, -1], &[-1, -1, 1], &[1, -1, -1]]);
        let d = apsp_via_minplus(&m, false).unwrap();
        assert_eq!(d, floyd_warshall(&m));
        assert_eq!(d.get(0, 2), FixedRational::from_int(2));
        assert_eq!(d.get(2, 1), FixedRational::from_int(2));
    }

    #[test]
    fn apsp_disconnected() {
        let m = int_matrix(&[&[-1, 1, -1], &[-1, -1, -1], &[-1, -1, -1]]);
        let d = apsp_via_minplus(&m, true).unwrap();
        assert!(!d.get(0, 2).is_finite());
        assert_eq!(d.get(0, 1), FixedRational::from_int(1));
    }

    #[test]
    fn apsp_random_matches_floyd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for round in 0..10 {
            let n = 16;
            let m = MinPlusMatrix::from_rows(
                (0..n)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                if rng.gen_bool(0.6) {
                                    FixedRational::INFINITY
                                } else {
                                    FixedRational::from_int(rng.gen_range(1..=10))
                                }
                            })
                            .collect()
                    })
                    .collect(),
            );
            let via = apsp_via_minplus(&m, round % 2 == 0).unwrap();
            assert_eq!(via, floyd_warshall(&m), "round {round}");
        }
    }

    #[test]
    fn floyd_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 12;
        let m = MinPlusMatrix::from_rows(
            (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.5) {
                                FixedRational::INFINITY
                            } else {
                                FixedRational::from_int(rng.gen_range(1..=9))
                            }
                        })
                        .collect()
                })
                .collect(),
        );
        let d = floyd_warshall(&m);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert!(d.get(i, j) <= d.get(i, k) + d.get(k, j));
                }
            }
        }
    }

    #[test]
    fn matrix_io_roundtrip() {
        let text = "2\n1.5 inf\n3 0.25\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(write_matrix(&m), text);
        assert!(parse_matrix("2\n1 2\n").is_err());
        assert!(parse_matrix("2\n1 2 3\n4 5\n").is_err());
    }
}
