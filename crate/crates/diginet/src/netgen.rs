//! Construction of digital nets over GF(2) and the (0,n,2)-net property.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{mat_vec_mul, parse_bits, rank_of_words, BitMatrix, BitVector};
use crate::par;

/// Largest `n` for which a net is materialized (`2^n` points).
pub const MAX_NET_N: usize = 26;

/// The tuple `a = (a_1, ..., a_{n-1})` selecting one net of the family.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AVector {
    bits: Vec<u8>,
}

impl AVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument("a-vector entries must be 0 or 1".into()));
        }
        if bits.len() + 1 > MAX_NET_N {
            return Err(Error::InvalidArgument(format!(
                "n = {} exceeds the supported maximum {MAX_NET_N}",
                bits.len() + 1
            )));
        }
        Ok(AVector { bits })
    }

    /// `a` of length `n - 1` from its bit string; the empty string gives `n = 1`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_bits(s.trim())?)
    }

    /// Checks the length against `n` as well.
    pub fn parse_for(n: usize, s: &str) -> Result<Self> {
        let a = Self::parse(s)?;
        if a.n() != n {
            return Err(Error::InvalidArgument(format!(
                "a-vector {s:?} has length {}, expected n-1 = {}",
                a.bits.len(),
                n.saturating_sub(1)
            )));
        }
        Ok(a)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0; n.checked_sub(1).ok_or_else(n_positive)?])
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1; n.checked_sub(1).ok_or_else(n_positive)?])
    }

    pub fn n(&self) -> usize {
        self.bits.len() + 1
    }

    /// `a_i` for `1 <= i <= n-1`.
    pub fn get(&self, i: usize) -> u8 {
        assert!(i >= 1 && i < self.n(), "a_{i} undefined for n = {}", self.n());
        self.bits[i - 1]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Number of zeros among `a_1, ..., a_{n-1}`.
    pub fn h(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 0).count()
    }

    /// Every tuple of length `n - 1`, in counting order.
    pub fn all(n: usize) -> impl Iterator<Item = AVector> {
        let len = n.saturating_sub(1);
        (0u64..1 << len).map(move |w| AVector {
            bits: (0..len).map(|i| ((w >> (len - 1 - i)) & 1) as u8).collect(),
        })
    }
}

fn n_positive() -> Error {
    Error::InvalidArgument("n must be at least 1".into())
}

impl fmt::Display for AVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum NetKind {
    Hammersley,
    NutA,
    Custom,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GeneratorKind {
    Hammersley,
    NutA(AVector),
    Custom,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorSpec {
    pub n: usize,
    pub c1: BitMatrix,
    pub c2: BitMatrix,
    pub kind: GeneratorKind,
}

impl GeneratorSpec {
    pub fn hammersley(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(GeneratorSpec {
            n,
            c1: BitMatrix::anti_identity(n)?,
            c2: BitMatrix::identity(n)?,
            kind: GeneratorKind::Hammersley,
        })
    }

    /// Anti-identity `C1` and the unit upper triangular `C2` whose row `i`
    /// holds `a_i` right of the diagonal.
    pub fn nut_a(a: &AVector) -> Result<Self> {
        let n = a.n();
        check_n(n)?;
        let mut c2 = BitMatrix::identity(n)?;
        for i in 1..n {
            for k in i..n {
                c2.set(i - 1, k, a.get(i));
            }
        }
        Ok(GeneratorSpec {
            n,
            c1: BitMatrix::anti_identity(n)?,
            c2,
            kind: GeneratorKind::NutA(a.clone()),
        })
    }

    pub fn custom(c1: BitMatrix, c2: BitMatrix) -> Result<Self> {
        if c1.dim() != c2.dim() {
            return Err(Error::Dimension(format!(
                "generator matrices of sizes {} and {}",
                c1.dim(),
                c2.dim()
            )));
        }
        let n = c1.dim();
        check_n(n)?;
        Ok(GeneratorSpec { n, c1, c2, kind: GeneratorKind::Custom })
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(n_positive());
    }
    if n > MAX_NET_N {
        return Err(Error::InvalidArgument(format!(
            "n = {n} exceeds the supported maximum {MAX_NET_N}"
        )));
    }
    Ok(())
}

/// Builds a generator pair; `a` must be given exactly for [`NetKind::NutA`].
pub fn make_generators(kind: NetKind, n: usize, a: Option<&AVector>) -> Result<GeneratorSpec> {
    match (kind, a) {
        (NetKind::Hammersley, None) => GeneratorSpec::hammersley(n),
        (NetKind::NutA, Some(a)) => {
            if a.n() != n {
                return Err(Error::InvalidArgument(format!(
                    "a-vector has length {}, expected {}",
                    a.n() - 1,
                    n.saturating_sub(1)
                )));
            }
            GeneratorSpec::nut_a(a)
        }
        (NetKind::NutA, None) => Err(Error::InvalidArgument("nut_a needs an a-vector".into())),
        (_, Some(_)) => Err(Error::InvalidArgument("a-vector only applies to nut_a".into())),
        (NetKind::Custom, None) => Err(Error::InvalidArgument(
            "custom generators come from GeneratorSpec::custom".into(),
        )),
    }
}

/// A point `(x / 2^scale, y / 2^scale)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct DyadicPoint {
    pub x: u64,
    pub y: u64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Provenance {
    Generated(GeneratorSpec),
    FromA(AVector),
    Symmetrized(Box<Provenance>),
    Explicit,
}

/// Multiset of dyadic points sharing one scale.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointSet {
    points: Vec<DyadicPoint>,
    scale: u32,
    meta: Provenance,
}

impl PointSet {
    /// A set given point by point. Coordinates must lie in `[0, 1]`.
    pub fn from_points(scale: u32, points: Vec<DyadicPoint>) -> Result<Self> {
        if scale > 40 {
            return Err(Error::InvalidArgument(format!("scale {scale} too large")));
        }
        let d = 1u64 << scale;
        if let Some(p) = points.iter().find(|p| p.x > d || p.y > d) {
            return Err(Error::InvalidArgument(format!(
                "point ({}, {}) outside the unit square at scale {scale}",
                p.x, p.y
            )));
        }
        Ok(PointSet { points, scale, meta: Provenance::Explicit })
    }

    pub fn points(&self) -> &[DyadicPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn meta(&self) -> &Provenance {
        &self.meta
    }

    pub fn is_symmetrized(&self) -> bool {
        matches!(self.meta, Provenance::Symmetrized(_))
    }

    /// Points sorted, for multiset comparison.
    pub fn sorted_points(&self) -> Vec<DyadicPoint> {
        let mut v = self.points.clone();
        v.sort_unstable();
        v
    }

    /// Same multiset of points regardless of order and provenance.
    pub fn same_points(&self, other: &PointSet) -> bool {
        self.scale == other.scale && self.sorted_points() == other.sorted_points()
    }

    /// Coordinates as floating point pairs.
    pub fn to_f64(&self) -> Vec<(f64, f64)> {
        let d = (1u64 << self.scale) as f64;
        self.points.iter().map(|p| (p.x as f64 / d, p.y as f64 / d)).collect()
    }

    /// `log2` of the number of points, if it is a power of two.
    pub fn log2_len(&self) -> Option<u32> {
        let n = self.points.len();
        n.is_power_of_two().then(|| n.trailing_zeros())
    }
}

/// Steps 1-5 of the digital construction: digit-expand `r`, multiply by both
/// matrices, read the products as binary fractions. Points are in `r` order.
pub fn generate_net(spec: &GeneratorSpec) -> Result<PointSet> {
    let n = spec.n;
    check_n(n)?;
    if spec.c1.dim() != n || spec.c2.dim() != n {
        return Err(Error::Dimension("generator matrices do not match n".into()));
    }
    let points = par::map_collect(1usize << n, |r| {
        let rv = BitVector::from_integer_digits(r as u64, n).expect("r < 2^n");
        let y1 = mat_vec_mul(&spec.c1, &rv).expect("dimensions checked");
        let y2 = mat_vec_mul(&spec.c2, &rv).expect("dimensions checked");
        DyadicPoint { x: y1.to_fraction_numerator(), y: y2.to_fraction_numerator() }
    });
    Ok(PointSet { points, scale: n as u32, meta: Provenance::Generated(spec.clone()) })
}

/// The net selected by `a`, enumerated over digit tuples `(t_1, ..., t_n)` in
/// lexicographic order, with `x = t_n/2 + ... + t_1/2^n`,
/// `y = b_1/2 + ... + b_n/2^n`, `b_k = t_k xor a_k (t_{k+1} xor ... xor t_n)`
/// and `b_n = t_n`.
pub fn net_from_a(a: &AVector) -> PointSet {
    let n = a.n();
    let points = par::map_collect(1usize << n, |idx| {
        // t_1 is the most significant bit of idx
        let t = |k: usize| ((idx >> (n - k)) & 1) as u64;
        let mut x = 0u64;
        let mut y = 0u64;
        let mut suffix = 0u64; // t_{k+1} xor ... xor t_n
        for k in (1..=n).rev() {
            let tk = t(k);
            // t_k contributes 2^{-(n+1-k)} to x, b_k contributes 2^{-k} to y
            x |= tk << (k - 1);
            let bk = if k == n { tk } else { tk ^ (u64::from(a.get(k)) & suffix) };
            y |= bk << (n - k);
            suffix ^= tk;
        }
        DyadicPoint { x, y }
    });
    PointSet { points, scale: n as u32, meta: Provenance::FromA(a.clone()) }
}

/// Direct check that every dyadic box of volume `2^-n` holds exactly one point.
pub fn is_0n2_net(p: &PointSet) -> Result<bool> {
    if p.is_symmetrized() {
        return Err(Error::InvalidArgument(
            "the net property is defined for plain 2^n-point sets".into(),
        ));
    }
    let n = p.log2_len().ok_or_else(|| {
        Error::InvalidArgument(format!("{} points is not a power of two", p.len()))
    })? as usize;
    let s = p.scale();
    let d = 1u64 << s;
    if p.points().iter().any(|q| q.x >= d || q.y >= d) {
        return Ok(false);
    }
    let ok = par::map_all(n + 1, |j1| {
        let j2 = n - j1;
        let mut seen = vec![false; 1 << n];
        for q in p.points() {
            let m1 = ((q.x as u128) << j1 >> s) as usize;
            let m2 = ((q.y as u128) << j2 >> s) as usize;
            let slot = &mut seen[(m1 << j2) | m2];
            if *slot {
                return false;
            }
            *slot = true;
        }
        true
    });
    Ok(ok)
}

/// For every `d1 + d2 = n`, the first `d1` rows of `C1` together with the
/// first `d2` rows of `C2` have full rank.
pub fn rank_criterion(spec: &GeneratorSpec) -> bool {
    let n = spec.n;
    (0..=n).all(|d1| {
        let rows = spec.c1.row_words()[..d1].iter().chain(&spec.c2.row_words()[..n - d1]);
        rank_of_words(rows.copied()) == n
    })
}

/// Adds the reflection `(x, 1 - y)` of every point; duplicates are kept.
pub fn symmetrize(p: &PointSet) -> Result<PointSet> {
    if p.is_symmetrized() {
        return Err(Error::InvalidArgument("point set is already symmetrized".into()));
    }
    let d = 1u64 << p.scale();
    let mut points = p.points.clone();
    points.extend(p.points.iter().map(|q| DyadicPoint { x: q.x, y: d - q.y }));
    Ok(PointSet {
        points,
        scale: p.scale,
        meta: Provenance::Symmetrized(Box::new(p.meta.clone())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(list: &[(u64, u64)]) -> Vec<DyadicPoint> {
        let mut v: Vec<_> = list.iter().map(|&(x, y)| DyadicPoint { x, y }).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn nut_matrices() {
        let a = AVector::parse("1").unwrap();
        let g = make_generators(NetKind::NutA, 2, Some(&a)).unwrap();
        assert_eq!(g.c1, BitMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap());
        assert_eq!(g.c2, BitMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap());
        let g = make_generators(NetKind::NutA, 3, Some(&AVector::zeros(3).unwrap())).unwrap();
        assert_eq!(g.c2, BitMatrix::identity(3).unwrap());
        let h = make_generators(NetKind::Hammersley, 2, None).unwrap();
        assert_eq!(h.c1, BitMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap());
        assert_eq!(h.c2, BitMatrix::identity(2).unwrap());
    }

    #[test]
    fn generator_argument_errors() {
        let a = AVector::parse("10").unwrap();
        assert!(make_generators(NetKind::NutA, 2, Some(&a)).is_err());
        assert!(make_generators(NetKind::NutA, 3, None).is_err());
        assert!(make_generators(NetKind::Hammersley, 3, Some(&a)).is_err());
        assert!(make_generators(NetKind::Hammersley, 0, None).is_err());
        assert!(AVector::parse("012").is_err());
        assert!(AVector::parse_for(4, "01").is_err());
    }

    #[test]
    fn hammersley_points() {
        let p = generate_net(&GeneratorSpec::hammersley(1).unwrap()).unwrap();
        assert_eq!(p.sorted_points(), pts(&[(0, 0), (1, 1)]));
        let p = generate_net(&GeneratorSpec::hammersley(2).unwrap()).unwrap();
        assert_eq!(p.sorted_points(), pts(&[(0, 0), (2, 1), (1, 2), (3, 3)]));
        // first coordinates in r order are r / 2^n
        let xs: Vec<u64> = p.points().iter().map(|q| q.x).collect();
        assert_eq!(xs, vec![0, 1, 2, 3]);
    }

    #[test]
    fn points_from_a() {
        let p = net_from_a(&AVector::parse("0").unwrap());
        assert_eq!(p.points(), &[(0, 0), (2, 1), (1, 2), (3, 3)].map(|(x, y)| DyadicPoint { x, y }));
        let p = net_from_a(&AVector::parse("1").unwrap());
        assert_eq!(p.points(), &[(0, 0), (2, 3), (1, 2), (3, 1)].map(|(x, y)| DyadicPoint { x, y }));
        for n in 1..=7 {
            let ham = generate_net(&GeneratorSpec::hammersley(n).unwrap()).unwrap();
            assert!(net_from_a(&AVector::zeros(n).unwrap()).same_points(&ham));
        }
    }

    #[test]
    fn net_property_examples() {
        let ham = generate_net(&GeneratorSpec::hammersley(3).unwrap()).unwrap();
        assert!(is_0n2_net(&ham).unwrap());
        let diag = GeneratorSpec::custom(BitMatrix::identity(2).unwrap(), BitMatrix::identity(2).unwrap())
            .unwrap();
        assert!(!is_0n2_net(&generate_net(&diag).unwrap()).unwrap());
        assert!(!rank_criterion(&diag));
        for n in 1..=10 {
            assert!(rank_criterion(&GeneratorSpec::hammersley(n).unwrap()));
        }
        assert!(is_0n2_net(&symmetrize(&ham).unwrap()).is_err());
    }

    #[test]
    fn symmetrization() {
        let p = PointSet::from_points(1, pts(&[(0, 0), (1, 1)])).unwrap();
        let s = symmetrize(&p).unwrap();
        assert_eq!(s.points(), &pts(&[(0, 0), (1, 1)]).into_iter().chain(pts(&[(0, 2), (1, 1)])).collect::<Vec<_>>()[..]);
        assert_eq!(s.len(), 2 * p.len());
        assert!(symmetrize(&s).is_err());
        let mut xs: Vec<u64> = s.points().iter().map(|q| q.x).collect();
        xs.sort_unstable();
        assert_eq!(xs, vec![0, 0, 1, 1]);
    }

    #[test]
    fn a_vector_basics() {
        let a = AVector::parse("010").unwrap();
        assert_eq!(a.n(), 4);
        assert_eq!(a.h(), 2);
        assert_eq!(a.get(2), 1);
        assert_eq!(a.to_string(), "010");
        assert_eq!(AVector::parse("").unwrap().n(), 1);
        assert_eq!(AVector::all(4).count(), 8);
        assert_eq!(AVector::all(1).collect::<Vec<_>>(), vec![AVector::parse("").unwrap()]);
    }
}
