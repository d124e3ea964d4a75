//! Weighted sequence-space norms on finite-support coefficient sequences.
//!
//! For `1 <= p < inf` and `r in (0, inf)^n`,
//! `||s||_{p,r} = (sum_alpha |s_alpha|^p r^alpha)^(1/p)` and
//! `||s||_{inf,r} = sup_alpha |s_alpha| r^alpha`. With `r = 1` these are the
//! plain `l_p` norms. The dual of `l_{p,r}` is `l_{q,r'}` with `q` the
//! conjugate exponent and `r' = r^(-q/p)` (`r^-1` at both endpoints).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::polyring::{check_dim, monomial_basis, MultiIndex, Polynomial};

/// Above this value of `|alpha . log r|` the weights `r^alpha` are handled
/// in log space.
const LOG_SPACE_THRESHOLD: f64 = 600.0;

/// A norm exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinite)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Format(format!("not an exponent: {s:?}")))?;
                Exponent::new(p)
            }
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Num(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// `(p, r)` identifying the topology `||.||_{p,r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub p: Exponent,
    pub r: Vec<f64>,
}

impl WeightSpec {
    pub fn new(p: Exponent, r: Vec<f64>) -> Result<Self> {
        if let Exponent::Finite(v) = p {
            if !(v >= 1.0 && v.is_finite()) {
                return Err(Error::InvalidExponent(v));
            }
        }
        if let Some((axis, &value)) = r.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidWeight { axis, value });
        }
        Ok(WeightSpec { p, r })
    }

    /// `||.||_p` on `n` variables (`r = (1, ..., 1)`).
    pub fn unweighted(p: Exponent, n: usize) -> Self {
        WeightSpec { p, r: vec![1.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.r.len()
    }

    /// Half-widths of the box attached to this weight: `r_i^(1/p)` for
    /// finite `p` and `r_i` for `p = inf`.
    pub fn box_radius(&self) -> Vec<f64> {
        match self.p {
            Exponent::Finite(p) => self.r.iter().map(|r| r.powf(1.0 / p)).collect(),
            Exponent::Infinite => self.r.clone(),
        }
    }
}

/// Parameters `(q, r')` of the dual space of `l_{p,r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSpec {
    pub q: Exponent,
    pub r: Vec<f64>,
}

impl DualSpec {
    /// The dual space is itself a weighted sequence space.
    pub fn as_weight(&self) -> WeightSpec {
        WeightSpec {
            p: self.q,
            r: self.r.clone(),
        }
    }
}

pub fn conjugate_exponent(p: Exponent) -> Exponent {
    match p {
        Exponent::Infinite => Exponent::Finite(1.0),
        Exponent::Finite(1.0) => Exponent::Infinite,
        Exponent::Finite(v) => Exponent::Finite(v / (v - 1.0)),
    }
}

pub fn dual_weight(w: &WeightSpec) -> DualSpec {
    let q = conjugate_exponent(w.p);
    let r = match (w.p, q) {
        (Exponent::Finite(p), Exponent::Finite(q)) if p > 1.0 => w.r.iter().map(|r| r.powf(-q / p)).collect(),
        _ => w.r.iter().map(|r| 1.0 / r).collect(),
    };
    DualSpec { q, r }
}

/// `||s||_{p,r}` for the finite-support sequence of coefficients of `s`.
pub fn weighted_norm(s: &Polynomial, w: &WeightSpec) -> Result<f64> {
    check_dim(w.dim(), s.dim())?;
    Ok(sequence_norm(s.terms(), w.p, &w.r))
}

/// Norm of an arbitrary finite list of `(alpha, value)` entries.
pub(crate) fn sequence_norm<'a, I>(entries: I, p: Exponent, r: &[f64]) -> f64
where
    I: IntoIterator<Item = (&'a MultiIndex, f64)>,
{
    let log_r: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let entries: Vec<(&MultiIndex, f64)> = entries.into_iter().filter(|(_, v)| *v != 0.0).collect();
    if entries.is_empty() {
        return 0.0;
    }
    let risky = entries
        .iter()
        .any(|(a, _)| a.dot(&log_r).abs() > LOG_SPACE_THRESHOLD);
    if risky {
        return log_space_norm(&entries, p, &log_r);
    }
    match p {
        Exponent::Infinite => entries
            .iter()
            .map(|(a, v)| v.abs() * a.eval_monomial(r))
            .fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let acc: CompensatedSum = entries
                .iter()
                .map(|(a, v)| v.abs().powf(p) * a.eval_monomial(r))
                .collect();
            root(acc.value(), p)
        }
    }
}

fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

fn log_space_norm(entries: &[(&MultiIndex, f64)], p: Exponent, log_r: &[f64]) -> f64 {
    match p {
        Exponent::Infinite => entries
            .iter()
            .map(|(a, v)| v.abs().ln() + a.dot(log_r))
            .fold(f64::NEG_INFINITY, f64::max)
            .exp(),
        Exponent::Finite(p) => {
            let logs: Vec<f64> = entries
                .iter()
                .map(|(a, v)| p * v.abs().ln() + a.dot(log_r))
                .collect();
            let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let acc: CompensatedSum = logs.iter().map(|l| (l - max).exp()).collect();
            ((max + acc.value().ln()) / p).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `l_p -> l_{p,r}`: `s_alpha -> s_alpha r^(-alpha/p)`.
    Forward,
    /// `l_{p,r} -> l_p`: `s_alpha -> s_alpha r^(alpha/p)`.
    Inverse,
}

/// The diagonal isometry `T_{p,r}` between unweighted and weighted spaces.
pub fn scaling_isometry(s: &Polynomial, w: &WeightSpec, direction: Direction) -> Result<Polynomial> {
    let p = match w.p {
        Exponent::Finite(p) => p,
        Exponent::Infinite => return Err(Error::InfiniteExponent),
    };
    check_dim(w.dim(), s.dim())?;
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let log_c: Vec<f64> = w.r.iter().map(|r| sign * r.ln() / p).collect();
    let c: Vec<f64> = log_c.iter().map(|l| l.exp()).collect();
    Ok(s.map_coefficients(|a, v| {
        if a.dot(&log_c).abs() > LOG_SPACE_THRESHOLD {
            v * a.dot(&log_c).exp()
        } else {
            v * a.eval_monomial(&c)
        }
    }))
}

/// Dual-space norm of the moment sequence `(x^alpha)_alpha`, the operator
/// norm of evaluation at `x` on `(R[X], ||.||_{p,r})`. Returns `+inf` when
/// the sequence is not in the dual space.
pub fn eval_sequence_norm(x: &[f64], w: &WeightSpec) -> Result<f64> {
    check_dim(w.dim(), x.len())?;
    let dual = dual_weight(w);
    match dual.q {
        Exponent::Infinite => {
            // sup_alpha prod_i (|x_i| r'_i)^alpha_i
            let bounded = x.iter().zip(&dual.r).all(|(xi, ri)| xi.abs() * ri <= 1.0);
            Ok(if bounded { 1.0 } else { f64::INFINITY })
        }
        Exponent::Finite(q) => {
            // product of geometric series sum_k (|x_i|^q r'_i)^k
            let mut product = 1.0;
            for (xi, ri) in x.iter().zip(&dual.r) {
                let ratio = xi.abs().powf(q) * ri;
                if ratio >= 1.0 {
                    return Ok(f64::INFINITY);
                }
                product /= 1.0 - ratio;
            }
            Ok(root(product, q))
        }
    }
}

/// The same dual norm restricted to `|alpha| <= degree`.
pub fn truncated_eval_sequence_norm(x: &[f64], w: &WeightSpec, degree: usize) -> Result<f64> {
    check_dim(w.dim(), x.len())?;
    let dual = dual_weight(w);
    let basis = monomial_basis(x.len(), degree);
    Ok(sequence_norm(
        basis.iter().map(|a| (a, a.eval_monomial(x))),
        dual.q,
        &dual.r,
    ))
}

/// Whether `f -> f(x)` is continuous for `||.||_{p,r}`, i.e. whether
/// [`eval_sequence_norm`] is finite. For `p = 1` this is the closed box
/// `|x_i| <= r_i`; otherwise the open box `|x_i| < r_i^(1/p)` (`r_i` when
/// `p = inf`).
pub fn is_evaluation_continuous(x: &[f64], w: &WeightSpec) -> Result<bool> {
    Ok(eval_sequence_norm(x, w)?.is_finite())
}

/// Both sides of Hölder's inequality for the pointwise product
/// `(ab)_alpha = a_alpha b_alpha`: `(||ab||_1, ||a||_p ||b||_q)`.
pub fn holder_product_norm(a: &Polynomial, b: &Polynomial, p: Exponent) -> Result<(f64, f64)> {
    check_dim(a.dim(), b.dim())?;
    let n = a.dim();
    let ones = vec![1.0; n];
    let product: CompensatedSum = a.terms().map(|(alpha, v)| (v * b.coef(alpha)).abs()).collect();
    let q = conjugate_exponent(p);
    let rhs = sequence_norm(a.terms(), p, &ones) * sequence_norm(b.terms(), q, &ones);
    Ok((product.value(), rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn poly(n: usize, terms: &[(&[u32], f64)]) -> Polynomial {
        Polynomial::from_terms(n, terms.iter().map(|(e, c)| (MultiIndex::new(e.to_vec()), *c))).unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate_exponent(fin(1.0)), Exponent::Infinite);
        assert_eq!(conjugate_exponent(Exponent::Infinite), fin(1.0));
        assert_eq!(conjugate_exponent(fin(2.0)), fin(2.0));
        match conjugate_exponent(fin(4.0)) {
            Exponent::Finite(q) => assert!((q - 4.0 / 3.0).abs() < 1e-15),
            _ => panic!(),
        }
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("1.5".parse::<Exponent>().unwrap(), fin(1.5));
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(matches!(
            WeightSpec::new(fin(2.0), vec![1.0, 0.0]),
            Err(Error::InvalidWeight { axis: 1, .. })
        ));
        assert!(WeightSpec::new(fin(2.0), vec![-1.0]).is_err());
    }

    #[test]
    fn norm_examples() {
        let x2 = poly(1, &[(&[2], 1.0)]);
        let w = WeightSpec::new(fin(1.0), vec![4.0]).unwrap();
        assert_eq!(weighted_norm(&x2, &w).unwrap(), 16.0);

        let s = poly(2, &[(&[0, 0], 1.0), (&[1, 0], 1.0), (&[0, 1], 1.0)]);
        let w = WeightSpec::unweighted(Exponent::Infinite, 2);
        assert_eq!(weighted_norm(&s, &w).unwrap(), 1.0);

        let s = poly(1, &[(&[0], 1.0), (&[1], 2.0)]);
        let w = WeightSpec::new(fin(2.0), vec![3.0]).unwrap();
        assert!((weighted_norm(&s, &w).unwrap() - 13f64.sqrt()).abs() < 1e-15);

        assert_eq!(weighted_norm(&Polynomial::zero(1), &w).unwrap(), 0.0);
    }

    #[test]
    fn log_space_agrees_with_direct_at_the_threshold() {
        // 1000 * ln(2) > 600 triggers the log path
        let s = poly(1, &[(&[0], 1.0), (&[1000], 1e-150)]);
        let w = WeightSpec::new(fin(2.0), vec![2.0]).unwrap();
        let got = weighted_norm(&s, &w).unwrap();
        let expected = (1.0 + 1e-300 * 2f64.powi(1000)).sqrt();
        assert!((got - expected).abs() < 1e-12 * expected, "{got} vs {expected}");
        // a genuine overflow becomes +inf, not NaN
        let s = poly(1, &[(&[2000], 1.0)]);
        let w = WeightSpec::new(Exponent::Infinite, vec![10.0]).unwrap();
        assert_eq!(weighted_norm(&s, &w).unwrap(), f64::INFINITY);
    }

    #[test]
    fn dual_weights() {
        let d = dual_weight(&WeightSpec::new(fin(1.0), vec![2.0, 3.0]).unwrap());
        assert_eq!(d.q, Exponent::Infinite);
        assert_eq!(d.r, vec![0.5, 1.0 / 3.0]);

        let d = dual_weight(&WeightSpec::unweighted(fin(2.0), 3));
        assert_eq!(d.q, fin(2.0));
        assert_eq!(d.r, vec![1.0; 3]);

        let d = dual_weight(&WeightSpec::new(fin(3.0), vec![8.0]).unwrap());
        assert_eq!(d.q, fin(1.5));
        assert!((d.r[0] - 8f64.powf(-0.5)).abs() < 1e-15);

        let d = dual_weight(&WeightSpec::new(Exponent::Infinite, vec![4.0]).unwrap());
        assert_eq!(d.q, fin(1.0));
        assert_eq!(d.r, vec![0.25]);
    }

    #[test]
    fn isometry_examples() {
        let x2 = poly(1, &[(&[2], 1.0)]);
        let w = WeightSpec::new(fin(1.0), vec![4.0]).unwrap();
        let t = scaling_isometry(&x2, &w, Direction::Forward).unwrap();
        assert_eq!(t, poly(1, &[(&[2], 1.0 / 16.0)]));
        let back = scaling_isometry(&t, &w, Direction::Inverse).unwrap();
        assert_eq!(back, x2);

        let w = WeightSpec::new(Exponent::Infinite, vec![4.0]).unwrap();
        assert!(matches!(
            scaling_isometry(&x2, &w, Direction::Forward),
            Err(Error::InfiniteExponent)
        ));
    }

    #[test]
    fn isometry_keeps_extreme_weights() {
        // a relative-drop canonicalization would lose the X^8 term here
        let s = poly(1, &[(&[0], 1.0), (&[8], 1.0)]);
        let w = WeightSpec::new(fin(1.0), vec![1e3]).unwrap();
        let t = scaling_isometry(&s, &w, Direction::Forward).unwrap();
        assert_eq!(t.num_terms(), 2);
        assert!((weighted_norm(&t, &w).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eval_sequence_norm_examples() {
        let w = WeightSpec::unweighted(fin(1.0), 1);
        assert_eq!(eval_sequence_norm(&[0.5], &w).unwrap(), 1.0);

        let w = WeightSpec::unweighted(fin(2.0), 1);
        let v = eval_sequence_norm(&[0.9], &w).unwrap();
        assert!((v - (1.0 / 0.19f64).sqrt()).abs() < 1e-14);
        assert_eq!(eval_sequence_norm(&[1.0], &w).unwrap(), f64::INFINITY);
        assert_eq!(eval_sequence_norm(&[-1.2], &w).unwrap(), f64::INFINITY);
    }

    #[test]
    fn continuity_boxes() {
        let w2 = WeightSpec::unweighted(fin(2.0), 2);
        assert!(is_evaluation_continuous(&[0.5, 0.5], &w2).unwrap());
        assert!(!is_evaluation_continuous(&[1.0, 0.0], &w2).unwrap());

        // p = 1: closed box |x| <= r
        let w1 = WeightSpec::new(fin(1.0), vec![4.0]).unwrap();
        assert!(is_evaluation_continuous(&[2.0], &w1).unwrap());
        assert!(is_evaluation_continuous(&[4.0], &w1).unwrap());
        assert!(!is_evaluation_continuous(&[5.0], &w1).unwrap());
        let w1 = WeightSpec::unweighted(fin(1.0), 1);
        assert!(is_evaluation_continuous(&[1.0], &w1).unwrap());
        assert!(is_evaluation_continuous(&[-1.0], &w1).unwrap());

        // p = inf: open box; at |x_i| = 1 the witness
        // (1/k)(1 + X + ... + X^k) has sup-norm 1/k but value (k+1)/k
        let winf = WeightSpec::unweighted(Exponent::Infinite, 2);
        assert!(is_evaluation_continuous(&[0.99, -0.5], &winf).unwrap());
        assert!(!is_evaluation_continuous(&[1.0, 0.0], &winf).unwrap());

        // 1 < p < inf weighted: |x| < r^(1/p)
        let w = WeightSpec::new(fin(2.0), vec![4.0]).unwrap();
        assert!(is_evaluation_continuous(&[1.99], &w).unwrap());
        assert!(!is_evaluation_continuous(&[2.0], &w).unwrap());
    }

    #[test]
    fn divergence_witness_at_the_unit_point() {
        let w = WeightSpec::unweighted(Exponent::Infinite, 1);
        for k in 1..=50u32 {
            let f = Polynomial::from_terms(1, (0..=k).map(|j| (MultiIndex::new(vec![j]), 1.0 / k as f64)))
                .unwrap();
            let norm = weighted_norm(&f, &w).unwrap();
            assert!((norm - 1.0 / k as f64).abs() < 1e-12);
            let v = f.eval(&[1.0]).unwrap();
            assert!((v - (k as f64 + 1.0) / k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn holder_examples() {
        let a = poly(1, &[(&[0], 1.0), (&[1], 1.0)]);
        let (l, r) = holder_product_norm(&a, &a, fin(2.0)).unwrap();
        assert!((l - 2.0).abs() < 1e-15 && (r - 2.0).abs() < 1e-15);
        let b = poly(1, &[(&[0], 1.0), (&[1], -1.0)]);
        let (l, r) = holder_product_norm(&a, &b, fin(2.0)).unwrap();
        assert!((l - 2.0).abs() < 1e-15 && (r - 2.0).abs() < 1e-15);
        assert!(holder_product_norm(&a, &poly(2, &[]), fin(2.0)).is_err());
    }

    fn arb_seq(n: usize) -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..=8, n), -10.0f64..10.0), 0..12).prop_map(
            move |t| {
                Polynomial::from_terms(
                    n,
                    t.into_iter()
                        .filter(|(e, _)| e.iter().sum::<u32>() <= 8)
                        .map(|(e, c)| (MultiIndex::new(e), c)),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn isometry_preserves_norm(
            s in arb_seq(2),
            r in prop::collection::vec(0.1f64..10.0, 2),
            p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]),
        ) {
            let w = WeightSpec::new(fin(p), r).unwrap();
            let t = scaling_isometry(&s, &w, Direction::Forward).unwrap();
            let lhs = weighted_norm(&t, &w).unwrap();
            let rhs = weighted_norm(&s, &WeightSpec::unweighted(fin(p), 2)).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
            let back = scaling_isometry(&t, &w, Direction::Inverse).unwrap();
            for (a, c) in s.terms() {
                prop_assert!((back.coef(a) - c).abs() <= 1e-12 * c.abs());
            }
        }

        #[test]
        fn unweighted_norms_decrease_in_p(s in arb_seq(3)) {
            let ps = [fin(1.0), fin(1.5), fin(2.0), fin(3.0), fin(7.0), Exponent::Infinite];
            let norms: Vec<f64> = ps
                .iter()
                .map(|p| weighted_norm(&s, &WeightSpec::unweighted(*p, 3)).unwrap())
                .collect();
            for pair in norms.windows(2) {
                prop_assert!(pair[1] <= pair[0] * (1.0 + 1e-12));
            }
        }

        #[test]
        fn holder_inequality(
            a in arb_seq(2),
            b in arb_seq(2),
            p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]),
        ) {
            let (l, r) = holder_product_norm(&a, &b, Exponent::new(p).unwrap()).unwrap();
            prop_assert!(r - l >= -1e-12 * r.max(1.0));
        }

        #[test]
        fn evaluation_bounded_by_dual_norm(
            f in arb_seq(2),
            x in prop::collection::vec(-1.9f64..1.9, 2),
            r in prop::collection::vec(0.5f64..4.0, 2),
            p in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY]),
        ) {
            let w = WeightSpec::new(Exponent::new(p).unwrap(), r).unwrap();
            if is_evaluation_continuous(&x, &w).unwrap() {
                let bound = weighted_norm(&f, &w).unwrap() * eval_sequence_norm(&x, &w).unwrap();
                let v = f.eval(&x).unwrap();
                prop_assert!(v.abs() <= bound * (1.0 + 1e-12) + 1e-12);
            }
        }

        #[test]
        fn closed_form_is_limit_of_partial_sums(
            x in prop::collection::vec(-0.8f64..0.8, 2),
            p in prop::sample::select(vec![1.5, 2.0, 3.0, f64::INFINITY]),
        ) {
            let w = WeightSpec::unweighted(Exponent::new(p).unwrap(), 2);
            let closed = eval_sequence_norm(&x, &w).unwrap();
            let mut degree = 16;
            let mut partial = truncated_eval_sequence_norm(&x, &w, degree).unwrap();
            while (closed - partial).abs() > 1e-6 * closed && degree < 512 {
                degree *= 2;
                partial = truncated_eval_sequence_norm(&x, &w, degree).unwrap();
            }
            prop_assert!((closed - partial).abs() <= 1e-6 * closed);
            prop_assert!(partial <= closed * (1.0 + 1e-12));
        }
    }

    #[test]
    fn scaling_identity_between_unit_and_weighted_norms() {
        // ||g - f(c X)||_p^p == ||g(X / c) - f||_{p,r}^p with c = r^(1/p)
        let f = poly(2, &[(&[0, 0], 1.0), (&[2, 0], -3.0), (&[1, 1], 0.5)]);
        let g = poly(2, &[(&[0, 0], 2.0), (&[4, 0], 1.0), (&[0, 2], -1.0)]);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let w = WeightSpec::new(fin(p), vec![4.0, 0.3]).unwrap();
            let c = w.box_radius();
            let inv: Vec<f64> = c.iter().map(|v| 1.0 / v).collect();
            let lhs = weighted_norm(
                &g.checked_sub(&f.axis_scale(&c).unwrap()).unwrap(),
                &WeightSpec::unweighted(fin(p), 2),
            )
            .unwrap()
            .powf(p);
            let rhs = weighted_norm(&g.axis_scale(&inv).unwrap().checked_sub(&f).unwrap(), &w)
                .unwrap()
                .powf(p);
            assert!((lhs - rhs).abs() <= 1e-10 * lhs, "p={p}: {lhs} vs {rhs}");
        }
    }
}
