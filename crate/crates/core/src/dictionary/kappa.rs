use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub n: usize,
    pub po: f64,
    pub pe: f64,
    pub kappa: f64,
    pub interpretation: &'static str,
}

/// Agreement band for a kappa value, judged on the value rounded to two
/// decimals so that table boundaries such as 0.20 and 0.21 are exact.
pub fn interpret_kappa(kappa: f64) -> &'static str {
    let hundredths = (kappa * 100.0).round() as i64;
    match hundredths {
        i64::MIN..=-1 => "Less than chance agreement",
        0..=20 => "Slight agreement",
        21..=40 => "Fair agreement",
        41..=60 => "Moderate agreement",
        61..=80 => "Substantial agreement",
        _ => "Perfect agreement",
    }
}

/// Cohen's kappa for two raters over the same items.
///
/// Counts are kept as integers so that `kappa = (n·agree − Σ) / (n² − Σ)`,
/// with `Σ = Σ_k a_k·b_k`, is a single division.
pub fn cohens_kappa<T: Eq + Hash>(labels_a: &[T], labels_b: &[T]) -> Result<AgreementReport> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::LengthMismatch(labels_a.len(), labels_b.len()));
    }
    if labels_a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = labels_a.len();
    let mut counts: HashMap<&T, (u128, u128)> = HashMap::new();
    let mut agree: u128 = 0;
    for (a, b) in labels_a.iter().zip(labels_b) {
        counts.entry(a).or_default().0 += 1;
        counts.entry(b).or_default().1 += 1;
        if a == b {
            agree += 1;
        }
    }
    let chance: u128 = counts.values().map(|(ca, cb)| ca * cb).sum();
    let nn = (n as u128) * (n as u128);
    let po = agree as f64 / n as f64;
    let pe = chance as f64 / nn as f64;
    let kappa = if chance == nn {
        1.0
    } else {
        let num = (n as u128 * agree) as i128 - chance as i128;
        num as f64 / (nn - chance) as f64
    };
    Ok(AgreementReport {
        n,
        po,
        pe,
        kappa,
        interpretation: interpret_kappa(kappa),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_perfect() {
        let r = cohens_kappa(&["a", "b", "c", "a"], &["a", "b", "c", "a"]).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert_eq!(r.interpretation, "Perfect agreement");
    }

    #[test]
    fn single_category_everywhere_is_perfect() {
        let r = cohens_kappa(&["x"; 5], &["x"; 5]).unwrap();
        assert_eq!((r.po, r.pe, r.kappa), (1.0, 1.0, 1.0));
    }

    #[test]
    fn four_item_example() {
        let r = cohens_kappa(&["x", "x", "y", "y"], &["x", "y", "y", "y"]).unwrap();
        assert_eq!(r.po, 0.75);
        assert_eq!(r.pe, 0.5);
        assert_eq!(r.kappa, 0.5);
        assert_eq!(r.interpretation, "Moderate agreement");
    }

    #[test]
    fn bands() {
        assert_eq!(interpret_kappa(0.67), "Substantial agreement");
        assert_eq!(interpret_kappa(0.20), "Slight agreement");
        assert_eq!(interpret_kappa(0.21), "Fair agreement");
        assert_eq!(interpret_kappa(0.80), "Substantial agreement");
        assert_eq!(interpret_kappa(0.81), "Perfect agreement");
        assert_eq!(interpret_kappa(-0.3), "Less than chance agreement");
    }

    #[test]
    fn errors() {
        assert!(matches!(
            cohens_kappa(&["a"], &["a", "b"]),
            Err(Error::LengthMismatch(1, 2))
        ));
        let empty: [&str; 0] = [];
        assert!(matches!(
            cohens_kappa(&empty, &empty),
            Err(Error::EmptyInput)
        ));
    }
}
