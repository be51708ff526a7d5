use std::collections::BTreeSet;

use super::rng::SeededRng;
use super::SamplingError;
use crate::corpus::{LanguageCode, LanguagePair};

/// Languages of `languages` that no pair in `pairs` touches.
pub fn uncovered_languages(languages: &[LanguageCode], pairs: &[LanguagePair]) -> Vec<LanguageCode> {
    let covered: BTreeSet<LanguageCode> = pairs
        .iter()
        .flat_map(|p| [p.first(), p.second()])
        .collect();
    let wanted: BTreeSet<LanguageCode> = languages.iter().copied().collect();
    wanted.difference(&covered).copied().collect()
}

pub fn spans_all(languages: &[LanguageCode], pairs: &[LanguagePair]) -> bool {
    uncovered_languages(languages, pairs).is_empty()
}

pub fn validate_spanning(
    languages: &[LanguageCode],
    pairs: &[LanguagePair],
) -> Result<(), SamplingError> {
    let missing = uncovered_languages(languages, pairs);
    if missing.is_empty() {
        Ok(())
    } else {
        Err(SamplingError::NotSpanning(missing))
    }
}

/// Picks `n_pairs` distinct unordered pairs covering every language.
///
/// A seeded permutation of the languages is paired off greedily (an odd
/// language out is joined to a random partner), then the remaining quota is
/// filled uniformly from the unused pairs. The result is sorted.
pub fn select_spanning_pairs(
    languages: &[LanguageCode],
    n_pairs: usize,
    seed: u64,
) -> Result<Vec<LanguagePair>, SamplingError> {
    let unique: BTreeSet<LanguageCode> = languages.iter().copied().collect();
    let mut order: Vec<LanguageCode> = unique.into_iter().collect();
    let n = order.len();
    let min_pairs = n.div_ceil(2);
    let max_pairs = n * n.saturating_sub(1) / 2;
    if n < 2 || n_pairs < min_pairs || n_pairs > max_pairs {
        return Err(SamplingError::InfeasibleSpan {
            languages: n,
            requested: n_pairs,
        });
    }

    let mut rng = SeededRng::new(seed);
    rng.shuffle(&mut order);
    let mut chosen: BTreeSet<LanguagePair> = order
        .chunks_exact(2)
        .map(|c| LanguagePair::new(c[0], c[1]).expect("distinct"))
        .collect();
    if n % 2 == 1 {
        let last = order[n - 1];
        let partner = order[rng.below(n as u64 - 1) as usize];
        chosen.insert(LanguagePair::new(last, partner).expect("distinct"));
    }

    let mut rest: Vec<LanguagePair> = Vec::new();
    let mut sorted = order.clone();
    sorted.sort();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            let pair = LanguagePair::new(*a, *b).expect("distinct");
            if !chosen.contains(&pair) {
                rest.push(pair);
            }
        }
    }
    rng.shuffle(&mut rest);
    let fill = n_pairs - chosen.len();
    chosen.extend(rest.into_iter().take(fill));
    Ok(chosen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn langs(codes: &str) -> Vec<LanguageCode> {
        codes.split(' ').map(|c| c.parse().unwrap()).collect()
    }

    #[test]
    fn two_languages_one_pair() {
        let pairs = select_spanning_pairs(&langs("bn hi"), 1, 5).unwrap();
        assert_eq!(pairs, ["bn-hi".parse().unwrap()]);
    }

    #[test]
    fn too_few_pairs_is_infeasible() {
        let indic = langs("bn gu hi kn ml mr or pa ta te");
        assert!(matches!(
            select_spanning_pairs(&indic, 4, 0),
            Err(SamplingError::InfeasibleSpan { languages: 10, requested: 4 })
        ));
        assert!(select_spanning_pairs(&indic, 5, 0).is_ok());
        assert!(select_spanning_pairs(&indic, 46, 0).is_err());
        assert_eq!(select_spanning_pairs(&indic, 45, 0).unwrap().len(), 45);
    }

    #[test]
    fn odd_language_count_is_covered() {
        let odd = langs("bn gu hi kn ml");
        for seed in 0..200 {
            let pairs = select_spanning_pairs(&odd, 3, seed).unwrap();
            assert_eq!(pairs.len(), 3);
            assert!(spans_all(&odd, &pairs));
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let indic = langs("bn gu hi kn ml mr or pa ta te");
        assert_eq!(
            select_spanning_pairs(&indic, 11, 9).unwrap(),
            select_spanning_pairs(&indic, 11, 9).unwrap()
        );
    }

    #[test]
    fn validator_reports_missing() {
        let pairs: Vec<LanguagePair> = vec!["bn-hi".parse().unwrap()];
        assert!(matches!(
            validate_spanning(&langs("bn hi ta"), &pairs),
            Err(SamplingError::NotSpanning(missing)) if missing == langs("ta")
        ));
    }
}
