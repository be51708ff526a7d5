use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Metric, MetricError, MetricScore};

const SIGNATURE: &str = "cosine+avg.sentence+scale.100";

/// Sentence id to embedding vector, all of one dimension.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<(), MetricError> {
        let id = id.into();
        if vector.len() != self.dim {
            return Err(MetricError::DimensionMismatch(self.dim, vector.len()));
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(MetricError::NonFinite(id));
        }
        self.vectors.insert(id, vector);
        Ok(())
    }

    /// Builds a table keyed by position ("0", "1", ...).
    pub fn from_vectors(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let mut t = EmbeddingTable::new(dim);
        for (i, v) in vectors.into_iter().enumerate() {
            t.insert(i.to_string(), v)?;
        }
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Parses the `d n` header followed by `id<TAB>f1<TAB>...<TAB>fd` lines.
    pub fn parse(text: &str, path: &Path) -> Result<Self, MetricError> {
        let bad = |line: usize, reason: String| MetricError::MalformedEmbeddings {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|f| f.parse().map_err(|_| bad(1, format!("bad header {header:?}"))))
            .collect::<Result<_, _>>()?;
        let [dim, n] = dims[..] else {
            return Err(bad(1, format!("expected \"d n\", got {header:?}")));
        };
        let mut table = EmbeddingTable::new(dim);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let mut fields = line.split('\t');
            let id = fields.next().unwrap_or_default();
            if id.is_empty() {
                return Err(bad(lineno, "missing id".into()));
            }
            let vector: Vec<f64> = fields
                .map(|f| f.trim().parse().map_err(|_| bad(lineno, format!("bad number {f:?}"))))
                .collect::<Result<_, _>>()?;
            if table.vectors.contains_key(id) {
                return Err(bad(lineno, format!("duplicate id {id:?}")));
            }
            table.insert(id, vector).map_err(|e| bad(lineno, e.to_string()))?;
        }
        if table.len() != n {
            return Err(bad(1, format!("header declares {n} vectors, found {}", table.len())));
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, MetricError> {
        let text = fs::read_to_string(path).map_err(|source| MetricError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn to_tsv(&self) -> String {
        let mut s = format!("{} {}\n", self.dim, self.len());
        for (id, v) in &self.vectors {
            s.push_str(id);
            for x in v {
                let _ = write!(s, "\t{x}");
            }
            s.push('\n');
        }
        s
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine of two equal-length vectors, in -1..1.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Some(dot / (na * nb))
}

/// Per-sentence cosines in id order.
pub fn sentence_cosines(
    a: &EmbeddingTable,
    b: &EmbeddingTable,
) -> Result<Vec<(String, f64)>, MetricError> {
    if a.dim != b.dim {
        return Err(MetricError::DimensionMismatch(a.dim, b.dim));
    }
    if let Some(id) = a
        .vectors
        .keys()
        .find(|k| !b.vectors.contains_key(*k))
        .or_else(|| b.vectors.keys().find(|k| !a.vectors.contains_key(*k)))
    {
        return Err(MetricError::IdMismatch(id.clone()));
    }
    a.vectors
        .iter()
        .map(|(id, va)| {
            let vb = &b.vectors[id];
            if norm(va) == 0.0 || norm(vb) == 0.0 {
                return Err(MetricError::ZeroNormVector(id.clone()));
            }
            Ok((id.clone(), cosine(va, vb).expect("checked")))
        })
        .collect()
}

/// Mean per-sentence cosine, scaled by 100.
pub fn cosine_batch(a: &EmbeddingTable, b: &EmbeddingTable) -> Result<MetricScore, MetricError> {
    let cos = sentence_cosines(a, b)?;
    if cos.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    let mean = cos.iter().map(|(_, c)| c).sum::<f64>() / cos.len() as f64;
    Ok(MetricScore {
        metric: Metric::Cosine,
        value: 100.0 * mean,
        signature: SIGNATURE.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_orthogonal() {
        let a = EmbeddingTable::from_vectors(2, vec![vec![1.0, 2.0], vec![3.0, -1.0]]).unwrap();
        assert!((cosine_batch(&a, &a).unwrap().value - 100.0).abs() < 1e-12);
        let x = EmbeddingTable::from_vectors(2, vec![vec![1.0, 0.0]]).unwrap();
        let y = EmbeddingTable::from_vectors(2, vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(cosine_batch(&x, &y).unwrap().value, 0.0);
    }

    #[test]
    fn errors() {
        let a = EmbeddingTable::from_vectors(2, vec![vec![1.0, 0.0]]).unwrap();
        let b = EmbeddingTable::from_vectors(3, vec![vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(cosine_batch(&a, &b), Err(MetricError::DimensionMismatch(2, 3))));
        let z = EmbeddingTable::from_vectors(2, vec![vec![0.0, 0.0]]).unwrap();
        assert!(matches!(cosine_batch(&a, &z), Err(MetricError::ZeroNormVector(_))));
        let mut c = EmbeddingTable::new(2);
        c.insert("other", vec![1.0, 1.0]).unwrap();
        assert!(matches!(cosine_batch(&a, &c), Err(MetricError::IdMismatch(_))));
        assert!(EmbeddingTable::new(1).insert("x", vec![f64::NAN]).is_err());
    }

    #[test]
    fn file_round_trip() {
        let a = EmbeddingTable::from_vectors(3, vec![vec![0.1, -2.5, 3e-7], vec![1.0, 2.0, 3.0]]).unwrap();
        let text = a.to_tsv();
        assert!(text.starts_with("3 2\n"));
        assert_eq!(EmbeddingTable::parse(&text, Path::new("e")).unwrap(), a);
        assert!(EmbeddingTable::parse("2 2\n0\t1\t2\n", Path::new("e")).is_err());
        assert!(EmbeddingTable::parse("2 1\n0\t1\n", Path::new("e")).is_err());
    }
}
