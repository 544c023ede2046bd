use super::EvalError;

/// A Phase-2 rating in `1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rating(u8);

impl Rating {
    pub fn new(s: u8) -> Result<Self, EvalError> {
        if (1..=5).contains(&s) {
            Ok(Rating(s))
        } else {
            Err(EvalError::RatingOutOfRange(s))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// 0 below 3, otherwise `2^(s-3)`.
    pub fn gain(self) -> f64 {
        match self.0 {
            0..=2 => 0.0,
            s => f64::from(1u32 << (s - 3)),
        }
    }
}

impl TryFrom<u8> for Rating {
    type Error = EvalError;

    fn try_from(s: u8) -> Result<Self, Self::Error> {
        Rating::new(s)
    }
}

pub fn gain(s: u8) -> Result<f64, EvalError> {
    Rating::new(s).map(Rating::gain)
}

/// `Σ_{p=1..min(k,n)} gain(s_p) / log2(p + 1)`.
pub fn dcg_at_k(ranked: &[Rating], k: usize) -> f64 {
    ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, r)| r.gain() / ((i + 2) as f64).log2())
        .sum()
}

/// NDCG@k of `ranked` against its own gain-descending ideal ordering.
/// Zero when no item has positive gain (including the empty list).
pub fn ndcg_at_k(ranked: &[Rating], k: usize) -> f64 {
    let mut ideal = ranked.to_vec();
    ideal.sort_by(|a, b| b.cmp(a));
    let idcg = dcg_at_k(&ideal, k);
    if idcg == 0.0 {
        return 0.0;
    }
    dcg_at_k(ranked, k) / idcg
}
