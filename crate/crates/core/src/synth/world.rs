use super::vocab::{ADJECTIVES, FILLER, GENRES, NOUNS, REVIEW_OPENERS};
use super::SynthConfig;
use crate::data::{Interaction, ItemCatalog, Review};
use crate::ids::ItemId;
use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashSet};

/// Catalog, training interactions and reviews with one planted genre per item.
#[derive(Clone, Debug)]
pub struct SynthWorld {
    pub catalog: ItemCatalog,
    pub interactions: Vec<Interaction>,
    pub reviews: Vec<Review>,
    /// Genre index of every item.
    pub item_genre: BTreeMap<ItemId, usize>,
}

impl SynthWorld {
    pub fn genre_of(&self, item: &ItemId) -> Option<usize> {
        self.item_genre.get(item).copied()
    }

    /// Planted genre names, in the form the mock backend consumes.
    pub fn genre_map(&self) -> BTreeMap<ItemId, Vec<String>> {
        self.item_genre
            .iter()
            .map(|(id, &g)| (id.clone(), vec![GENRES[g].name.to_string()]))
            .collect()
    }

    /// Items of genre `g` up to popularity rank `max_rank`, most popular first.
    pub(crate) fn genre_items(&self, g: usize, max_rank: u32) -> Vec<&ItemId> {
        self.catalog
            .rank_band(1, max_rank)
            .iter()
            .filter(|e| self.item_genre[&e.item_id] == g)
            .map(|e| &e.item_id)
            .collect()
    }
}

pub fn generate_world(cfg: &SynthConfig) -> SynthWorld {
    let mut rng = ChaCha8Rng::seed_from_u64(crate::ids::derive_seed(cfg.seed, "world"));
    let n = cfg.n_items;

    // Ids are a random permutation of popularity order, so that id tie-breaks
    // carry no popularity signal.
    let mut id_numbers: Vec<usize> = (0..n).collect();
    id_numbers.shuffle(&mut rng);

    let mut titles = HashSet::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    let mut item_genre = BTreeMap::new();
    for (pos, &num) in id_numbers.iter().enumerate() {
        let id = ItemId::new(format!("m{num:05}"));
        let g = rng.random_range(0..GENRES.len());
        let title = loop {
            let t = format!(
                "{} {} {} ({})",
                ADJECTIVES.choose(&mut rng).unwrap(),
                capitalize(GENRES[g].keywords.choose(&mut rng).unwrap()),
                NOUNS.choose(&mut rng).unwrap(),
                rng.random_range(1950..2020),
            );
            if titles.insert(t.clone()) {
                break t;
            }
        };
        let count = (200_000.0 / (pos as f64 + 10.0).powf(0.9)).round() as u64 + 1;
        item_genre.insert(id.clone(), g);
        rows.push((id, title, count));
    }
    let catalog = ItemCatalog::from_rows(rows).expect("generated ids are unique");

    let trained: Vec<&ItemId> = catalog
        .rank_band(1, cfg.n_train_items as u32)
        .iter()
        .map(|e| &e.item_id)
        .collect();
    let counts: Vec<f64> = catalog
        .rank_band(1, cfg.n_train_items as u32)
        .iter()
        .map(|e| e.rating_count as f64)
        .collect();
    let mut interactions = Vec::new();
    for u in 0..cfg.n_train_users {
        let g = rng.random_range(0..GENRES.len());
        let amount = rng.random_range(15..=60).min(trained.len());
        let picks = index::sample_weighted(
            &mut rng,
            trained.len(),
            |i| counts[i] * if item_genre[trained[i]] == g { 12.0 } else { 1.0 },
            amount,
        )
        .expect("weights are positive");
        let mut picks = picks.into_vec();
        picks.sort_unstable();
        for i in picks {
            let liked = item_genre[trained[i]] == g;
            let rating = if liked {
                rng.random_range(4..=5)
            } else {
                rng.random_range(2..=4)
            };
            interactions.push(Interaction {
                user_id: format!("u{u:05}"),
                item_id: trained[i].clone(),
                rating: Some(rating as f32),
                timestamp: Some(1_000_000_000 + rng.random_range(0..500_000_000)),
            });
        }
    }

    let mut reviews = Vec::new();
    for e in catalog.rank_band(1, cfg.n_reviewed_items as u32) {
        let g = item_genre[&e.item_id];
        let n_reviews = rng.random_range(1..=3);
        for r in 0..n_reviews {
            let mut words: Vec<&str> = Vec::new();
            words.push(REVIEW_OPENERS.choose(&mut rng).unwrap());
            words.push(GENRES[g].name);
            for _ in 0..rng.random_range(2..=4) {
                words.push(GENRES[g].keywords.choose(&mut rng).unwrap());
            }
            for _ in 0..rng.random_range(4..=10) {
                words.push(FILLER.choose(&mut rng).unwrap());
            }
            if rng.random_bool(0.3) {
                let other = &GENRES[rng.random_range(0..GENRES.len())];
                words.push(other.keywords.choose(&mut rng).unwrap());
            }
            words[1..].shuffle(&mut rng);
            reviews.push(Review {
                review_id: format!("{}-r{r}", e.item_id),
                item_id: e.item_id.clone(),
                text: words.join(" ") + ".",
            });
        }
    }

    SynthWorld {
        catalog,
        interactions,
        reviews,
        item_genre,
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}
