use super::vocab::{Genre, FINAL_NEG_TEMPLATES, FINAL_POS_TEMPLATES, GENRES, NEG_TEMPLATES, POS_TEMPLATES};
use super::world::SynthWorld;
use super::SynthConfig;
use crate::ids::{derive_seed, ItemId, RaterId};
use crate::protocol::{
    Polarity, PoolAssembler, PoolSource, ProtocolError, RecordLine, Session, Stage, ITEMS_PER_POLARITY,
};
use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

/// Table-1-style seen fraction of each pool, relative to the 27% overall rate.
fn seen_share(source: PoolSource) -> f64 {
    let f = match source {
        PoolSource::RandPop => 0.22,
        PoolSource::RandMidPop => 0.16,
        PoolSource::Ease => 0.46,
        PoolSource::Bm25Fusion => 0.24,
    };
    f / 0.27
}

fn fill(template: &str, genre: &Genre, rng: &mut ChaCha8Rng) -> String {
    let picks = index::sample(rng, genre.keywords.len(), 5);
    let mut out = template.replace("{g}", genre.name);
    for (slot, i) in picks.iter().enumerate() {
        out = out.replace(&format!("{{k{slot}}}"), genre.keywords[i]);
    }
    out
}

fn pick_items(world: &SynthWorld, g: usize, max_rank: u32, rng: &mut ChaCha8Rng) -> Vec<ItemId> {
    let pool = world.genre_items(g, max_rank);
    let weights: Vec<f64> = pool
        .iter()
        .map(|id| world.catalog.get(id).map(|e| e.rating_count as f64).unwrap_or(1.0))
        .collect();
    index::sample_weighted(rng, pool.len(), |i| weights[i], ITEMS_PER_POLARITY)
        .expect("genre has enough items")
        .into_iter()
        .map(|i| pool[i].clone())
        .collect()
}

/// Drives one synthetic rater through both phases of the protocol.
pub(crate) fn simulate_rater(
    world: &SynthWorld,
    assembler: &PoolAssembler,
    cfg: &SynthConfig,
    rater_id: RaterId,
) -> Result<RecordLine, ProtocolError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, rater_id.as_str()));
    let liked_g = rng.random_range(0..GENRES.len());
    let disliked_g = (liked_g + rng.random_range(1..GENRES.len())) % GENRES.len();
    let (lg, dg) = (&GENRES[liked_g], &GENRES[disliked_g]);

    let mut now = 1_700_000_000_000 + rng.random_range(0..86_400_000u64);
    let mut tick = |rng: &mut ChaCha8Rng, lo: u64, hi: u64| {
        now += rng.random_range(lo..hi);
        now
    };

    let mut s = Session::new(rater_id.clone());
    let text = fill(POS_TEMPLATES.choose(&mut rng).unwrap(), lg, &mut rng);
    s.submit_description(Polarity::Positive, Stage::Initial, &text, tick(&mut rng, 40_000, 200_000))?;
    let text = fill(NEG_TEMPLATES.choose(&mut rng).unwrap(), dg, &mut rng);
    s.submit_description(Polarity::Negative, Stage::Initial, &text, tick(&mut rng, 30_000, 150_000))?;
    let liked = pick_items(world, liked_g, 600, &mut rng);
    s.submit_items(Polarity::Positive, &liked, &world.catalog, tick(&mut rng, 60_000, 300_000))?;
    let disliked = pick_items(world, disliked_g, 1500, &mut rng);
    s.submit_items(Polarity::Negative, &disliked, &world.catalog, tick(&mut rng, 60_000, 300_000))?;
    let text = fill(FINAL_POS_TEMPLATES.choose(&mut rng).unwrap(), lg, &mut rng);
    s.submit_description(Polarity::Positive, Stage::Final, &text, tick(&mut rng, 30_000, 120_000))?;
    let text = fill(FINAL_NEG_TEMPLATES.choose(&mut rng).unwrap(), dg, &mut rng);
    s.submit_description(Polarity::Negative, Stage::Final, &text, tick(&mut rng, 30_000, 120_000))?;

    let pool_seed = derive_seed(cfg.seed, &format!("pool:{rater_id}"));
    let pool = s.assemble_pool(assembler, pool_seed, tick(&mut rng, 1_000, 3_000))?.clone();

    let noise = Normal::new(0.0, cfg.rating_noise).expect("noise sd is finite and non-negative");
    let p_seen = |src: PoolSource| (cfg.seen_rate * seen_share(src)).clamp(0.0, 1.0);
    let ratings = loop {
        let r: Vec<(bool, u8)> = pool
            .entries
            .iter()
            .map(|e| {
                let seen = rng.random_bool(p_seen(e.source));
                let g = world.genre_of(&e.item_id);
                let affinity = if g == Some(liked_g) {
                    1.0
                } else if g == Some(disliked_g) {
                    -0.8
                } else {
                    0.0
                };
                let latent = 2.8 + affinity + if seen { 1.3 } else { 0.0 } + noise.sample(&mut rng);
                (seen, latent.round().clamp(1.0, 5.0) as u8)
            })
            .collect();
        if r.windows(2).any(|w| w[0].1 != w[1].1) {
            break r;
        }
    };
    // Rate in display order, as a rater would.
    let order = pool.displayed();
    for e in order {
        let i = pool.entries.iter().position(|x| x.item_id == e.item_id).unwrap();
        let (seen, score) = ratings[i];
        s.submit_rating(&e.item_id, seen, score, tick(&mut rng, 3_000, 20_000))?;
    }
    let record = s.record().expect("pool exists");
    Ok(RecordLine {
        profile: s.profile().clone(),
        record,
    })
}

/// Simulates raters `{prefix}{0001..=n}` in parallel; output is sorted by id.
pub(crate) fn simulate_cohort(
    world: &SynthWorld,
    assembler: &PoolAssembler,
    cfg: &SynthConfig,
    prefix: &str,
    n: usize,
) -> Result<Vec<RecordLine>, ProtocolError> {
    (1..=n)
        .into_par_iter()
        .map(|i| simulate_rater(world, assembler, cfg, RaterId::new(format!("{prefix}{i:04}"))))
        .collect()
}
