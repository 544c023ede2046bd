//! Seeded, genre-planted synthetic study data.
//!
//! Every item belongs to one of six genres whose keywords appear in its title
//! and reviews. Training users favour one genre; synthetic raters like one
//! genre, dislike another, describe both with templated text, and go through
//! the real session state machine, including pool assembly. Ratings follow a
//! simple model: genre affinity plus a bonus for seen items plus Gaussian
//! noise, with per-pool seen probabilities shaped like the published pool
//! statistics (RandPop 22%, RandMidPop 16%, EASE 46%, BM25 24%; 27% overall).

mod cohort;
mod vocab;
mod world;

pub use world::{generate_world, SynthWorld};

use crate::data::{InteractionMatrix, ReviewCorpus};
use crate::protocol::{write_records, PoolAssembler, PoolConfig, ProtocolError, RecordLine};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_raters: usize,
    /// Held-out raters whose profiles serve as few-shot exemplars.
    pub n_exemplars: usize,
    pub n_items: usize,
    pub n_train_users: usize,
    /// Training interactions only touch the most popular `n_train_items`.
    pub n_train_items: usize,
    /// Only the most popular `n_reviewed_items` get reviews.
    pub n_reviewed_items: usize,
    /// Overall probability that a pool item is marked seen.
    pub seen_rate: f64,
    pub rating_noise: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_raters: 153,
            n_exemplars: 3,
            n_items: 6000,
            n_train_users: 1500,
            n_train_items: 1500,
            n_reviewed_items: 3000,
            seen_rate: 0.27,
            rating_noise: 0.6,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("n_raters must be at least 1")]
    NoRaters,
    #[error("invalid synthetic configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub struct Synthetic {
    pub world: SynthWorld,
    pub records: Vec<RecordLine>,
    pub exemplars: Vec<RecordLine>,
}

impl SynthConfig {
    fn validate(&self) -> Result<(), SynthError> {
        if self.n_raters == 0 {
            return Err(SynthError::NoRaters);
        }
        if self.n_items < 5000 {
            return Err(SynthError::Config("n_items must cover the 1..5000 pool bands".into()));
        }
        if self.n_train_items > self.n_items || self.n_reviewed_items > self.n_items {
            return Err(SynthError::Config("trained/reviewed item counts exceed n_items".into()));
        }
        if !(0.0..=1.0).contains(&self.seen_rate) || self.rating_noise.is_nan() || self.rating_noise < 0.0 {
            return Err(SynthError::Config("seen_rate must be in [0, 1] and rating_noise ≥ 0".into()));
        }
        Ok(())
    }
}

/// Pool assembler fitted on a world's interactions and reviews.
pub fn world_assembler(world: &SynthWorld, config: PoolConfig) -> Result<PoolAssembler, SynthError> {
    let x = InteractionMatrix::from_interactions(world.interactions.iter().cloned());
    let corpus = ReviewCorpus::new(world.reviews.clone()).map_err(|e| SynthError::Config(e.to_string()))?;
    let catalog = Arc::new(world.catalog.clone());
    Ok(PoolAssembler::new(catalog, &x, &corpus, config).map_err(ProtocolError::from)?)
}

/// Raters are `r0001..`, exemplars `x0001..`. Records always pass the export
/// filter: ratings are resampled until they are not all identical.
pub fn synthesize(cfg: &SynthConfig) -> Result<Synthetic, SynthError> {
    cfg.validate()?;
    let world = generate_world(cfg);
    let assembler = world_assembler(&world, PoolConfig::default())?;
    let records = cohort::simulate_cohort(&world, &assembler, cfg, "r", cfg.n_raters)?;
    let exemplars = cohort::simulate_cohort(&world, &assembler, cfg, "x", cfg.n_exemplars)?;
    Ok(Synthetic {
        world,
        records,
        exemplars,
    })
}

/// Paths written by [`Synthetic::write`].
#[derive(Clone, Debug)]
pub struct SynthPaths {
    pub catalog: PathBuf,
    pub interactions: PathBuf,
    pub reviews: PathBuf,
    pub genres: PathBuf,
    pub records: PathBuf,
    pub exemplars: PathBuf,
}

impl SynthPaths {
    pub fn in_dir(dir: &Path) -> Self {
        SynthPaths {
            catalog: dir.join("catalog.csv"),
            interactions: dir.join("interactions.csv"),
            reviews: dir.join("reviews.jsonl"),
            genres: dir.join("genres.tsv"),
            records: dir.join("records.jsonl"),
            exemplars: dir.join("exemplars.jsonl"),
        }
    }
}

impl Synthetic {
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<SynthPaths, SynthError> {
        let dir = dir.as_ref();
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source: std::io::Error| SynthError::Io {
                path: path.clone(),
                source,
            }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let paths = SynthPaths::in_dir(dir);
        let csv_io = |path: &Path| {
            let f = io(path);
            move |e: csv::Error| f(e.into())
        };

        let mut w = csv::Writer::from_path(&paths.catalog).map_err(csv_io(&paths.catalog))?;
        w.write_record(["item_id", "title", "rating_count"])
            .map_err(csv_io(&paths.catalog))?;
        for e in self.world.catalog.entries() {
            w.write_record([e.item_id.as_str(), &e.title, &e.rating_count.to_string()])
                .map_err(csv_io(&paths.catalog))?;
        }
        w.flush().map_err(io(&paths.catalog))?;

        let mut w = csv::Writer::from_path(&paths.interactions).map_err(csv_io(&paths.interactions))?;
        w.write_record(["user_id", "item_id", "rating", "timestamp"])
            .map_err(csv_io(&paths.interactions))?;
        for i in &self.world.interactions {
            let rating = i.rating.map(|r| r.to_string()).unwrap_or_default();
            let ts = i.timestamp.map(|t| t.to_string()).unwrap_or_default();
            w.write_record([i.user_id.as_str(), i.item_id.as_str(), &rating, &ts])
                .map_err(csv_io(&paths.interactions))?;
        }
        w.flush().map_err(io(&paths.interactions))?;

        let mut buf = Vec::new();
        for r in &self.world.reviews {
            serde_json::to_writer(&mut buf, r).expect("reviews serialize");
            buf.push(b'\n');
        }
        std::fs::write(&paths.reviews, buf).map_err(io(&paths.reviews))?;

        let mut f = std::io::BufWriter::new(std::fs::File::create(&paths.genres).map_err(io(&paths.genres))?);
        writeln!(f, "item_id\tgenres").map_err(io(&paths.genres))?;
        for (id, genres) in self.world.genre_map() {
            writeln!(f, "{id}\t{}", genres.join("|")).map_err(io(&paths.genres))?;
        }
        f.flush().map_err(io(&paths.genres))?;

        write_records(&paths.records, &self.records)?;
        write_records(&paths.exemplars, &self.exemplars)?;
        Ok(paths)
    }
}
