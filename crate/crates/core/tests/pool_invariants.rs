mod support;

use langrec_core::ids::ItemId;
use langrec_core::protocol::{PoolAssembler, PoolConfig, PoolError, PoolSource, RaterProfile, SamplePool};
use langrec_core::synth::{generate_world, world_assembler, SynthWorld};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::sync::OnceLock;

fn fixture() -> &'static (SynthWorld, PoolAssembler) {
    static F: OnceLock<(SynthWorld, PoolAssembler)> = OnceLock::new();
    F.get_or_init(|| {
        let world = generate_world(&support::pool_world_config());
        let asm = world_assembler(&world, PoolConfig::default()).unwrap();
        (world, asm)
    })
}

fn taken_before(pool: &SamplePool, profile: &RaterProfile, upto: PoolSource) -> HashSet<ItemId> {
    let mut s: HashSet<ItemId> = profile.elicited_items().cloned().collect();
    for e in &pool.entries {
        if e.source < upto {
            s.insert(e.item_id.clone());
        }
    }
    s
}

/// The pool's picks must be a valid top-10 of the exhaustive ranking with
/// earlier draws removed.
fn check_top10(pool: &SamplePool, profile: &RaterProfile, source: PoolSource, scored: &[(ItemId, f64)]) {
    let taken = taken_before(pool, profile, source);
    let mut eligible: Vec<(ItemId, f64)> = scored.iter().filter(|(i, _)| !taken.contains(i)).cloned().collect();
    eligible.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let want: Vec<&ItemId> = eligible.iter().take(10).map(|(i, _)| i).collect();
    let got: Vec<&ItemId> = pool.entries.iter().filter(|e| e.source == source).map(|e| &e.item_id).collect();
    assert_eq!(got, want, "{source:?} for {}", profile.rater_id);
}

#[test]
fn thousand_seeds_satisfy_invariants() {
    let (world, asm) = fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut collisions = 0usize;
    for i in 0..1000 {
        let profile = support::random_profile(&mut rng, world, i);
        let seed = rng.random::<u64>();
        let pool = asm.assemble(&profile, seed).unwrap();
        support::check_pool(&pool, &profile, &world.catalog).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(asm.assemble(&profile, seed).unwrap(), pool, "not deterministic");

        if i % 10 == 0 {
            // exhaustive EASE scores: sum of weight rows of liked items
            let ease = asm.ease();
            let liked: Vec<usize> = ease
                .items()
                .iter()
                .enumerate()
                .filter(|(_, id)| profile.liked_items.contains(id))
                .map(|(r, _)| r)
                .collect();
            let scored: Vec<(ItemId, f64)> = ease
                .items()
                .iter()
                .enumerate()
                .map(|(c, id)| (id.clone(), liked.iter().map(|&r| ease.weight(r, c)).sum()))
                .collect();
            check_top10(&pool, &profile, PoolSource::Ease, &scored);

            let idx = asm.index();
            let per_doc = idx.score_all(&profile.desc_pos);
            let scored: Vec<(ItemId, f64)> = world
                .catalog
                .entries()
                .iter()
                .map(|e| {
                    let best = idx.docs_of(&e.item_id).iter().map(|&d| per_doc[d as usize]).fold(f64::NEG_INFINITY, f64::max);
                    (e.item_id.clone(), best)
                })
                .collect();
            check_top10(&pool, &profile, PoolSource::Bm25Fusion, &scored);
        }

        // a model pool collided if its unfiltered top-10 hit an earlier draw
        let ease_top = {
            let cands = asm.ease().items().to_vec();
            let mut s = asm.ease().score(&profile.liked_items, &cands);
            s.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            s.truncate(10);
            s
        };
        let taken = taken_before(&pool, &profile, PoolSource::Ease);
        if ease_top.iter().any(|(id, _)| taken.contains(id)) {
            collisions += 1;
        }
    }
    assert!(collisions > 0, "fixture never exercised collision skipping");
}

#[test]
fn seeds_change_random_pools_only() {
    let (world, asm) = fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let profile = support::random_profile(&mut rng, world, 1);
    let a = asm.assemble(&profile, 1).unwrap();
    let b = asm.assemble(&profile, 2).unwrap();
    assert_ne!(a, b);
    let random = |p: &SamplePool| -> Vec<ItemId> {
        p.entries.iter().filter(|e| e.source.is_random()).map(|e| e.item_id.clone()).collect()
    };
    assert_ne!(random(&a), random(&b));
}

#[test]
fn incomplete_profile_is_rejected() {
    let (world, asm) = fixture();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut profile = support::random_profile(&mut rng, world, 0);
    profile.desc_neg.truncate(149);
    assert!(matches!(asm.assemble(&profile, 0), Err(PoolError::IncompleteProfile(_))));
}
