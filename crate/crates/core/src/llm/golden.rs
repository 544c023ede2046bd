//! Fixed fixture for prompt snapshots. Changing anything here changes the
//! checked-in golden files.

use super::prompt::{build_prompt, PromptSpec, PromptVariant};
use super::LlmError;
use crate::data::ItemCatalog;
use crate::ids::{ItemId, RaterId};
use crate::protocol::RaterProfile;

/// Directory name of the current snapshot set.
pub const GOLDEN_VERSION: &str = "v1";

const TITLES: &[&str] = &[
    "The Grand Budapest Hotel (2014)",
    "Spirited Away (2001)",
    "Paddington 2 (2017)",
    "Amélie (2001)",
    "Hot Fuzz (2007)",
    "Saw (2004)",
    "Transformers: Age of Extinction (2014)",
    "The Human Centipede (2009)",
    "Cats (2019)",
    "Movie 43 (2013)",
    "Alien (1979)",
    "Arrival (2016)",
    "Blade Runner (1982)",
    "Gattaca (1997)",
    "Moon (2009)",
    "Heat (1995)",
    "Se7en (1995)",
    "Zodiac (2007)",
    "Prisoners (2013)",
    "Fargo (1996)",
    "Up (2009)",
    "Coco (2017)",
    "Ratatouille (2007)",
    "Wall-E (2008)",
    "Inside Out (2015)",
    "Knives Out (2019)",
];

pub fn golden_catalog() -> ItemCatalog {
    let rows = TITLES
        .iter()
        .enumerate()
        .map(|(i, t)| (ItemId::new(format!("g{i:02}")), t.to_string(), 1000 - i as u64));
    ItemCatalog::from_rows(rows).expect("fixture ids are unique")
}

fn ids(range: std::ops::Range<usize>) -> Vec<ItemId> {
    range.map(|i| ItemId::new(format!("g{i:02}"))).collect()
}

fn profile(id: &str, pos: &str, neg: &str, liked: Vec<ItemId>, disliked: Vec<ItemId>) -> RaterProfile {
    let mut p = RaterProfile::new(RaterId::new(id));
    p.desc_pos = pos.to_string();
    p.desc_neg = neg.to_string();
    p.final_desc_pos = format!("{pos} Still true after choosing examples.");
    p.final_desc_neg = format!("{neg} Still true after choosing examples.");
    p.liked_items = liked;
    p.disliked_items = disliked;
    p
}

pub fn golden_target() -> RaterProfile {
    profile(
        "target",
        "I like whimsical, warm-hearted films with a strong visual style,   quirky characters and\n\
         a gentle sense of humour; animation is welcome, and I enjoy stories where kindness wins",
        "I dislike gratuitous gore, shallow effects-driven blockbusters and crude comedies that rely on shock value \
         instead of wit, warmth or real characters I care about!",
        ids(0..5),
        ids(5..10),
    )
}

pub fn golden_exemplars() -> Vec<RaterProfile> {
    vec![
        profile(
            "ex1",
            "Thoughtful science fiction that takes its ideas seriously: slow burns, lonely protagonists and \
             big questions about memory, identity and what it means to be human. Those stay with me.",
            "Not a fan of loud franchise sequels, romantic comedies by formula, or horror that is only jump scares \
             with nothing underneath them. I rarely manage to sit through those to the end.",
            ids(10..15),
            ids(5..10),
        ),
        profile(
            "ex2",
            "Tense crime dramas and procedurals, ideally with a meticulous investigation, moral grey areas and a \
             city that feels like a character of its own. Those stay with me.",
            "I avoid slapstick, musicals and anything aimed mainly at children; I also get bored by superhero \
             films with interchangeable plots. I rarely manage to sit through those to the end.",
            ids(15..20),
            ids(20..25),
        ),
        profile(
            "ex3",
            "Animated features with heart: wonderful worlds, clever humour that works for adults too, and \
             endings that leave me a little teary. Those stay with me.",
            "I dislike bleak, nihilistic thrillers and torture-heavy horror; long, joyless war films are also not \
             for me at all, honestly. I rarely manage to sit through those to the end.",
            ids(20..25),
            ids(5..10),
        ),
    ]
}

/// The candidate scored in every snapshot.
pub fn golden_target_item() -> ItemId {
    ItemId::new("g25")
}

pub fn golden_prompt(variant: PromptVariant) -> Result<PromptSpec, LlmError> {
    let k = variant.exemplars_needed();
    let ex = golden_exemplars();
    build_prompt(
        variant,
        &golden_target(),
        &ex[..k.min(ex.len())],
        &golden_target_item(),
        &golden_catalog(),
    )
}

/// Snapshot file body: the prefix, a line holding only `<<<SUFFIX>>>`, then
/// the suffix. No trailing newline.
pub fn render_golden(spec: &PromptSpec) -> String {
    format!("{}\n<<<SUFFIX>>>\n{}", spec.prefix, spec.suffix)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_profiles_are_complete() {
        golden_target().validate().unwrap();
        for e in golden_exemplars() {
            e.validate().unwrap();
        }
    }
}
