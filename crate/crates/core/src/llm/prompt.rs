//! Prompt templates. Every prompt is a prefix plus a suffix; the suffix is the
//! candidate's catalog title and is what the backend scores.
//!
//! Whitespace contract (the golden files pin these bytes):
//! - item lists are joined with ", ";
//! - zero-shot sentences end with "." and are joined by a single space;
//! - few-shot lines and blocks are joined by a single "\n";
//! - descriptions have internal whitespace runs collapsed to one space, and a
//!   description used as a sentence gets a trailing "." unless it already
//!   ends in ".", "!" or "?".

use super::LlmError;
use crate::data::ItemCatalog;
use crate::ids::{ItemId, RaterId};
use crate::protocol::{Polarity, RaterProfile, ITEMS_PER_POLARITY};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

const LIKE_ITEMS: &str = "I like the following movies:";
const DISLIKE_ITEMS: &str = "I dislike the following movies:";
const LIKE_LANG: &str = "I describe the movies I like as follows:";
const DISLIKE_LANG: &str = "I describe the movies I dislike as follows:";
const THEN: &str = "Then I would also like";
const FS_DESC: &str = "User Description:";
const FS_ITEMS: &str = "User Movie Preferences:";
const FS_NEXT: &str = "Additional User Movie Preference:";

/// Preference signal the prompt exposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptSource {
    Items,
    Language,
    ItemsLanguage,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptStyle {
    Completion,
    ZeroShot,
    /// Number of exemplar raters.
    FewShot(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PromptVariant {
    source: PromptSource,
    style: PromptStyle,
    negatives: bool,
}

impl PromptVariant {
    pub fn new(source: PromptSource, style: PromptStyle, negatives: bool) -> Result<Self, LlmError> {
        if negatives && style != PromptStyle::ZeroShot {
            return Err(LlmError::InvalidVariant(
                "negative preferences are only defined for zero-shot prompts".into(),
            ));
        }
        if style == PromptStyle::FewShot(0) {
            return Err(LlmError::InvalidVariant("few-shot needs at least one exemplar".into()));
        }
        Ok(PromptVariant {
            source,
            style,
            negatives,
        })
    }

    pub fn source(self) -> PromptSource {
        self.source
    }

    pub fn style(self) -> PromptStyle {
        self.style
    }

    pub fn negatives(self) -> bool {
        self.negatives
    }

    pub fn exemplars_needed(self) -> usize {
        match self.style {
            PromptStyle::FewShot(k) => k,
            _ => 0,
        }
    }

    /// The twelve evaluated variants: three sources by three styles, plus the
    /// zero-shot Pos+Neg form of each source.
    pub fn all(few_shot_k: usize) -> Vec<PromptVariant> {
        let sources = [PromptSource::Items, PromptSource::Language, PromptSource::ItemsLanguage];
        let mut out = Vec::with_capacity(12);
        for source in sources {
            for style in [PromptStyle::Completion, PromptStyle::ZeroShot, PromptStyle::FewShot(few_shot_k)] {
                out.push(PromptVariant {
                    source,
                    style,
                    negatives: false,
                });
            }
        }
        for source in sources {
            out.push(PromptVariant {
                source,
                style: PromptStyle::ZeroShot,
                negatives: true,
            });
        }
        out
    }

    /// Human-readable row label, e.g. "LLM Item+Language Few-shot (3)".
    pub fn label(self) -> String {
        let source = match self.source {
            PromptSource::Items => "Item",
            PromptSource::Language => "Language",
            PromptSource::ItemsLanguage => "Item+Language",
        };
        let style = match self.style {
            PromptStyle::Completion => "Completion".to_string(),
            PromptStyle::ZeroShot => "Zero-shot".to_string(),
            PromptStyle::FewShot(k) => format!("Few-shot ({k})"),
        };
        let neg = if self.negatives { " Pos+Neg" } else { "" };
        format!("LLM {source} {style}{neg}")
    }
}

/// Slug form, e.g. `items-zero-shot-pos-neg` or `language-few-shot-3`.
impl fmt::Display for PromptVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let source = match self.source {
            PromptSource::Items => "items",
            PromptSource::Language => "language",
            PromptSource::ItemsLanguage => "items-language",
        };
        match self.style {
            PromptStyle::Completion => write!(f, "{source}-completion")?,
            PromptStyle::ZeroShot => write!(f, "{source}-zero-shot")?,
            PromptStyle::FewShot(k) => write!(f, "{source}-few-shot-{k}")?,
        }
        if self.negatives {
            f.write_str("-pos-neg")?;
        }
        Ok(())
    }
}

impl FromStr for PromptVariant {
    type Err = LlmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LlmError::InvalidVariant(format!("unrecognised prompt variant {s:?}"));
        let (rest, negatives) = match s.strip_suffix("-pos-neg") {
            Some(r) => (r, true),
            None => (s, false),
        };
        let (source, rest) = if let Some(r) = rest.strip_prefix("items-language-") {
            (PromptSource::ItemsLanguage, r)
        } else if let Some(r) = rest.strip_prefix("items-") {
            (PromptSource::Items, r)
        } else if let Some(r) = rest.strip_prefix("language-") {
            (PromptSource::Language, r)
        } else {
            return Err(bad());
        };
        let style = match rest {
            "completion" => PromptStyle::Completion,
            "zero-shot" => PromptStyle::ZeroShot,
            _ => {
                let k = rest.strip_prefix("few-shot-").ok_or_else(bad)?;
                PromptStyle::FewShot(k.parse().map_err(|_| bad())?)
            }
        };
        PromptVariant::new(source, style, negatives)
    }
}

impl TryFrom<String> for PromptVariant {
    type Error = LlmError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PromptVariant> for String {
    fn from(v: PromptVariant) -> String {
        v.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub prefix: String,
    pub suffix: String,
    pub variant: PromptVariant,
    pub rater_id: RaterId,
    pub exemplar_ids: Vec<RaterId>,
}

fn collapse(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn as_sentence(text: &str) -> String {
    let t = collapse(text);
    if t.ends_with(['.', '!', '?']) {
        t
    } else {
        t + "."
    }
}

struct Fields<'a> {
    catalog: &'a ItemCatalog,
}

impl Fields<'_> {
    fn titles(&self, profile: &RaterProfile, polarity: Polarity) -> Result<Vec<String>, LlmError> {
        let items = profile.items(polarity);
        if items.len() != ITEMS_PER_POLARITY {
            let field = match polarity {
                Polarity::Positive => "liked_items",
                Polarity::Negative => "disliked_items",
            };
            return Err(LlmError::MissingField {
                rater: profile.rater_id.clone(),
                field,
            });
        }
        items
            .iter()
            .map(|id| {
                self.catalog
                    .title(id)
                    .map(str::to_string)
                    .ok_or_else(|| LlmError::UnknownItem(id.clone()))
            })
            .collect()
    }

    fn desc<'p>(&self, profile: &'p RaterProfile, polarity: Polarity) -> Result<&'p str, LlmError> {
        let (text, field) = match polarity {
            Polarity::Positive => (&profile.desc_pos, "desc_pos"),
            Polarity::Negative => (&profile.desc_neg, "desc_neg"),
        };
        if text.trim().is_empty() {
            return Err(LlmError::MissingField {
                rater: profile.rater_id.clone(),
                field,
            });
        }
        Ok(text)
    }
}

/// The prefix for a variant and target profile. It never depends on the
/// candidate, so callers build it once per rater.
pub fn build_prefix(
    variant: PromptVariant,
    target: &RaterProfile,
    exemplars: &[RaterProfile],
    catalog: &ItemCatalog,
) -> Result<String, LlmError> {
    let needed = variant.exemplars_needed();
    if exemplars.len() != needed {
        return Err(LlmError::ExemplarCount {
            expected: needed,
            got: exemplars.len(),
        });
    }
    for ex in exemplars {
        ex.validate().map_err(|reason| LlmError::IncompleteExemplar {
            rater: ex.rater_id.clone(),
            reason,
        })?;
    }
    let f = Fields { catalog };
    let pos = Polarity::Positive;
    let neg = Polarity::Negative;
    let prefix = match (variant.source, variant.style) {
        (PromptSource::Items, PromptStyle::Completion) => f.titles(target, pos)?.join(", ") + ",",
        (PromptSource::Language, PromptStyle::Completion) => collapse(f.desc(target, pos)?),
        (PromptSource::ItemsLanguage, PromptStyle::Completion) => {
            format!("{} {},", collapse(f.desc(target, pos)?), f.titles(target, pos)?.join(", "))
        }
        (source, PromptStyle::ZeroShot) => {
            let mut sentences = Vec::new();
            if matches!(source, PromptSource::Language | PromptSource::ItemsLanguage) {
                sentences.push(format!("{LIKE_LANG} {}", as_sentence(f.desc(target, pos)?)));
                if variant.negatives {
                    sentences.push(format!("{DISLIKE_LANG} {}", as_sentence(f.desc(target, neg)?)));
                }
            }
            if matches!(source, PromptSource::Items | PromptSource::ItemsLanguage) {
                sentences.push(format!("{LIKE_ITEMS} {}.", f.titles(target, pos)?.join(", ")));
                if variant.negatives {
                    sentences.push(format!("{DISLIKE_ITEMS} {}.", f.titles(target, neg)?.join(", ")));
                }
            }
            sentences.push(THEN.to_string());
            sentences.join(" ")
        }
        (source, PromptStyle::FewShot(_)) => {
            let mut lines = Vec::new();
            for ex in exemplars {
                let titles = f.titles(ex, pos)?;
                match source {
                    PromptSource::Items => {
                        lines.push(format!("{FS_ITEMS} {}", titles[..4].join(", ")));
                        lines.push(format!("{FS_NEXT} {}", titles[4]));
                    }
                    PromptSource::Language => {
                        lines.push(format!("{FS_DESC} {}", collapse(f.desc(ex, pos)?)));
                        lines.push(format!("{FS_ITEMS} {}", titles.join(", ")));
                    }
                    PromptSource::ItemsLanguage => {
                        lines.push(format!("{FS_DESC} {}", collapse(f.desc(ex, pos)?)));
                        lines.push(format!("{FS_ITEMS} {}", titles[..4].join(", ")));
                        lines.push(format!("{FS_NEXT} {}", titles[4]));
                    }
                }
            }
            match source {
                PromptSource::Items => {
                    lines.push(format!("{FS_ITEMS} {}", f.titles(target, pos)?.join(", ")));
                    lines.push(FS_NEXT.to_string());
                }
                PromptSource::Language => {
                    lines.push(format!("{FS_DESC} {}", collapse(f.desc(target, pos)?)));
                    lines.push(FS_ITEMS.to_string());
                }
                PromptSource::ItemsLanguage => {
                    lines.push(format!("{FS_DESC} {}", collapse(f.desc(target, pos)?)));
                    lines.push(format!("{FS_ITEMS} {}", f.titles(target, pos)?.join(", ")));
                    lines.push(FS_NEXT.to_string());
                }
            }
            lines.join("\n")
        }
    };
    Ok(prefix)
}

pub fn build_prompt(
    variant: PromptVariant,
    target: &RaterProfile,
    exemplars: &[RaterProfile],
    target_item: &ItemId,
    catalog: &ItemCatalog,
) -> Result<PromptSpec, LlmError> {
    let prefix = build_prefix(variant, target, exemplars, catalog)?;
    let suffix = catalog
        .title(target_item)
        .ok_or_else(|| LlmError::UnknownItem(target_item.clone()))?
        .to_string();
    Ok(PromptSpec {
        prefix,
        suffix,
        variant,
        rater_id: target.rater_id.clone(),
        exemplar_ids: exemplars.iter().map(|e| e.rater_id.clone()).collect(),
    })
}
