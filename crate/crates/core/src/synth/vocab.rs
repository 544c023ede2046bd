pub(crate) struct Genre {
    pub name: &'static str,
    pub keywords: &'static [&'static str],
}

pub(crate) const GENRES: &[Genre] = &[
    Genre {
        name: "comedy",
        keywords: &["laugh", "gag", "prank", "riot", "giggle", "farce", "jest", "spoof"],
    },
    Genre {
        name: "horror",
        keywords: &["blood", "haunt", "scream", "crypt", "ghoul", "curse", "dread", "fang"],
    },
    Genre {
        name: "science fiction",
        keywords: &["star", "orbit", "galaxy", "robot", "quantum", "nebula", "cyborg", "rocket"],
    },
    Genre {
        name: "romance",
        keywords: &["kiss", "heart", "rose", "amour", "darling", "wedding", "sweetheart", "valentine"],
    },
    Genre {
        name: "western",
        keywords: &["outlaw", "saddle", "frontier", "sheriff", "canyon", "bandit", "ranch", "gunslinger"],
    },
    Genre {
        name: "crime",
        keywords: &["heist", "mob", "detective", "alibi", "murder", "cartel", "gangster", "jury"],
    },
];

pub(crate) const ADJECTIVES: &[&str] = &[
    "Silent", "Golden", "Last", "Broken", "Hidden", "Wild", "Crimson", "Lonely", "Midnight", "Electric", "Distant",
    "Burning", "Frozen", "Secret", "Savage", "Gentle", "Final", "Lost", "Endless", "Bright",
];

pub(crate) const NOUNS: &[&str] = &[
    "Road", "City", "River", "Summer", "Night", "Promise", "Kingdom", "Echo", "Harbor", "Garden", "Shadow", "Storm",
    "Journey", "Mirror", "Island", "Letter", "Winter", "Station", "Bridge", "Dream",
];

pub(crate) const FILLER: &[&str] = &[
    "acting", "plot", "pacing", "score", "camera", "ending", "cast", "script", "scene", "director", "twist",
    "dialogue", "effects", "soundtrack", "story", "runtime", "sequel", "lead", "villain", "finale",
];

pub(crate) const REVIEW_OPENERS: &[&str] = &[
    "Solid", "Uneven but fun", "A real treat", "Overlong", "Surprisingly good", "Forgettable", "Classic",
    "Worth a watch",
];

/// Positive description templates. `{g}` is the genre name, `{k0}`..`{k4}`
/// are distinct genre keywords.
pub(crate) const POS_TEMPLATES: &[&str] = &[
    "I love {g} movies, especially anything with a {k0}, a {k1} or a {k2}. Give me a story full of {k3} and {k4}; \
     the more {g} the better, and I am happy for the whole evening.",
    "My favourite films are {g} through and through: a good {k0}, a memorable {k1}, plenty of {k2}. If there is a \
     {k3} or a {k4} somewhere in it, I am sold before the opening credits end.",
    "Nothing beats a great {g} film for me. I look for a {k0}, some {k1}, a clever {k2} and a {k3} that surprises \
     me, and I will happily rewatch anything built around a {k4}.",
];

pub(crate) const NEG_TEMPLATES: &[&str] = &[
    "I really dislike {g} films. Anything built around a {k0} or a {k1} loses me quickly, and a plot about {k2} and \
     {k3} is something I switch off long before the credits roll, {k4} or not.",
    "Please no {g}. Every {k0}, every {k1} and every {k2} feels the same to me, and when a film leans on a {k3} or a \
     {k4} I find myself checking my phone within ten minutes.",
];

pub(crate) const FINAL_POS_TEMPLATES: &[&str] = &[
    "Having picked my examples, I would say I mostly enjoy {g}: stories with a {k0}, a {k1} and some {k2}, where \
     the {k3} matters and the {k4} is more than decoration.",
    "Looking back at my choices, {g} is clearly my thing. A {k0}, a {k1}, a {k2}: those are the films I recommend \
     to friends, particularly when a {k3} or {k4} is involved.",
];

pub(crate) const FINAL_NEG_TEMPLATES: &[&str] = &[
    "On reflection I still avoid {g}. A {k0}, a {k1} or a {k2} on the poster is enough to make me pick something \
     else, and {k3} or {k4} storylines never win me over.",
    "My dislikes have not changed: {g} in general, and in particular anything about a {k0}, {k1}, {k2}, {k3} or \
     {k4}. I would rather watch nothing at all than one of those.",
];
