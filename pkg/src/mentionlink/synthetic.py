"""Seeded synthetic corpora standing in for annotated mention data."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .canonical import normalize
from .model import GoldClustering, Mention, Relation

SYLLABLES = (
    "ka ze lor vin tam qu ox rel dra pix nov sul bre gat mo fen jar wex "
    "cly dun hap ist lum nar obe pry rix sto tul vay yor zim"
).split()
WORDS = (
    "Toolkit Studio Analyzer Suite Engine Lab Viewer Tracker Builder Mapper "
    "Solver Scanner Manager Planner Workbench"
).split()
DEVELOPERS = "Acme Initech Globex Umbrella Hooli Stark Wayne Tyrell Cyberdyne Soylent".split()
TYPES = ("Application", "PlugIn", "ProgrammingEnvironment", "OperatingSystem")


@dataclass
class Corpus:
    train: list[Mention]
    train_gold: GoldClustering
    test: list[Mention]
    test_gold: GoldClustering


@dataclass
class _Identity:
    key: str
    long_name: str
    abbreviation: str | None
    entity_type: str
    developer: str


def _word(rng: random.Random, lo: int = 2, hi: int = 3) -> str:
    return "".join(rng.choice(SYLLABLES) for _ in range(rng.randint(lo, hi))).capitalize()


def _identities(
    rng: random.Random, n: int, abbrev_share: float, distinct_prefix: bool = False
) -> list[_Identity]:
    taken: set[str] = set()
    prefixes: set[str] = set()
    out: list[_Identity] = []
    while len(out) < n:
        stem = _word(rng)
        long_name = f"{stem} {rng.choice(WORDS)}"
        abbreviation = None
        if rng.random() < abbrev_share:
            abbreviation = (stem[:3] + long_name.split()[1][0]).upper()
        keys = {normalize(long_name), normalize(stem)}
        if abbreviation:
            keys.add(normalize(abbreviation))
        if keys & taken or (distinct_prefix and any(k[:4] in prefixes for k in keys)):
            continue
        taken |= keys
        prefixes |= {k[:4] for k in keys}
        out.append(
            _Identity(
                key=f"sw{len(out):05d}",
                long_name=long_name,
                abbreviation=abbreviation,
                entity_type=rng.choice(TYPES),
                developer=rng.choice(DEVELOPERS),
            )
        )
    return out


def identity_fixture(
    n_identities: int = 40, train_per: int = 5, test_per: int = 3, seed: int = 7
) -> Corpus:
    """Small corpus where every test mention is recoverable by string or context.

    Each test mention either reuses (up to case and punctuation) a training
    surface, is an abbreviation of a training long form, or copies a training
    mention's full context.
    """
    rng = random.Random(seed)
    idents = _identities(rng, n_identities, abbrev_share=0.5, distinct_prefix=True)
    train: list[Mention] = []
    test: list[Mention] = []
    train_clusters: dict[str, set[str]] = {}
    test_clusters: dict[str, set[str]] = {}

    for ident in idents:
        version = str(rng.randint(2, 30))
        dev = Relation("Developer", ident.developer)
        variants = [
            Mention("", ident.long_name, ident.entity_type, None, (dev,)),
            Mention("", f"{ident.long_name} {version}", ident.entity_type, None,
                    (Relation("Version", version), dev)),
            Mention("", ident.long_name, ident.entity_type, None, (Relation("Version", version),)),
            Mention("", ident.long_name.lower(), ident.entity_type, None, ()),
        ]
        if ident.abbreviation:
            variants.append(
                Mention("", ident.abbreviation, ident.entity_type, None,
                        (Relation("Abbreviation", ident.long_name),))
            )
        else:
            variants.append(Mention("", ident.long_name, ident.entity_type, None, (dev, dev)))
        variants = (variants * train_per)[:train_per]
        members = train_clusters.setdefault(ident.key, set())
        for j, v in enumerate(variants):
            mid = f"tr-{ident.key}-{j}"
            train.append(Mention(mid, v.surface, v.entity_type, f"doc{rng.randint(0, 99)}", v.relations))
            members.add(mid)

        probes = [
            # same canonical key, different casing and punctuation
            Mention("", ident.long_name.upper().replace(" ", "-"), ident.entity_type, None, (dev,)),
            # context-identical copy of a training mention
            variants[1],
        ]
        if ident.abbreviation:
            probes.append(Mention("", ident.abbreviation, ident.entity_type, None,
                                  (Relation("Abbreviation", ident.long_name),)))
        else:
            probes.append(Mention("", f"{ident.long_name}.", ident.entity_type, None,
                                  (Relation("Version", version),)))
        probes = (probes * test_per)[:test_per]
        members = test_clusters.setdefault(ident.key, set())
        for j, p in enumerate(probes):
            mid = f"te-{ident.key}-{j}"
            test.append(Mention(mid, p.surface, p.entity_type, f"doc{rng.randint(100, 199)}", p.relations))
            members.add(mid)

    rng.shuffle(test)
    return Corpus(train, GoldClustering(train_clusters), test, GoldClustering(test_clusters))


def scaled_corpus(
    n_test: int,
    n_identities: int = 700,
    train_per: int = 4,
    novel_fraction: float = 0.15,
    seed: int = 0,
) -> Corpus:
    """Larger corpus for timing: known identities plus unseen ones.

    About ``novel_fraction`` of test mentions belong to identities absent from
    training, so the clustering stage always has work to do.
    """
    rng = random.Random(seed)
    n_novel_ids = max(1, int(n_identities * 0.5))
    idents = _identities(rng, n_identities + n_novel_ids, abbrev_share=0.3)
    known, novel = idents[:n_identities], idents[n_identities:]

    def mention(mid: str, ident: _Identity) -> Mention:
        roll = rng.random()
        version = str(rng.randint(1, 40))
        if roll < 0.4:
            return Mention(mid, ident.long_name, ident.entity_type, None,
                           (Relation("Developer", ident.developer),))
        if roll < 0.7:
            return Mention(mid, f"{ident.long_name} {version}", ident.entity_type, None,
                           (Relation("Version", version),))
        if roll < 0.85 and ident.abbreviation:
            return Mention(mid, ident.abbreviation, ident.entity_type, None,
                           (Relation("Abbreviation", ident.long_name),))
        return Mention(mid, ident.long_name.lower(), ident.entity_type, None, ())

    train, train_clusters = [], {}
    for ident in known:
        members = train_clusters.setdefault(ident.key, set())
        for j in range(train_per):
            mid = f"tr-{ident.key}-{j}"
            train.append(mention(mid, ident))
            members.add(mid)

    test, test_clusters = [], {}
    for i in range(n_test):
        pool = novel if rng.random() < novel_fraction else known
        ident = rng.choice(pool)
        mid = f"te-{i:07d}"
        test.append(mention(mid, ident))
        test_clusters.setdefault(ident.key, set()).add(mid)
    return Corpus(train, GoldClustering(train_clusters), test, GoldClustering(test_clusters))


def skewed_unmatched(
    n: int, weights: dict[str, float] | None = None, seed: int = 0
) -> list[Mention]:
    """Unmatched-looking mentions with a skewed entity-type distribution."""
    rng = random.Random(seed)
    weights = weights or {"Application": 0.6, "PlugIn": 0.25, "ProgrammingEnvironment": 0.1,
                          "OperatingSystem": 0.05}
    types, w = zip(*weights.items())
    out = []
    for i in range(n):
        surface = f"{_word(rng, 1, 3)} {rng.choice(WORDS)}"
        if rng.random() < 0.002:
            surface = "-+-"  # empty canonical name
        out.append(Mention(f"u{i:06d}", surface, rng.choices(types, w)[0]))
    return out
