#!/usr/bin/env python3
"""Build the small demo model inputs under data/.

Inputs: a full CMU pronouncing dictionary (``cmudict.dict`` from the
``cmudict`` PyPI package works) and the AFINN-111 word list.

Outputs (all deterministic for a given --seed):
  data/cmudict-demo.dict   subset of the CMU dictionary covering the demo vocabulary
  data/afinn-111.txt       AFINN-111 copied verbatim
  crates/core/data/seed-tags.tsv  word<TAB>TAG seed lexicon compiled into the engine
  data/text-corpus.txt     themed synthetic prose for the n-gram model
  data/haiku-corpus.txt    10,000 haikus (handwritten seeds + templated lines)
  data/vectors-demo.txt    32-d PPMI/SVD vectors trained on text-corpus.txt

The synthetic text is only a stand-in for a real general corpus; swap in
any plain-text corpus and pre-trained GloVe file for real use.
"""

import argparse
import random
import re
import shutil
from collections import Counter, defaultdict
from pathlib import Path

import numpy as np

CLOSED = {
    "DT": "the a an this that these those each every some no all another".split(),
    "IN": (
        "in on of from under over into through across beneath beside by with "
        "without near above below behind after before among along against at "
        "for like past upon within toward around between beyond"
    ).split(),
    "CC": "and but or yet nor".split(),
    "PRP": "i you he she it we they me him us them".split(),
    "PRP$": "my your his its our their her".split(),
    "TO": ["to"],
    "MD": "will can may might must shall could would should".split(),
    "WDT": ["which", "whatever"],
}

THEMES = {
    "water": dict(
        NN="pond frog water ripple reed lily stream river rain puddle mist splash "
        "wave current dragonfly carp lotus bank mud pebble fountain well brook "
        "shallow flood spring droplet heron",
        VB="splash ripple flow drip sink swim drift soak float wade leap plunge gurgle",
        JJ="wet still deep shallow murky clear cool silver green quiet muddy damp liquid",
        RB="softly quietly slowly",
    ),
    "moon": dict(
        NN="moon night star moonlight darkness shadow lantern owl midnight sky "
        "eclipse tide glow planet dusk twilight candle dream sleep silence crescent "
        "orbit comet heaven firefly",
        VB="glow shine rise wane sleep dream gleam glimmer wander fade watch whisper hover",
        JJ="pale silver dark bright full lunar dim silent distant lonely hollow faint "
        "starry nocturnal",
        RB="tonight alone faintly",
    ),
    "blossom": dict(
        NN="flower blossom petal cherry bloom garden bud rose orchard spring branch "
        "tulip violet plum meadow pollen bee nectar fragrance sprout stem daisy "
        "lilac peach seed",
        VB="bloom blossom open scatter sway unfold sprout smell bud grow flutter drop "
        "flourish",
        JJ="fragrant pink tender fresh gentle sweet white delicate young lush early "
        "fertile vivid",
        RB="gently early again",
    ),
    "autumn": dict(
        NN="autumn leaf harvest wind maple chestnut acorn frost rake orchard apple "
        "pumpkin hay crow smoke bonfire scarecrow field stubble gourd mushroom "
        "squirrel fog evening dusk",
        VB="fall drift rustle wither gather rake burn crackle shiver fade scatter turn "
        "ripen",
        JJ="golden red brown crisp dry bare late amber withered chilly ripe rusty "
        "smoky mellow",
        RB="slowly already still",
    ),
    "love": dict(
        NN="love heart kiss lover bride embrace desire longing promise letter "
        "sweetheart tenderness passion darling rose ring wedding tear smile hand "
        "lip touch memory friend joy",
        VB="love kiss hold embrace cherish long yearn ache smile adore hug weep "
        "remember",
        JJ="tender warm dear loving faithful beloved sweet lonely happy sad precious "
        "gentle true",
        RB="forever dearly always",
    ),
    "winter": dict(
        NN="snow ice winter frost icicle blizzard snowflake cold hearth fire chimney "
        "sled mitten pine sleet drift silence window breath crystal cabin stove "
        "kettle wool blanket",
        VB="freeze melt drift shiver settle crunch glisten cover bury whiten sparkle "
        "huddle thaw",
        JJ="frozen cold white icy bitter bleak numb frosty hushed pale stark brittle "
        "snowy",
        RB="silently softly nearly",
    ),
    "summer": dict(
        NN="summer sun heat cicada beach sand noon shade grass melon straw cloud "
        "thunder storm lightning fan dust road sweat field meadow sunflower wasp "
        "afternoon haze",
        VB="burn blaze sizzle shimmer buzz bake wilt sweat chirp roar swelter drowse "
        "dry",
        JJ="hot dry bright sunny lazy dusty blazing humid golden drowsy scorching "
        "endless green",
        RB="lazily brightly suddenly",
    ),
    "mountain": dict(
        NN="mountain stone rock cliff peak temple path valley cave ridge boulder "
        "summit cloud monk bell shrine pine moss echo trail waterfall gorge hill "
        "pilgrim cedar",
        VB="climb echo crumble tower stand rest bow pray toll loom ascend kneel linger",
        JJ="ancient steep high rocky misty grey distant sacred mossy rugged vast "
        "solemn craggy",
        RB="high above alone",
    ),
    "creature": dict(
        NN="snake frog crow sparrow gull cat dog horse deer fox wolf beetle moth "
        "spider cricket butterfly swallow crane fish worm snail mouse rabbit goose "
        "paw tooth",
        VB="crawl fly sing hop bark howl hunt coil creep flutter nest prowl hiss "
        "chirp dig",
        JJ="small wild great swift sly lazy hungry tiny sleek nimble furry shy "
        "fierce strong",
        RB="swiftly quickly silently",
    ),
    "home": dict(
        NN="house door window room kitchen bread tea cup table lamp roof garden "
        "chair bed mother child father drawer quilt vase dress juice name tooth "
        "toddler",
        VB="wait sit sleep cook pour knock open close clean sweep mend knit wash "
        "shrink",
        JJ="warm quiet old empty small cozy clean safe cute straight crowded humble "
        "familiar stylish",
        RB="inside again still",
    ),
    "sea": dict(
        NN="sea ocean wave shore tide shell salt sail boat harbor gull island reef "
        "foam dune anchor whale crab kelp sailor lighthouse horizon ebb iceberg "
        "current",
        VB="ebb crash roll sail drown wash break surge foam rock glide drift toss",
        JJ="salty blue briny vast wild stormy calm endless deep grey foamy brackish "
        "coastal",
        RB="far away ashore",
    ),
    "time": dict(
        NN="time year day morning hour clock moment age child grave season "
        "memory dawn century past silence journey life death ghost history "
        "creativity interim figure cluster",
        VB="pass age wait remember forget begin end linger vanish return change "
        "endure readjust",
        JJ="old young brief long ancient early late fleeting endless last final "
        "new strange",
        RB="once never soon",
    ),
}

IRREGULAR_PAST = {
    "fall": "fell", "sing": "sang", "fly": "flew", "sleep": "slept", "weep": "wept",
    "rise": "rose", "shine": "shone", "blow": "blew", "grow": "grew",
    "freeze": "froze", "sink": "sank", "swim": "swam", "run": "ran", "sit": "sat",
    "hide": "hid", "break": "broke", "wake": "woke", "leave": "left",
    "feel": "felt", "hold": "held", "hear": "heard", "see": "saw", "find": "found",
    "forget": "forgot", "keep": "kept", "stand": "stood", "dig": "dug",
    "shrink": "shrank", "leap": "leapt", "begin": "began", "burn": "burned",
    "dream": "dreamed", "kneel": "knelt",
}
IRREGULAR_PLURAL = {
    "leaf": "leaves", "wolf": "wolves", "mouse": "mice", "goose": "geese",
    "child": "children", "tooth": "teeth", "fish": "fish", "deer": "deer",
    "life": "lives", "shelf": "shelves",
}
VOWELS = set("aeiou")


def es_form(w):
    if re.search(r"(s|x|z|ch|sh)$", w):
        return w + "es"
    if len(w) > 1 and w.endswith("y") and w[-2] not in VOWELS:
        return w[:-1] + "ies"
    return w + "s"


def doubles(w):
    return len(w) <= 4 and re.fullmatch(r".*[^aeiou][aeiou][^aeiouwxy]", w) is not None


def past_form(w):
    if w in IRREGULAR_PAST:
        return IRREGULAR_PAST[w]
    if w.endswith("e"):
        return w + "d"
    if len(w) > 1 and w.endswith("y") and w[-2] not in VOWELS:
        return w[:-1] + "ied"
    if doubles(w):
        return w + w[-1] + "ed"
    return w + "ed"


def ing_form(w):
    if w.endswith("ie"):
        return w[:-2] + "ying"
    if w.endswith("e") and not w.endswith("ee"):
        return w[:-1] + "ing"
    if doubles(w):
        return w + w[-1] + "ing"
    return w + "ing"


def load_cmu(path):
    entries = {}
    with open(path, encoding="latin-1") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line or line.startswith(";;;"):
                continue
            word, *phones = line.split()
            base = re.sub(r"\(\d+\)$", "", word).lower()
            entries.setdefault(base, []).append((word, phones))
    return entries


def syllables(cmu, w):
    return sum(1 for p in cmu[w][0][1] if p[-1].isdigit())


def build_vocab(cmu):
    tags = {}
    by_theme = defaultdict(lambda: defaultdict(list))

    def add(word, tag, theme):
        if word not in cmu:
            return
        if word in tags and tags[word] != tag:
            return
        tags[word] = tag
        if theme is not None and word not in by_theme[theme][tag]:
            by_theme[theme][tag].append(word)

    for tag, words in CLOSED.items():
        for w in words:
            add(w, tag, None)
    for theme, lists in THEMES.items():
        for n in lists["NN"].split():
            add(n, "NN", theme)
            add(IRREGULAR_PLURAL.get(n, es_form(n)), "NNS", theme)
        for j in lists["JJ"].split():
            add(j, "JJ", theme)
        for v in lists["VB"].split():
            add(v, "VB", theme)
            add(es_form(v), "VBZ", theme)
            add(past_form(v), "VBD", theme)
            add(ing_form(v), "VBG", theme)
        for r in lists["RB"].split():
            add(r, "RB", theme)
    for p, t in (("--", ":"), (",", ","), (".", ".")):
        tags[p] = t
    return tags, by_theme


PROSE_TEMPLATES = [
    "the JJ NN VBZ IN the NN",
    "NNS VBD IN the JJ NN",
    "a NN VBZ RB",
    "the NN of the NN VBZ JJ",
    "we VB the JJ NNS",
    "i VBD the NN IN my NN",
    "the NNS were VBG IN the NN",
    "NN and NN IN the JJ NN",
    "her NN VBZ like a NN",
    "the NN will VB RB",
    "it VBZ JJ and JJ",
    "a JJ NN IN the NN",
    "IN the NN the NNS VB",
    "they VB the NN and the NN",
    "JJ NNS VBD IN the NN of NN",
    "the NN is JJ",
    "every NN VBZ its NN",
    "you can VB the NN IN the NN",
    "my JJ NN VBD RB",
    "the JJ NNS of NN",
]

LINE5 = [
    "the JJ NN --",
    "NN IN the NN",
    "a NN VBZ",
    "JJ NN",
    "NNS VBG",
    "NN of NN --",
    "IN the JJ NN",
    "my NN VBZ RB",
    "JJ NNS",
    "that NN IN the NN --",
    "NN IN NN",
    "the NN VBZ",
]
LINE7 = [
    "the NN VBZ IN the NN",
    "NNS VBD IN the JJ NN",
    "a JJ NN VBG RB",
    "IN the NN a NN VBZ",
    "and a JJ NNS",
    "the JJ IN NNS",
    "VBG IN the JJ NN",
    "NNS of NN and JJ NN",
    "i VBD the NN IN my NN",
    "JJ NN IN the NN",
    "the NN of NNS VBZ RB",
    "and the JJ NNS VB",
]

HANDWRITTEN = """\
# Handwritten seed haikus for the demo corpus.
# Lines that do not scan 5/7/5 under the demo lexicon are ignored by the
# skeleton extractor, so a few of these contribute only some lines.

old pond in the rain --
a frog leaps into the dark
ripples of the moon

the autumn moonlight
a worm digs into the ground
under the chestnut

cherry blossoms fall
over the temple roof tiles
a bell in the mist

the pale winter sun
a crow on the frozen field
silence of the snow

a lantern glimmers
beside the river at dusk
fireflies drifting

my mother's old quilt
warm beneath the window light
the kettle whistles

salt wind on the shore
a gull cries over the waves
the tide slips away

summer afternoon
cicadas buzz in the pines
the heat of the stone

the ancient temple
moss on the steps to the shrine
a monk sweeping leaves

a spider weaving
between the plum branches --
the morning is still
"""


PREPOSITIONS = (
    "in on of under over into through across beneath beside with near above "
    "behind after among at for like upon beyond"
).split()


def resolve_prepositions(rng, template):
    return " ".join(rng.choice(PREPOSITIONS) if t == "IN" else t for t in template.split())


def fill_template(rng, template, theme_words, all_words):
    out = []
    for tok in resolve_prepositions(rng, template).split():
        if tok in ("NN", "NNS", "JJ", "VB", "VBZ", "VBD", "VBG", "RB"):
            pool = theme_words.get(tok) or []
            if not pool or rng.random() < 0.2:
                pool = all_words[tok]
            out.append(rng.choice(pool))
        else:
            out.append(tok)
    return out


def fill_line(rng, template, target, theme_words, all_words, cmu, tries=200):
    toks = resolve_prepositions(rng, template).split()
    open_idx = [i for i, t in enumerate(toks) if t in all_words]
    fixed = sum(syllables(cmu, t) for i, t in enumerate(toks) if i not in open_idx and t in cmu)
    budget = target - fixed
    if budget < len(open_idx):
        return None
    for _ in range(tries):
        cuts = sorted(rng.sample(range(1, budget), len(open_idx) - 1)) if len(open_idx) > 1 else []
        parts = [b - a for a, b in zip([0] + cuts, cuts + [budget])]
        words = []
        ok = True
        for i, s in zip(open_idx, parts):
            tag = toks[i]
            pool = [w for w in theme_words.get(tag, []) if syllables(cmu, w) == s]
            if not pool or rng.random() < 0.2:
                pool = [w for w in all_words[tag] if syllables(cmu, w) == s]
            if not pool:
                ok = False
                break
            words.append(rng.choice(pool))
        if ok:
            line = list(toks)
            for i, w in zip(open_idx, words):
                line[i] = w
            return " ".join(line)
    return None


def ppmi_svd(sentences, dim, window, seed):
    vocab = sorted({w for s in sentences for w in s})
    index = {w: i for i, w in enumerate(vocab)}
    co = np.zeros((len(vocab), len(vocab)))
    for s in sentences:
        ids = [index[w] for w in s]
        for i, a in enumerate(ids):
            for j in range(max(0, i - window), min(len(ids), i + window + 1)):
                if i != j:
                    co[a, ids[j]] += 1.0 / abs(i - j)
    total = co.sum()
    row = co.sum(axis=1, keepdims=True)
    col = co.sum(axis=0, keepdims=True) ** 0.75
    col = col / col.sum() * total
    with np.errstate(divide="ignore", invalid="ignore"):
        pmi = np.log((co * total) / (row * col))
    ppmi = np.nan_to_num(np.maximum(pmi, 0.0), nan=0.0, posinf=0.0, neginf=0.0)
    u, s, _ = np.linalg.svd(ppmi, full_matrices=False)
    vecs = u[:, :dim] * np.sqrt(s[:dim])
    # fix SVD sign ambiguity for reproducibility
    signs = np.sign(vecs[np.abs(vecs).argmax(axis=0), range(dim)])
    vecs = vecs * signs
    return vocab, vecs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cmudict", required=True)
    ap.add_argument("--afinn", required=True)
    ap.add_argument("--out", default="data")
    ap.add_argument("--tags-out", default="crates/core/data/seed-tags.tsv")
    ap.add_argument("--seed", type=int, default=20161016)
    ap.add_argument("--sentences", type=int, default=40000)
    ap.add_argument("--haikus", type=int, default=10000)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cmu = load_cmu(args.cmudict)
    tags, by_theme = build_vocab(cmu)

    all_words = defaultdict(list)
    for theme in THEMES:
        for tag, words in by_theme[theme].items():
            for w in words:
                if w not in all_words[tag]:
                    all_words[tag].append(w)

    # prose
    theme_names = list(THEMES)
    sentences = []
    for _ in range(args.sentences):
        theme = rng.choice(theme_names)
        toks = fill_template(rng, rng.choice(PROSE_TEMPLATES), by_theme[theme], all_words)
        sentences.append(toks)
    with open(out / "text-corpus.txt", "w") as fh:
        for toks in sentences:
            fh.write(" ".join(toks).capitalize() + ".\n")

    # haikus
    haikus = []
    while len(haikus) < args.haikus:
        theme = by_theme[rng.choice(theme_names)]
        lines = [
            fill_line(rng, rng.choice(LINE5), 5, theme, all_words, cmu),
            fill_line(rng, rng.choice(LINE7), 7, theme, all_words, cmu),
            fill_line(rng, rng.choice(LINE5), 5, theme, all_words, cmu),
        ]
        if all(lines):
            haikus.append("\n".join(lines))
    with open(out / "haiku-corpus.txt", "w") as fh:
        fh.write(HANDWRITTEN)
        fh.write("\n# Templated haikus over the demo vocabulary.\n\n")
        fh.write("\n\n".join(haikus) + "\n")

    # vectors
    vocab, vecs = ppmi_svd(sentences, 32, 4, args.seed)
    with open(out / "vectors-demo.txt", "w") as fh:
        for w, v in zip(vocab, vecs):
            fh.write(w + " " + " ".join(f"{x:.5f}" for x in v) + "\n")

    # pronouncing subset: every word any corpus mentions
    needed = set(tags)
    for text in (HANDWRITTEN, (out / "haiku-corpus.txt").read_text()):
        for tok in re.findall(r"[a-z']+", text.lower()):
            needed.add(tok)
    with open(out / "cmudict-demo.dict", "w", encoding="utf-8") as fh:
        fh.write(";;; Subset of the CMU Pronouncing Dictionary (cmudict 0.7b).\n")
        for line in Path(args.cmudict).with_name("LICENSE").read_text().splitlines():
            fh.write(";;; " + line + "\n")
        for w in sorted(needed):
            for word, phones in cmu.get(w, []):
                fh.write(f"{word.upper()}  {' '.join(phones)}\n")

    with open(Path(args.tags_out), "w") as fh:
        for w in sorted(tags):
            fh.write(f"{w}\t{tags[w]}\n")

    shutil.copy(args.afinn, out / "afinn-111.txt")
    print(f"vocab={len(tags)} sentences={len(sentences)} haikus={len(haikus)} vecs={len(vocab)}")


if __name__ == "__main__":
    main()
