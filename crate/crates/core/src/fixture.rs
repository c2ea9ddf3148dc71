//! A tiny in-memory engine for unit tests.

use crate::engine::Engine;
use crate::evaluation::parse_afinn;
use crate::grammar::{extract_skeletons, TagLexicon};
use crate::ngram::NGramModel;
use crate::phonology::parse_pronouncing_lexicon;
use crate::semantics::load_vectors;

pub const CMUDICT: &str = "\
;;; test lexicon
THE  DH AH0
A  AH0
ON  AA1 N
IN  IH0 N
OVER  OW1 V ER0
OLD  OW1 L D
PALE  P EY1 L
COLD  K OW1 L D
BRIGHT  B R AY1 T
DARK  D AA1 R K
DEEP  D IY1 P
SOFT  S AO1 F T
SILENT  S AY1 L AH0 N T
POND  P AA1 N D
FROG  F R AO1 G
MOON  M UW1 N
SUN  S AH1 N
WIND  W IH1 N D
SKY  S K AY1
AUTUMN  AO1 T AH0 M
WINTER  W IH1 N T ER0
SUMMER  S AH1 M ER0
RIVER  R IH1 V ER0
MOONLIGHT  M UW1 N L AY2 T
MOUNTAIN  M AW1 N T AH0 N
LOVE  L AH1 V
LEAVES  L IY1 V Z
FALL  F AO1 L
FALLS  F AO1 L Z
BLOWS  B L OW1 Z
SLEEPS  S L IY1 P S
FLOWS  F L OW1 Z
STANDS  S T AE1 N D Z
";

pub const TAGS: &str = "\
the\tDT
a\tDT
on\tIN
in\tIN
over\tIN
old\tJJ
pale\tJJ
cold\tJJ
bright\tJJ
dark\tJJ
deep\tJJ
soft\tJJ
silent\tJJ
pond\tNN
frog\tNN
moon\tNN
sun\tNN
wind\tNN
sky\tNN
autumn\tNN
winter\tNN
summer\tNN
river\tNN
moonlight\tNN
mountain\tNN
love\tNN
leaves\tNNS
fall\tVB
falls\tVBZ
blows\tVBZ
sleeps\tVBZ
flows\tVBZ
stands\tVBZ
";

pub const TEXT: &str = "\
The old frog sleeps in the pond. The cold wind blows over the river.
The moon falls on the silent pond. Autumn leaves fall in the cold wind.
The river flows in summer. A bright sun stands over the mountain.
The pale moonlight falls on the pond. Winter wind blows on the mountain.
Love sleeps in the moonlight. The sky falls on the old pond.
The dark river flows in the deep pond. A soft wind blows.
";

pub const HAIKUS: &str = "\
silent autumn pond
the moonlight falls on the pond
a bright summer sky

the cold river flows
cold wind blows over the sky
the old frog sleeps in the moon
";

pub const VECTORS: &str = "\
the 0.1 0.1 0.1
pond 1 0 0
river 1 0.1 0
frog 0.9 0 0.1
moon 0 0 1
moonlight 0.1 0 1
sun 0 0.2 0.9
sky 0 0 0.7
autumn 0 1 0
winter 0 0.9 -0.1
summer 0 0.8 0.3
leaves 0.1 0.8 0
wind 0.2 0.6 0
cold 0 0.7 0
mountain 0.3 0.3 0.3
love 0.2 0.2 0.2
pale 0 0.1 0.6
bright 0 0 0.8
dark 0.4 0.2 -0.3
deep 0.8 0.1 0
soft 0.2 0.3 0.3
old 0.3 0.3 0
silent 0.5 0.2 0.2
falls 0.2 0.5 0.1
blows 0.1 0.6 0
sleeps 0.5 0 0.3
flows 0.9 0 0
stands 0.2 0.2 0.2
";

pub const AFINN: &str = "love\t3\nbright\t1\ncold\t-1\nsilent\t0\n";

/// Engine over the constants above, with `text` as the n-gram corpus.
pub fn engine_with_text(text: &str) -> Engine {
    let (lexicon, _) = parse_pronouncing_lexicon(CMUDICT.as_bytes()).unwrap();
    let tags = TagLexicon::parse(TAGS.as_bytes()).unwrap();
    let ngram = NGramModel::build(text.as_bytes(), 3).unwrap();
    let (space, _) = load_vectors(VECTORS.as_bytes(), None).unwrap();
    let (affect, _) = parse_afinn(AFINN.as_bytes()).unwrap();
    let (skeletons, _) = extract_skeletons(HAIKUS.as_bytes(), &tags, &lexicon).unwrap();
    Engine::new(lexicon, tags, ngram, space, affect, skeletons)
}

pub fn engine() -> Engine {
    engine_with_text(TEXT)
}
