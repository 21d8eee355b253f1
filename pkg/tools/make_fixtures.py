"""Regenerates the data fixtures shipped inside the package.

Run from the repository root after changing the layout, templates, the
synthesizer, or the word list:

    python tools/make_fixtures.py

Outputs are deterministic, so reruns without changes leave git clean.
"""

from __future__ import annotations

from pathlib import Path

from dusk.calibration import TimingTable, synth_profile
from dusk.core import PadSpec, Thumb
from dusk.layout import default_layout
from dusk.lexicon import parse_lexicon_lines
from dusk.recognizer import save_templates
from dusk.sessionlog import write_session_log
from dusk.simulate import StrokeSynthesizer, phrase_log

DATA = Path(__file__).resolve().parents[1] / "src" / "dusk" / "data"

# Common English words, roughly most-frequent first. Counts below follow a
# Zipf curve over the rank, which is all the decoder's relative ranking needs.
WORDS = """
the of and a to in is you that it
he was for on are as with his they i
at be this have from or one had by word
but not what all were we when your can said
there use an each which she do how their if
will up other about out many then them these so
some her would make like him into time has look
two more write go see number no way could people
my than first water been call who oil its now
find long down day did get come made may part
over new sound take only little work know place year
live me back give most very after thing our just
name good sentence man think say great where help through
much before line right too mean old any same tell
boy follow came want show also around form three small
set put end does another well large must big even
such because turn here why ask went men read need
land different home us move try kind hand picture again
change off play spell air away animal house point page
letter mother answer found study still learn should america world
high every near add food between own below country plant
last school father keep tree never start city earth eye
light thought head under story saw left dont few while
along might close something seem next hard open example begin
life always those both paper together got group often run
important until children side feet car mile night walk white
sea began grow took river four carry state once book hear
stop without second later miss idea enough eat face watch
far indian really almost let above girl sometimes mountain cut
young talk soon list song being leave family body music color
stand sun questions fish area mark dog horse birds problem complete
room knew since ever piece told usually didnt friends easy heard
order red door sure become top ship across today during short
better best however low hours black products happened whole measure remember
early waves reached listen wind rock space covered fast several hold
himself toward five step morning passed vowel true hundred against pattern
numeral table north slowly money map farm pulled draw voice seen
cold cried plan notice south sing war ground fall king town
unit figure certain field travel wood fire upon done english road
half ten fly gave box finally wait correct oh quickly person
became shown minutes strong verb stars front feel fact inches street
decided contain course surface produce building ocean class note nothing rest
carefully scientists inside wheels stay green known island week less machine
base ago stood plane system behind ran round boat game force
brought understand warm common bring explain dry though language shape deep
thousands yes clear equation yet government filled heat full hot check
object am rule among noun power cannot able six size dark
ball material special heavy fine pair circle include built matter square
syllables perhaps bill felt suddenly test direction center farmers ready
anything divided general energy subject europe moon region return believe
dance members picked simple cells paint mind love cause rain exercise
eggs train blue wish drop developed window difference distance heart sit
sum summer wall forest probably legs sat main winter wide written
length reason kept interest arms brother race present beautiful store job
edge past sign record finished discovered wild happy beside gone sky
glass million west lay weather root instruments meet third months paragraph
raised represent soft whether clothes flowers shall teacher held describe drive
cross speak solve appear metal son either ice sleep village factors
result jumped snow ride care floor hill pushed baby buy century
outside everything tall already instead phrase soil bed copy free hope
spring case laughed nation quite type themselves temperature bright lead everyone
method section lake consonant within dictionary hair age amount scale pounds
although per broken moment tiny possible gold milk quiet natural lot
stone act build middle speed count cat someone sail rolled bear
wonder smiled angle fraction africa killed melody bottom trip hole poor
lets fight surprise french died beat exactly remain dress iron fingers
row least catch climbed wrote shouted continued itself else plains gas
england burning design joined foot law ears grass youre grew skin
valley cents key president brown trouble cool cloud lost sent symbols
wear bad save experiment engine alone drawing east pay single touch
information express mouth yard equal decimal yourself control practice report straight
rise statement stick party seeds suppose woman coast bank period wire
choose clean visit bit whose received garden please strange caught fell
team god captain direct ring serve child desert increase history cost
maybe business separate break uncle hunting flow lady students human art
feeling supply corner electric insects crops tone hit sand doctor provide
thus cook bones tail board modern compound mine fit addition
belong safe soldiers guess silent trade rather compare crowd poem
enjoy elements indicate except expect flat seven interesting sense string
blow famous value wings movement pole exciting branches thick blood
lie spot bell fun loud consider suggested thin position entered
fruit tied rich dollars send sight chief japanese stream plants
rhythm eight science major observe tube necessary weight meat lifted
process army hat property particular swim terms current park sell
shoulder industry wash block spread cattle wife sharp company radio
action capital factories settled yellow southern truck fair printed ahead
chance born level triangle molecules france repeated column western church
sister oxygen plural various agreed opposite wrong chart prepared pretty
solution fresh shop suffix especially shoes actually nose afraid dead
sugar adjective fig office huge gun similar death score forward
stretched experience rose allow fear workers washington greek women bought
led march northern create british difficult match win total deal
determine evening nor rope cotton apple details entire corn substances
smell tools conditions cows track arrived located sir seat division
effect underline view quick ok thy dusk ate friend phone
banana orange grape lemon melon peach pear plum berry mango
bread rice pasta salad soup sauce pepper salt honey cream
tiger lion zebra eagle shark whale snake mouse rabbit sheep
goat duck goose frog spider monkey camel deer fox wolf
ant bee beetle moth worm snail crab clam squid owl
chair couch shelf lamp clock mirror carpet pillow blanket curtain
kitchen bathroom bedroom ceiling basement attic porch fence gate roof
hammer wrench screw nail drill blade ladder bucket paintbrush glue
accept adapt admire admit advise afford agree aim announce annoy
apologize applaud appreciate approach argue arrange arrest attack attempt attend
attract avoid bake balance ban bang bare bark bathe battle
beg behave bend bet bind bite blame bleed bless blink
boast boil bolt bomb bounce bow brag brake breathe breed
brush bump burst bury buzz calculate camp cancel capture carve
celebrate challenge charge chase chat cheat chew chop claim clap
clash climb cling coach collect comb command communicate complain concentrate
confess confirm congratulate connect conquer consist construct contact continue cough
crawl crush cry cycle damage dare decide decorate delay deliver
demand deny depend destroy disagree disappear discover discuss dislike divide
dive donate doubt drag dream drown earn educate embarrass employ
empty encourage enter entertain escape examine excuse exist expand explode
extend fade fasten fetch file fill fix flap flash float
fold forbid force forgive gather gaze glow grab greet grind
guard guide handle hang happen harm hate heal hunt hurry
identify ignore imagine impress improve include increase influence inform inject
injure invent invite irritate itch jog join joke judge jump
kick kiss kneel knit knock knot label land laugh launch
lick lift lock long look love manage marry melt memorize
mend mess mix moan mourn murder nod obey object observe
obtain occur offend offer oppose order overflow owe own pack
paddle paint pardon peel perform permit pinch plan plant polish
possess pour pray preach prefer prevent print produce promise protect
prove pull pump punch punish push question realize receive recognize
reduce reflect refuse regret reject relax release rely remind remove
repair replace reply request rescue retire rub ruin sack satisfy
scare scatter scold scratch scream search settle shade shave shelter
shiver shock shrug sigh signal sip ski slap slip smash
sneeze sniff soak spark spill spoil squeak squeeze stamp stare
steer stir stitch strap strengthen stroke stuff subtract succeed suck
suffer suggest suit support suspect swallow swear sweep swell swing
switch tame tap tease telephone tempt thank tick tickle tip
tire trace trap tremble trick trot trust tug tumble twist
unite unlock unpack untidy vanish wander warn wave weigh welcome
whine whip whirl whisper whistle wink wipe wonder wrap wreck
wriggle yawn yell zoom january february april june july august
september october november december monday tuesday wednesday thursday friday saturday sunday
north south east west spring summer autumn winter morning evening
"""

PHRASES = [
    "the dog ran home",
    "we found the answer",
    "music is a part of life",
    "the children play near the river",
    "she told a good story",
    "hold the light for me",
    "the cat sat on the chair",
    "they walk to school together",
    "a friend in need",
    "the sun is warm today",
]


def word_list() -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    for line in WORDS.splitlines():
        for w in line.split():
            if w not in seen:
                seen.add(w)
                out.append(w)
    return out


def make_words() -> None:
    words = word_list()
    assert len(words) >= 1000, f"fixture lexicon too small: {len(words)} words"
    lines = ["# desk-scale frequency list for demos and tests (word<TAB>count)"]
    for rank, w in enumerate(words, start=1):
        count = max(round(2_500_000 / rank), 50)
        lines.append(f"{w}\t{count}")
    (DATA / "words.txt").write_text("\n".join(lines) + "\n")
    lex = parse_lexicon_lines(lines)
    for phrase in PHRASES:
        for w in phrase.split():
            assert w in lex, f"phrase word {w!r} missing from the lexicon"
    print(f"words.txt: {len(words)} words")


def make_layout() -> None:
    default_layout().save(DATA / "layout.json")
    print("layout.json")


def make_templates() -> None:
    save_templates(DATA / "templates.json")
    print("templates.json")


def make_timing() -> None:
    layout = default_layout()
    entries: dict[tuple[str, Thumb], float] = {}
    for letter in layout.letters():
        thumb = layout.thumb_for(letter)
        if letter in (layout.start_left, layout.start_right):
            entries[(letter, thumb)] = 220.0  # tapped in place
            continue
        sx, sy = layout.key_position(layout.start_key(thumb))
        kx, ky = layout.key_position(letter)
        dist = ((kx - sx) ** 2 + (ky - sy) ** 2) ** 0.5
        entries[(letter, thumb)] = round(250.0 + 80.0 * dist + 127.0, 1)
    entries[("space", Thumb.LEFT)] = 180.0
    TimingTable(entries=entries).save(DATA / "timing_default.csv")
    print(f"timing_default.csv: {len(entries)} entries")


def make_teaser() -> None:
    synth = StrokeSynthesizer(synth_profile(), default_layout())
    entries = phrase_log(["dog"], synth, noise=0.0, seed=0, commit="enter")
    write_session_log(DATA / "teaser_dog.jsonl", entries)
    print("teaser_dog.jsonl")


def make_phrases() -> None:
    (DATA / "phrases.txt").write_text("\n".join(PHRASES) + "\n")
    print(f"phrases.txt: {len(PHRASES)} phrases")


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    make_words()
    make_layout()
    make_templates()
    make_timing()
    make_teaser()
    make_phrases()


if __name__ == "__main__":
    main()
