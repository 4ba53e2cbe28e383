//! Word lists backing the lemmatizer.

/// Irregular inflections, one lemma per line followed by its inflected forms.
pub(super) const IRREGULAR: &str = "
be am is are was were been being
have has had having
do does did done doing
go goes went gone going
arise arose arisen
awake awoke awoken
bear bore borne
beat beaten
become became
begin began begun
bend bent
bite bit bitten
bleed bled
blow blew blown
break broke broken
breed bred
bring brought
build built
burn burnt
buy bought
catch caught
choose chose chosen
cling clung
come came
creep crept
deal dealt
die died dies dying
dig dug
draw drew drawn
dream dreamt
drink drank drunk
drive drove driven
dwell dwelt
eat ate eaten
fall fell fallen
feed fed
feel felt
fight fought
find found
flee fled
fling flung
fly flew flown flies
forbid forbade forbidden
forget forgot forgotten
forgive forgave forgiven
freeze froze frozen
get got gotten
give gave given
grow grew grown
hang hung
hear heard
hide hid hidden
hold held
keep kept
kneel knelt
know knew known
lead led
lean leant
leap leapt
learn learnt
lend lent
lie lied lies lying lain
light lit
lose lost
make made
mean meant
meet met
mislead misled
mistake mistook mistaken
misunderstand misunderstood
overcome overcame
override overrode overridden
overtake overtook overtaken
overwrite overwrote overwritten
pay paid
plead pled
prove proven
rebuild rebuilt
redo redid redone
rerun reran
rewrite rewrote rewritten
ride rode ridden
ring rang rung
rise rose risen
run ran
say said
see saw seen
seek sought
sell sold
send sent
sew sewn
shake shook shaken
shine shone
shoot shot
show shown
shrink shrank shrunk
sing sang sung
sink sank sunk
sit sat
slay slew slain
sleep slept
slide slid
sling slung
smell smelt
sow sown
speak spoke spoken
speed sped
spell spelt
spend spent
spill spilt
spin spun
spit spat
spring sprang sprung
stand stood
steal stole stolen
stick stuck
sting stung
stink stank stunk
stride strode stridden
strike struck stricken
string strung
strive strove striven
swear swore sworn
sweep swept
swell swollen
swim swam swum
swing swung
take took taken
teach taught
tear tore torn
tell told
think thought
throw threw thrown
tie tied ties tying
tread trod trodden
undergo underwent undergone
understand understood
undo undid undone
uphold upheld
wake woke woken
wear wore worn
weave wove woven
weep wept
win won
withdraw withdrew withdrawn
withhold withheld
withstand withstood
wring wrung
write wrote written
foresee foresaw foreseen
child children
man men
woman women
foot feet
tooth teeth
mouse mice
goose geese
ox oxen
louse lice
index indices
vertex vertices
matrix matrices
appendix appendices
analysis analyses
crisis crises
thesis theses
hypothesis hypotheses
parenthesis parentheses
criterion criteria
phenomenon phenomena
leaf leaves
life lives
knife knives
wife wives
half halves
self selves
shelf shelves
wolf wolves
thief thieves
loaf loaves
calf calves
good better best
bad worse worst
far further furthest farther farthest
";

/// Base forms that look inflected, or whose inflections are ambiguous
/// without a dictionary.
pub(super) const BASE_WORDS: &str = "
this is was has does its his us as yes thus plus minus bonus bus gas status focus alias bias
canvas atlas corpus virus campus census consensus radius nexus apparatus always perhaps besides
towards afterwards sometimes whereas nevertheless unless across less news series species lens
basis axis chaos kudos ios macos various previous obvious serious numerous dangerous
ambiguous continuous anonymous synchronous asynchronous miscellaneous erroneous redundant
need feed speed seed proceed exceed succeed indeed weed breed bleed deed heed embed bed red
shed hundred sacred naked wicked kindred
thing string nothing something anything everything during ring king spring ping sing swing
wing bring sting cling fling sling ceiling morning evening pudding sibling darling herring
pending awning
add odd egg err inn ebb
develop envelop gallop
alloc sync exec spec calc desc proc func rec doc
agree free guarantee see flee
";

/// Common base words ending in `e`, used to restore the `e` dropped by
/// `-ed`, `-ing` and `-s` inflections.
pub(super) const E_WORDS: &str = "
abbreviate accelerate accommodate accumulate achieve acquire activate advise aggregate
allocate analyse approve archive argue arrange assume attribute authenticate automate
base behave believe bundle cache calculate capture care cause change charge circle clone
close code collapse combine come compare compile complete compute concatenate configure
confuse consolidate consume continue contribute converge convince coordinate core create
cue cure customize date deallocate debate decide declare decode decompile decrease
dedicate define delegate delete deprecate derive describe deserialize determine devote
dictate disable discharge dispose distribute divide double duplicate edge elaborate
eliminate emulate enable encode encourage enforce engage ensure enumerate escape
estimate evaluate evolve examine exchange exclude excuse execute exercise expire explore
expose facilitate fake file finalize force freeze fuse gauge generate glance
guarantee guide handle hardcode hate hide hope ignore imagine impose improve include
increase indicate influence initialize initiate inline instantiate integrate interface
interpolate introduce invalidate investigate invoke isolate issue iterate judge juggle
leverage license like line live locate manage measure merge migrate minimize mode
moderate modularize move multiple name navigate negate normalize note notice observe
operate optimize organize outline overcome override package page parse paste
place populate practice precede prepare preserve presume price
probe proceed produce promise promote propagate propose prototype provide prune
purge pursue queue quote raise range realize rearrange receive recognize recreate reduce
refine reference regenerate reinitialize relate release relocate remove rename reorganize
replace require rescue reserve reside resize resolve resource restore resume retire
retrieve reuse revise revoke rewrite route rule sale save scale schedule scope score
secure separate serialize serve share shape shave shuffle simulate size skate slice
solve source specialize stage state store strive structure style subscribe substitute
suppose surface synchronize table take tackle terminate time tolerate trace trade
translate traverse tune type unify update upgrade use utilize validate value vote
wipe wire write zone
";

/// Adjectives that take comparative and superlative endings.
pub(super) const ADJECTIVES: &str = "
big bright broad busy cheap clean clear close cold cool dark deep dirty dumb early easy
fast fat few fine flat great happy hard heavy high hot large lazy light long loose
low narrow near new nice old poor pretty quick rich rough safe sharp short simple slim
slow small smart smooth soft strict strong sure thick thin tight tiny ugly warm weak
wide young
";
