#!/usr/bin/env python3
"""Generate the bundled synthetic flood corpus.

Writes data/sample/tweets.jsonl (5,000 lines) and data/sample/expected.json,
which holds the counts every stage should report. Labels are computed here
with the regex tokenizer in tests/oracles and a plain prefix matcher over
data/lexicon.txt, so expected.json is independent of the C++ code.

Usage: gen_sample_corpus.py [repo_root]
"""
import datetime as dt
import json
import os
import random
import sys

ROOT = os.path.abspath(sys.argv[1] if len(sys.argv) > 1 else
                       os.path.join(os.path.dirname(__file__), ".."))
sys.path.insert(0, os.path.join(ROOT, "tests", "oracles"))
from tokenize_reference import normalize  # noqa: E402

SEED = 2015
TOTAL_LINES = 5000
START = dt.date(2015, 10, 3)
DAYS = 13
# Relative daily volume, shaped like the published negative series.
VOLUME = [16198, 18710, 30022, 20319, 17803, 17575, 15632,
          12745, 12783, 13208, 13813, 14839, 13427]

# Category presence per day, the same rows as the published table.
PRESENCE = {
    "Animal":           "0100000000000",
    "Bridge Damage":    "0010011000010",
    "Damage and Costs": "1111101110011",
    "Drinking Water":   "0011111100000",
    "Flood Report":     "1101100000100",
    "Homelessness":     "1011111000000",
    "Insurance":        "0001110011100",
    "Power Loss":       "0100010100000",
    "Road Damage":      "0011111001000",
    "Roof Damage":      "0011111100000",
    "Victims":          "0111111111111",
}

WORDS = {
    "Animal": "dogs pets animals horses cats owners livestock adoption kennel rescued".split(),
    "Bridge Damage": "bridge dam breach washed overpass inspection failed bridges structural crossing".split(),
    "Damage and Costs": "billion cost million estimate repairs dollars economic businesses damages losses".split(),
    "Drinking Water": "water boil advisory drinking bottled supply main pressure tap plant".split(),
    "Flood Report": "rain inches river levels crest rainfall forecast warning gauge record".split(),
    "Homelessness": "homes shelter evacuated displaced families residents neighborhood housing evacuees cots".split(),
    "Insurance": "insurance claims fema policy coverage adjusters assistance homeowners federal aid".split(),
    "Power Loss": "power outages electricity customers restored lines dark generator utility crews".split(),
    "Road Damage": "road closed interstate i95 traffic detour closures highway scdot sinkhole".split(),
    "Roof Damage": "roof leaking ceiling tarps shingles contractor roofing attic mold gutters".split(),
    "Victims": "victims dead died missing bodies drowned toll coroner identified killed".split(),
}
NEGATIVE = "damaged destroyed devastating dead tragic suffering terrible awful horrible afraid scared worried dangerous trapped stranded ruined".split()
POSITIVE = "safe thankful hope grateful blessed brave support recovering good great love kindness generous proud heroes volunteers".split()
PLACES = "columbia lexington richland charleston sumter georgetown kershaw florence".split()
GLUE = "the in at of is and on for near our after".split()
HASHTAGS = ["#SCFlood", "#scflood", "#SCFlood2015", "#floodsc", "#PrayForSC",
            "#SouthCarolinaStrong", "#scflooding", "#SCFloodRelief", "#flood",
            "#FloodingSC", "#FloodGSSCMMwithlove"]
OFFTOPIC = ("football game tonight gamecocks tailgate coffee morning traffic "
            "music concert pizza weekend movie homework campus sunny").split()


def load_lexicon(path):
    pos, neg, cur = [], [], None
    for raw in open(path, encoding="utf-8"):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line in ("[positive]", "[negative]"):
            cur = pos if line == "[positive]" else neg
            continue
        cur.append(line.lower())
    return pos, neg


def hits(entries, token):
    for e in entries:
        if e.endswith("*") and token.startswith(e[:-1]):
            return True
        if e == token:
            return True
    return False


def label_of(tokens, lex):
    pos = sum(hits(lex[0], t) for t in tokens)
    neg = sum(hits(lex[1], t) for t in tokens)
    return "negative" if neg > pos else "positive" if pos > neg else "neutral"


def stamp(rng, day):
    base = dt.datetime.combine(day, dt.time(), dt.timezone.utc)
    t = base + dt.timedelta(seconds=rng.randrange(86400))
    if rng.random() < 0.5:
        return t.strftime("%Y-%m-%dT%H:%M:%SZ")
    local = t.astimezone(dt.timezone(dt.timedelta(hours=-4)))
    return local.strftime("%Y-%m-%dT%H:%M:%S-04:00")


def flood_text(rng, day_index, target):
    present = [c for c, row in PRESENCE.items() if row[day_index] == "1"]
    topic = rng.choice(present if target == "negative" else list(WORDS))
    words = rng.sample(WORDS[topic], rng.randint(3, 5))
    words += [rng.choice(PLACES)] + rng.sample(GLUE, 2)
    if target == "negative":
        words += rng.sample(NEGATIVE, rng.randint(1, 2))
    elif target == "positive":
        words += rng.sample(POSITIVE, rng.randint(1, 2))
    rng.shuffle(words)
    words = [w.capitalize() if rng.random() < 0.15 else w for w in words]
    words.append(rng.choice(HASHTAGS) if rng.random() < 0.85 else "flood")
    if rng.random() < 0.2:
        words.insert(0, "RT @user%d:" % rng.randrange(500))
    if rng.random() < 0.3:
        words.append("https://t.co/%08x" % rng.getrandbits(32))
    return " ".join(words)


def main():
    rng = random.Random(SEED)
    lex = load_lexicon(os.path.join(ROOT, "data", "lexicon.txt"))
    query = {l.strip().lower().lstrip("#") for l in
             open(os.path.join(ROOT, "data", "query.txt")) if l.strip()}
    lines = []
    next_id = 6500000000

    def record(created, text):
        nonlocal next_id
        next_id += rng.randint(1, 90)
        return json.dumps({"id": str(next_id), "created_at": created, "text": text},
                          ensure_ascii=False)

    junk = ["{not json", "[]",
            json.dumps({"id": "1", "created_at": "2015-10-05T12:00:00Z"}),
            json.dumps({"id": "2", "created_at": "October 5", "text": "#scflood"}),
            json.dumps({"created_at": "2015-10-05T12:00:00Z", "text": "#scflood"})]
    outside = 120
    offtopic = 150
    in_window = TOTAL_LINES - len(junk) - outside - offtopic
    weights = [v / sum(VOLUME) for v in VOLUME]
    per_day = [int(in_window * w) for w in weights]
    per_day[2] += in_window - sum(per_day)

    for d, n in enumerate(per_day):
        day = START + dt.timedelta(days=d)
        for _ in range(n):
            target = rng.choices(["negative", "neutral", "positive"], [0.45, 0.35, 0.2])[0]
            lines.append(record(stamp(rng, day), flood_text(rng, d, target)))
    for _ in range(outside):
        day = rng.choice([START - dt.timedelta(days=2), START - dt.timedelta(days=1),
                          START + dt.timedelta(days=DAYS), START + dt.timedelta(days=DAYS + 1)])
        lines.append(record(day.isoformat() + "T12:%02d:00Z" % rng.randrange(60),
                            flood_text(rng, 0, "negative")))
    for _ in range(offtopic):
        day = START + dt.timedelta(days=rng.randrange(DAYS))
        lines.append(record(stamp(rng, day), " ".join(rng.sample(OFFTOPIC, 6))))
    rng.shuffle(lines)
    for j in junk:
        lines.insert(rng.randrange(len(lines)), j)
    assert len(lines) == TOTAL_LINES

    expected = {"lines": len(lines), "malformed": 0, "matched": 0, "excluded": 0,
                "totals": {"negative": 0, "neutral": 0, "positive": 0},
                "negative_per_day": [0] * DAYS}
    seen = set()
    for line in lines:
        try:
            rec = json.loads(line)
            text, created, tid = rec["text"], rec["created_at"], rec["id"]
            when = dt.datetime.fromisoformat(created.replace("Z", "+00:00"))
        except (ValueError, KeyError, TypeError, AttributeError):
            expected["malformed"] += 1
            continue
        if tid in seen:
            expected["malformed"] += 1
            continue
        seen.add(tid)
        tokens = normalize(text)
        if not query.intersection(tokens):
            continue
        expected["matched"] += 1
        d = (when.astimezone(dt.timezone.utc).date() - START).days
        if not 0 <= d < DAYS:
            expected["excluded"] += 1
            continue
        label = label_of(tokens, lex)
        expected["totals"][label] += 1
        if label == "negative":
            expected["negative_per_day"][d] += 1

    out = os.path.join(ROOT, "data", "sample")
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "tweets.jsonl"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    with open(os.path.join(out, "expected.json"), "w") as f:
        json.dump(expected, f, indent=2)
        f.write("\n")
    print(json.dumps(expected))


if __name__ == "__main__":
    main()
