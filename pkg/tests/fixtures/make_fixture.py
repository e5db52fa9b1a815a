"""Regenerate the bundled fixture corpus.

    python tests/fixtures/make_fixture.py

Writes raw_records.jsonl (220 statement/citation records, 200 of which
survive ingest) and clusters.jsonl (DUC-style topic clusters). The output is
committed; the generator is kept so the corpus can be inspected and rebuilt.
"""

import json
import random
from pathlib import Path

HERE = Path(__file__).parent
SEED = 20200705

PLACES = ["Marina", "Chennai", "Lisbon", "Kyoto", "Odessa", "Valparaiso", "Quebec", "Tromso", "Cairo",
          "Nairobi", "Hobart", "Bergen", "Cusco", "Da Nang", "Galway", "Perth", "Split", "Tallinn"]
KINDS = ["Beach", "Harbour", "Bridge", "Cathedral", "Stadium", "Railway", "Festival", "University",
         "Museum", "Airport", "Market", "Lighthouse"]
SECTIONS = {
    "History": ["Early years", "Twentieth century", "Restoration"],
    "Incidents": ["Stampede", "Flooding", "Fire"],
    "Geography": ["Climate", "Coastline"],
    "Economy": ["Tourism", "Fishing", "Trade"],
    "Culture": ["Music", "Cuisine"],
    "Transport": [],
    "Reception": [],
}
SUBJECTS = ["the city council", "local fishermen", "the port authority", "police officers", "the mayor",
            "a group of engineers", "the national government", "residents", "tourists", "the museum board",
            "rescue teams", "the railway company", "university researchers", "the harbour master",
            "festival organisers", "several witnesses", "the coast guard", "shop owners"]
VERBS = ["announced", "reported", "approved", "rebuilt", "inspected", "closed", "reopened", "expanded",
         "criticised", "funded", "evacuated", "documented", "restored", "investigated", "celebrated",
         "protested", "surveyed", "delayed"]
OBJECTS = ["the northern pier", "a new drainage system", "the historic lighthouse", "the main promenade",
           "the annual boat race", "a temporary shelter", "the crowded market square", "the old railway line",
           "a flood barrier", "the stone bridge", "the cathedral roof", "the fish auction hall",
           "an emergency plan", "the coastal road", "a cultural festival", "the stadium seating"]
PREPS = ["near", "beside", "across", "outside", "along", "inside"]
LANDMARKS = ["the harbour", "the beach", "the river mouth", "the old town", "the central station",
             "the university campus", "the southern district", "the fishing village"]
TIMES = ["in 1998", "in 2004", "in 2011", "last summer", "after the storm", "during the festival",
         "before the election", "in early March", "over the weekend", "in the following decade"]
REASONS = ["because of heavy rainfall", "after a public inquiry", "following repeated complaints",
           "despite strong opposition", "to attract more visitors", "as part of a regional plan",
           "amid safety concerns", "with support from private donors"]
EXTRAS = ["according to officials", "officials said", "the report noted", "one witness recalled",
          "a spokesperson confirmed", "critics argued"]
FILLER = ["Water levels rose quickly", "Traffic was diverted for several hours", "Prices increased sharply",
          "Attendance reached a record high", "Several buildings were damaged", "The work took two years",
          "Dozens of people were injured", "Local newspapers covered the event", "The decision was unanimous",
          "Visitors returned within weeks"]
NUMBERS = ["two", "three", "five", "twelve", "forty", "several hundred", "thousands of"]
NOUNS = ["people", "vessels", "families", "workers", "visitors", "houses", "volunteers", "stalls"]
SWAPS = {"announced": "declared", "reported": "said", "approved": "backed", "closed": "shut",
         "residents": "locals", "tourists": "visitors", "funded": "financed", "criticised": "condemned"}


def sentence(rng: random.Random) -> str:
    form = rng.random()
    subj = rng.choice(SUBJECTS)
    if form < 0.45:
        words = [subj, rng.choice(VERBS), rng.choice(OBJECTS), rng.choice(PREPS), rng.choice(LANDMARKS),
                 rng.choice(TIMES)]
        if rng.random() < 0.5:
            words.append(rng.choice(REASONS))
    elif form < 0.7:
        words = [rng.choice(NUMBERS), rng.choice(NOUNS), "were", rng.choice(["moved", "counted", "helped",
                 "registered", "affected"]), rng.choice(PREPS), rng.choice(LANDMARKS), rng.choice(TIMES)]
    elif form < 0.85:
        words = [rng.choice(FILLER), rng.choice(TIMES), rng.choice(EXTRAS)]
    else:
        words = [subj, "said", "that", rng.choice(SUBJECTS), "had", rng.choice(VERBS), rng.choice(OBJECTS),
                 rng.choice(REASONS)]
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def perturb(rng: random.Random, sent: str, drop: float = 0.15) -> str:
    words = sent.rstrip(".").split()
    out = []
    for w in words:
        if rng.random() < drop and len(out) > 2:
            continue
        out.append(SWAPS.get(w, w) if rng.random() < 0.5 else w)
    text = " ".join(out)
    return text[0].upper() + text[1:] + "."


def shuffled(rng: random.Random, sent: str) -> str:
    words = sent.rstrip(".").lower().split()
    rng.shuffle(words)
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def document(rng: random.Random) -> list[str]:
    roll = rng.random()
    if roll < 0.15:
        n = rng.randint(3, 10)
    elif roll < 0.9:
        n = rng.randint(8, 30)
    else:
        n = rng.randint(40, 75)
    return [sentence(rng) for _ in range(n)]


def early_index(rng: random.Random, n: int) -> int:
    i = 0
    while i < n - 1 and rng.random() < 0.45:
        i += 1
    return i


def make_records(rng: random.Random) -> list[dict]:
    records = []
    bodies = []
    for k in range(200):
        title = f"{rng.choice(PLACES)} {rng.choice(KINDS)}"
        path = []
        depth = rng.choices([0, 1, 2], weights=[2, 5, 3])[0]
        if depth:
            top = rng.choice(sorted(SECTIONS))
            path.append(top)
            if depth == 2 and SECTIONS[top]:
                path.append(rng.choice(SECTIONS[top]))
        if bodies and rng.random() < 0.12:
            doc = rng.choice(bodies)
        else:
            doc = document(rng)
            bodies.append(doc)
        kind = rng.random()
        if kind < 0.62:
            picks = sorted({early_index(rng, len(doc)) for _ in range(rng.choice([1, 1, 2]))})
            summary = [perturb(rng, doc[i]) for i in picks]
        elif kind < 0.72:
            picks = sorted(rng.sample(range(len(doc)), min(2, len(doc))))
            summary = [perturb(rng, doc[i], drop=0.05) for i in picks]
        elif kind < 0.86:
            summary = [shuffled(rng, doc[rng.randrange(len(doc))])]
        else:
            summary = [sentence(rng)]
            if rng.random() < 0.5:
                summary = ["Its " + rng.choice(["founder", "owner", "architect"]) + " was born in "
                           + rng.choice(["Ghana", "Peru", "Iceland", "Fiji"]) + "."]
        records.append({
            "article_title": title,
            "section_path": path,
            "statement": " ".join(summary),
            "citation_body": " ".join(doc),
            "source_type": rng.choice(["web", "web", "newspaper", "press", "press_release"]),
            "url": f"https://example.org/{k:04d}",
        })
    # records that ingest must reject
    for k in range(20):
        rec = dict(rng.choice(records))
        if k < 14:
            rec["source_type"] = "other"
        else:
            rec["citation_body"] = "" if k % 2 else "   "
        rec["url"] = f"https://example.org/r{k:03d}"
        records.insert(rng.randrange(len(records) + 1), rec)
    return records


def make_clusters(rng: random.Random) -> list[dict]:
    clusters = []
    for c in range(4):
        place = rng.choice(PLACES)
        docs = [[sentence(rng) for _ in range(rng.randint(10, 25))] for _ in range(rng.randint(3, 5))]
        refs = []
        for _ in range(2):
            ref, words = [], 0
            while words < 120:
                d = rng.randrange(len(docs))
                s = perturb(rng, docs[d][early_index(rng, len(docs[d]))])
                ref.append(s)
                words += len(s.split())
            refs.append(ref)
        clusters.append({
            "cluster_id": f"D{c + 1:03d}",
            "query": [f"{place} harbour", f"What happened at the harbour in {place}?",
                      "Include causes, responses and consequences."],
            "documents": docs,
            "references": refs,
        })
    return clusters


def main():
    rng = random.Random(SEED)
    with (HERE / "raw_records.jsonl").open("w", encoding="utf-8") as f:
        for rec in make_records(rng):
            f.write(json.dumps(rec, sort_keys=True) + "\n")
    with (HERE / "clusters.jsonl").open("w", encoding="utf-8") as f:
        for rec in make_clusters(rng):
            f.write(json.dumps(rec, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
