#!/usr/bin/env python3
"""Regenerates data/demo_corpus.csv, the bundled 200-document demo corpus.

The texts are synthetic Indonesian-style election tweets assembled from small
word pools. A share of the documents carries cues from the opposite pool or a
negated positive word, so the task is not trivially separable.
"""

import csv
import random
import sys

SEED = 2019

TOPIC = [
    "kpu", "bawaslu", "pemilu", "pilpres", "suara", "rakyat", "tps", "rekap",
    "situng", "data", "petugas", "saksi", "capres", "presiden", "indonesia",
    "demokrasi", "hasil", "input", "formulir", "kotak", "server", "komisioner",
    "pemerintah", "bangsa", "negara", "hitungan", "pemilih", "surat",
]
POSITIVE = [
    "jujur", "bersih", "adil", "transparan", "bagus", "hebat", "mantap",
    "dukung", "percaya", "semangat", "sukses", "lancar", "aman", "damai",
    "bangga", "amanah", "profesional", "netral", "tegas", "apresiasi", "salut",
    "keren", "rapi", "tertib", "setuju", "optimis", "terbaik", "berhasil",
]
NEGATIVE = [
    "curang", "kecurangan", "bohong", "licik", "kacau", "gagal", "rusak",
    "manipulasi", "dicuri", "resah", "kecewa", "marah", "malu", "busuk",
    "bobrok", "tipu", "penipuan", "culas", "zalim", "kejam", "memalukan",
    "parah", "ngawur", "amburadul", "bubarkan", "hancur", "lemah", "mencurigakan",
]
FILLER = [
    "yang", "dan", "di", "ini", "itu", "juga", "sudah", "sangat", "kalau",
    "untuk", "dengan", "kita", "kami", "saja", "lagi", "harus", "semua",
    "benar", "memang", "tolong", "ayo", "kenapa", "mohon", "sekarang",
]
OPENERS = ["", "", "", "@KPU_ID ", "@bawaslu_RI ", "Wah ", "Aduh, ", "Hmm "]
CLOSERS = ["", "", ".", "!", "!!", "?", " #kpujangancurang", " #pemilu2019", " :(", " :)"]

# Rows of the worked evaluation example, with their manual labels.
WORKED = [
    ("kalau terus melanggar, hukumannya segera diterapkan", "positive"),
    ("kalau bersih kenapa takut audit forensic", "negative"),
    ("harus banyak belajar ke @BKNgoid dalam hal penyelenggaraan akbar", "positive"),
    ("Kebenaran meninggikan derajat bangsa tetapi dosa adalah noda bangsa", "positive"),
]


def make_text(rng, label):
    own, other = (POSITIVE, NEGATIVE) if label == "positive" else (NEGATIVE, POSITIVE)
    words = rng.sample(TOPIC, rng.randint(1, 3))
    words += rng.sample(own, rng.randint(1, 2))
    words += rng.sample(FILLER, rng.randint(1, 4))
    roll = rng.random()
    if roll < 0.22:
        words.append(rng.choice(other))
    elif roll < 0.30 and label == "negative":
        words += ["tidak", rng.choice(POSITIVE)]
    elif roll < 0.36 and label == "positive":
        words += ["bukan", rng.choice(NEGATIVE)]
    rng.shuffle(words)
    text = " ".join(words)
    if rng.random() < 0.5:
        text = text.capitalize()
    if rng.random() < 0.25:
        cut = rng.randint(1, len(words) - 1)
        parts = text.split(" ")
        text = " ".join(parts[:cut]) + ", " + " ".join(parts[cut:])
    return rng.choice(OPENERS) + text + rng.choice(CLOSERS)


def main(path):
    rng = random.Random(SEED)
    rows = [(text, label) for text, label in WORKED]
    labels = ["positive"] * 98 + ["negative"] * 98
    rng.shuffle(labels)
    seen = {text for text, _ in rows}
    for label in labels:
        text = make_text(rng, label)
        while text in seen:
            text = make_text(rng, label)
        seen.add(text)
        rows.append((text, label))
    order = list(range(len(rows)))
    rng.shuffle(order)
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["id", "text", "label"])
        for n, i in enumerate(order, start=1):
            writer.writerow([f"t{n:03d}", rows[i][0], rows[i][1]])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/demo_corpus.csv")
