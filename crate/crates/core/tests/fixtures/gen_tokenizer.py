"""Regenerates treebank_500.jsonl with NLTK's TreebankWordTokenizer.

    python3 gen_tokenizer.py > treebank_500.jsonl
"""
import json
import random

from nltk.tokenize import TreebankWordTokenizer

BASE = [
    "A man is playing a guitar.",
    "Two dogs don't like the rain, but they're outside anyway.",
    "She said, \"I can't believe it!\"",
    "It costs $3,000 or about 45% of his income.",
    "The U.S. team won (again) in 2019.",
    "Why would you do that?",
    "He's gonna leave soon; we'll see.",
    "I'd rather not -- thanks.",
    "They cannot wait... really.",
    "Lemme know if you wanna go.",
    "'Tis the season, isn't it?",
    "The kids' toys are in the [blue] box.",
    "Email me at joe@example.com #urgent",
    "Wait: 3:30 or 4:15?",
    "You've got mail & more.",
    "\"Quoted\" words at the start.",
    "A woman (in red) {smiles} <warmly>.",
    "I'm sure he'd've known.",
    "It's 5 p.m. now.",
    "Gimme that, gotta run!",
]

SUBJECTS = ["A man", "The woman", "Two kids", "My friend's dog", "They", "He", "She", "The U.K. team",
            "Dr. Smith", "Everyone", "Nobody", "The girls'", "I", "We", "You"]
VERBS = ["is running", "isn't eating", "can't see", "won't go", "'ll sing", "'ve left", "'d say",
         "are n't here", "didn't know", "wanna play", "gotta leave", "cannot swim", "plays", "'re waiting"]
OBJECTS = ["the ball", "a sandwich", "3,000 apples", "$4.50", "50%", "the \"big\" house", "(some) food",
           "[nothing]", "her mother's car", "the end--finally", "it...", "e-mail", "co-workers",
           "the 1990s", "7:45", "#1", "@home", "a <tag>", "{braces}", "tom & jerry"]
ENDS = [".", "!", "?", "...", "", " .", ".\"", ".)", "!'", "?!", ";", ":"]
PREFIXES = ["", "\"", "'", "(", "Yes, ", "Well -- ", "Oh! ", "So: ", "``", "Then, "]


def sentences(rng):
    out = list(BASE)
    while len(out) < 500:
        subj = rng.choice(SUBJECTS)
        verb = rng.choice(VERBS)
        sep = "" if verb.startswith("'") else " "
        s = f"{rng.choice(PREFIXES)}{subj}{sep}{verb} {rng.choice(OBJECTS)}"
        if rng.random() < 0.3:
            s += f", and {rng.choice(SUBJECTS).lower()} {rng.choice(VERBS).lstrip(chr(39))} {rng.choice(OBJECTS)}"
        s += rng.choice(ENDS)
        if s not in out:
            out.append(s)
    return out


def main():
    tok = TreebankWordTokenizer()
    for s in sentences(random.Random(20240501)):
        print(json.dumps({"text": s, "tokens": tok.tokenize(s)}, ensure_ascii=False))


if __name__ == "__main__":
    main()
