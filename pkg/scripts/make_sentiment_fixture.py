#!/usr/bin/env python3
"""Regenerate tests/data/sentiment_fixture.jsonl from the reference scorer.

The fixture freezes full-rules reference compounds for 50 utterances; the
sentiment oracle test compares the production scorer against these values.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from affectchat.sentiment import ValenceLexicon
from reference_sentiment import reference_polarity

SENTENCES = [
    "i feel happy today",
    "this has been a wonderful afternoon",
    "the food was really good",
    "i love talking with you",
    "that is great news about your sister",
    "i am so excited for the weekend",
    "my holiday was absolutely amazing",
    "she gave me a lovely welcome",
    "the team played brilliant chess all evening",
    "i am grateful for your help",
    "we had fun at the park with the dog",
    "the concert was truly delightful and the crowd was cheerful",
    "what a pleasant surprise to see you",
    "i feel very proud of my daughter",
    "winning the match felt fantastic",
    "i am sad about the news",
    "my cat has been ill all week",
    "the traffic this morning was terrible",
    "i hate waiting in long queues",
    "that movie was awful and boring",
    "i feel lonely in this new city",
    "the project was a complete failure",
    "he was angry about the broken window",
    "losing my wallet made me miserable",
    "i am worried about the exam tomorrow",
    "the storm caused terrible damage to the village",
    "she was deeply upset after the argument",
    "i dread going to the dentist",
    "the service at that hotel was truly horrible",
    "my back pain has been getting worse",
    "i am not happy with the result",
    "the dinner was not good at all",
    "i do not hate mondays",
    "he is never angry with the students",
    "nothing about this plan feels safe",
    "i can not trust him anymore",
    "she was not sad about leaving",
    "the soup was very good",
    "the lecture was somewhat interesting",
    "the play was slightly boring in the middle",
    "the weather is extremely nice this week",
    "i barely enjoyed the party",
    "the meeting is scheduled for three on tuesday",
    "the train leaves from platform nine",
    "my brother works at the bakery near the station",
    "the printer is on the second floor",
    "she plays chess and reads novels on sundays",
    "the glorp was flurbish and zandy",
    "happy to help even though the task was terrible",
    "the happy child hugged the sad clown",
]


def main() -> None:
    lexicon = ValenceLexicon.bundled()
    out_path = Path(__file__).resolve().parents[1] / "tests" / "data" / "sentiment_fixture.jsonl"
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for text in SENTENCES:
        scores = reference_polarity(text, lexicon)
        lines.append(json.dumps({"text": text, "compound": round(scores["compound"], 6)}))
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {len(lines)} records to {out_path}")


if __name__ == "__main__":
    main()
