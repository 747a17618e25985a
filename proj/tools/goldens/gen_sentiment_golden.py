#!/usr/bin/env python3
# Copyright 2026 The Counterbot Authors. All Rights Reserved.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates tests/data/sentiment_golden.tsv from the reference VADER package.

    pip install vaderSentiment==3.3.2
    python3 tools/goldens/gen_sentiment_golden.py > tests/data/sentiment_golden.tsv

Columns: text, neg, neu, pos, compound (as printed by polarity_scores).
"""
import sys

from vaderSentiment.vaderSentiment import SentimentIntensityAnalyzer

SENTENCES = [
    "VADER is smart, handsome, and funny.",
    "VADER is smart, handsome, and funny!",
    "VADER is very smart, handsome, and funny.",
    "VADER is VERY SMART, handsome, and FUNNY.",
    "VADER is VERY SMART, handsome, and FUNNY!!!",
    "VADER is VERY SMART, uber handsome, and FRIGGIN FUNNY!!!",
    "VADER is not smart, handsome, nor funny.",
    "The book was good.",
    "At least it isn't a horrible book.",
    "The book was only kind of good.",
    "The plot was good, but the characters are uncompelling and the dialog is not great.",
    "Today SUX!",
    "Today only kinda sux! But I'll get by, lol",
    "Make sure you :) or :D today!",
    "Not bad at all",
    "Sentiment analysis has never been good.",
    "Sentiment analysis has never been this good!",
    "Most automated sentiment analysis tools are shit.",
    "With VADER, sentiment analysis is the shit!",
    "Other sentiment analysis tools can be quite bad.",
    "On the other hand, VADER is quite bad ass",
    "VADER is such a badass!",
    "Without a doubt, excellent idea.",
    "Roger Dodger is one of the most compelling variations on this theme.",
    "Roger Dodger is at least compelling as a variation on the theme.",
    "Roger Dodger is one of the least compelling variations on this theme.",
    "Not such a badass after all.",
    "MENTION you are amazing!!",
    "MENTION you are a disgrace and should resign",
    "MENTION go back to the kitchen, nobody wants you here",
    "MENTION thank you for standing up for our community",
    "MENTION you are a liar and a fraud",
    "MENTION i hate everything you stand for!!!!",
    "MENTION what a stupid, stupid idea??",
    "MENTION is this really the best you can do???",
    "MENTION no one will ever vote for you",
    "MENTION great debate performance tonight, well done",
    "MENTION not good enough, not even close",
    "MENTION you are not terrible but you are not great either",
    "MENTION your policies are kind of disappointing",
    "MENTION such a pathetic excuse for a leader",
    "MENTION absolutely brilliant speech, so inspiring",
    "MENTION this is a joke. you are a joke.",
    "MENTION i don't trust you at all",
    "MENTION never so happy to see a candidate win",
    "MENTION you should be ashamed",
    "the the the",
    "MENTION 😁 proud of you",
    "MENTION the town hall is at 7pm on main street",
    "MENTION I LOVE this plan but I HATE the timing!",
]


def main():
    analyzer = SentimentIntensityAnalyzer()
    out = sys.stdout
    out.write("text\tneg\tneu\tpos\tcompound\n")
    for s in SENTENCES:
        assert "\t" not in s and "\n" not in s
        v = analyzer.polarity_scores(s)
        out.write(f"{s}\t{v['neg']}\t{v['neu']}\t{v['pos']}\t{v['compound']}\n")


if __name__ == "__main__":
    main()
