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
"""Regenerates tests/data/cleaning_golden.tsv with a regex implementation of the
cleaning rules (independent of the C++ scanner it checks).

Fields are escaped: backslash-n is a newline, backslash-t a tab, backslash-r a
carriage return, double backslash a backslash.
"""
import re
import sys

URL = re.compile(r"(?:https?://|www\.)\S*")
WS = re.compile(r"[ \t\n\r\f\v]+")
MENTION = re.compile(r"@+[A-Za-z0-9_]+")


def ascii_lower(s):
    return "".join(chr(ord(c) + 32) if "A" <= c <= "Z" else c for c in s)


def clean(text):
    text = ascii_lower(text)
    text = URL.sub("", text)
    text = text.replace("\r\n", " ").replace("\n", " ").replace("\r", " ")
    text = WS.sub(" ", text).strip(" ")
    return MENTION.sub("MENTION", text)


def escape(s):
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")


RAW = [
    "@Jane_Doe You are AMAZING!! https://t.co/xYz",
    "",
    "line1\nline2   end",
    "   leading and trailing   ",
    "Check www.example.com/path?q=1 now",
    "HTTP://SHOUTY.EXAMPLE/X is gone",
    "two urls http://a.b/c and https://d.e/f done",
    "@a @b_c @D9 hello",
    "email me at jane@example.com",
    "tabs\tand\r\ncrlf\n\nlines",
    "@@double at",
    "MENTION already tagged",
    "nothing to do here",
    "UPPER CASE ONLY",
    "caf\u00e9 Cr\u00e8me @Fran\u00e7ois",
    "http://",
    "@user_name_that_is_long: thanks!",
    "multiple     spaces\t\t\ttabs",
    "wwwdot is not a url but www. is",
    "end with mention @Last",
]


def main():
    out = sys.stdout
    for raw in RAW:
        out.write(f"{escape(raw)}\t{escape(clean(raw))}\n")


if __name__ == "__main__":
    main()
