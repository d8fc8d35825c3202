#!/usr/bin/env python3
"""Rewrite the bundled domain texts in include/hydraplan/domains.hpp from domains/."""
import pathlib
import re

root = pathlib.Path(__file__).resolve().parent.parent
header = root / "include" / "hydraplan" / "domains.hpp"
text = header.read_text()
for name in ("brick", "zeno"):
    desc = (root / "domains" / f"{name}.h").read_text()
    inst = (root / "domains" / f"{name}.inst").read_text()
    entry = '{"%s", R"hp(%s)hp",\n       R"hp(%s)hp"}' % (name, desc, inst)
    pattern = re.compile(r'\{"%s", R"hp\(.*?\)hp",\n       R"hp\(.*?\)hp"\}' % name, re.S)
    text, n = pattern.subn(lambda _: entry, text)
    assert n == 1, name
header.write_text(text)
