#!/usr/bin/env python3
"""Generate the synthetic Python fixture corpora used by the test suites.

Outputs (relative to --out):
  corpus/      250 files, 500 functions (training corpus for both stages)
  heldout/     NL2Code search set: queries.jsonl, candidates.jsonl, relevance.jsonl
  code2code/   problem-grouped solutions: groups.jsonl
  appendix/    the postorder-traversal listing

The generator is deterministic; rerunning it reproduces identical bytes.
"""

import argparse
import json
import os
import random

NOUNS = [
    ("prices", "price"), ("scores", "score"), ("users", "user"),
    ("orders", "order"), ("files", "file"), ("words", "word"),
    ("records", "record"), ("events", "event"), ("tokens", "token"),
    ("items", "item"), ("grades", "grade"), ("temperatures", "temperature"),
    ("distances", "distance"), ("salaries", "salary"), ("messages", "message"),
    ("packets", "packet"), ("votes", "vote"), ("sensors", "sensor"),
    ("accounts", "account"), ("books", "book"), ("weights", "weight"),
    ("samples", "sample"),
]


def op_sum(p, s, r):
    body = [f"total = 0", f"for {s} in {p}:", f"    total += {s}"]
    return ("total", f"Compute the total of all {p}.", body, "total")


def op_mean(p, s, r):
    body = [f"if not {p}:", f"    return 0.0", f"count = len({p})",
            f"acc = sum({p})", f"mean_{s} = acc / count"]
    return ("mean", f"Calculate the average of the {p}.", body, f"mean_{s}")


def op_max(p, s, r):
    body = [f"best = None", f"for {s} in {p}:",
            f"    if best is None or {s} > best:", f"        best = {s}"]
    return ("largest", f"Find the largest of the given {p}.", body, "best")


def op_min(p, s, r):
    body = [f"lowest = {p}[0]", f"for {s} in {p}[1:]:",
            f"    if {s} < lowest:", f"        lowest = {s}"]
    return ("smallest", f"Find the smallest value among the {p}.", body, "lowest")


def op_count_pos(p, s, r):
    body = [f"positive = 0", f"for {s} in {p}:", f"    if {s} > 0:",
            f"        positive += 1"]
    return ("count_positive", f"Count how many {p} are positive.", body, "positive")


def op_filter(p, s, r):
    body = [f"kept = []", f"for {s} in {p}:", f"    if {s} >= threshold:",
            f"        kept.append({s})"]
    return ("above_threshold", f"Keep only the {p} above a threshold.", body, "kept",
            ["threshold"])


def op_sort(p, s, r):
    body = [f"ordered = list({p})", "ordered.sort()"]
    if r.random() < 0.5:
        body.append("ordered = [value for value in ordered]")
    return ("sorted", f"Sort the {p} in ascending order.", body, "ordered")


def op_reverse(p, s, r):
    body = [f"backwards = []", f"for {s} in {p}:", f"    backwards.insert(0, {s})"]
    return ("reversed", f"Reverse the order of the {p}.", body, "backwards")


def op_unique(p, s, r):
    body = ["seen = set()", "distinct = []", f"for {s} in {p}:",
            f"    if {s} not in seen:", f"        seen.add({s})",
            f"        distinct.append({s})"]
    return ("unique", f"Remove duplicate {p} while keeping order.", body, "distinct")


def op_group(p, s, r):
    body = ["groups = {}", f"for {s} in {p}:", f"    bucket = key_fn({s})",
            f"    groups.setdefault(bucket, []).append({s})"]
    return ("group", f"Group the {p} by a key function.", body, "groups", ["key_fn"])


def op_index(p, s, r):
    body = [f"position = -1", f"for index, {s} in enumerate({p}):",
            f"    if {s} == target:", "        position = index", "        break"]
    return ("index_of", f"Locate the position of a target among the {p}.", body,
            "position", ["target"])


def op_normalize(p, s, r):
    body = [f"norm = sum(abs({s}) for {s} in {p}) or 1.0",
            f"unit_{p} = [{s} / norm for {s} in {p}]"]
    return ("normalized", f"Normalize the {p} so they sum to one.", body, f"unit_{p}")


def op_scale(p, s, r):
    body = [f"scaled = []", f"for {s} in {p}:", f"    scaled.append({s} * factor)"]
    return ("scaled", f"Multiply each of the {p} by a factor.", body, "scaled", ["factor"])


def op_clip(p, s, r):
    body = [f"clipped = []", f"for {s} in {p}:",
            f"    clipped.append(min(max({s}, low), high))"]
    return ("clipped", f"Clip the {p} into a closed range.", body, "clipped",
            ["low", "high"])


def op_topk(p, s, r):
    body = [f"ranked = sorted({p}, reverse=True)", "head = ranked[:k]"]
    return ("top", f"Select the k highest {p}.", body, "head", ["k"])


def op_join(p, s, r):
    body = [f"parts = [str({s}) for {s} in {p}]", "text = separator.join(parts)"]
    return ("joined", f"Join the {p} into a single string.", body, "text",
            ["separator"])


def op_occurrences(p, s, r):
    body = ["counts = {}", f"for {s} in {p}:",
            f"    counts[{s}] = counts.get({s}, 0) + 1"]
    return ("frequencies", f"Count occurrences of each of the {p}.", body, "counts")


def op_running(p, s, r):
    body = ["running = []", "acc = 0", f"for {s} in {p}:", f"    acc += {s}",
            "    running.append(acc)"]
    return ("cumulative", f"Build the running total of the {p}.", body, "running")


def op_diffs(p, s, r):
    body = ["steps = []", f"for left, right in zip({p}, {p}[1:]):",
            "    steps.append(right - left)"]
    return ("differences", f"Compute differences between consecutive {p}.", body,
            "steps")


def op_merge(p, s, r):
    body = [f"combined = list({p})", "for extra in other:",
            "    combined.append(extra)", "combined.sort()"]
    return ("merged", f"Merge two collections of {p} into one sorted list.", body,
            "combined", ["other"])


def op_all(p, s, r):
    body = ["ok = True", f"for {s} in {p}:", f"    if not predicate({s}):",
            "        ok = False", "        break"]
    return ("all_match", f"Check whether every one of the {p} satisfies a predicate.",
            body, "ok", ["predicate"])


def op_any(p, s, r):
    body = ["found = False", f"for {s} in {p}:", f"    if predicate({s}):",
            "        found = True", "        break"]
    return ("any_match", f"Check whether any of the {p} satisfies a predicate.",
            body, "found", ["predicate"])


def op_median(p, s, r):
    body = [f"ordered = sorted({p})", "middle = len(ordered) // 2",
            "if len(ordered) % 2 == 0:",
            "    center = (ordered[middle - 1] + ordered[middle]) / 2",
            "else:", "    center = ordered[middle]"]
    return ("median", f"Compute the median of the {p}.", body, "center")


def op_range(p, s, r):
    body = [f"high = max({p})", f"low = min({p})", "spread = high - low"]
    return ("spread", f"Measure the spread between the largest and smallest {p}.",
            body, "spread")


def op_chunks(p, s, r):
    body = ["batches = []", f"for start in range(0, len({p}), size):",
            f"    batches.append({p}[start:start + size])"]
    return ("batches", f"Split the {p} into chunks of a fixed size.", body, "batches",
            ["size"])


OPS = [op_sum, op_mean, op_max, op_min, op_count_pos, op_filter, op_sort,
       op_reverse, op_unique, op_group, op_index, op_normalize, op_scale, op_clip,
       op_topk, op_join, op_occurrences, op_running, op_diffs, op_merge, op_all,
       op_any, op_median, op_range, op_chunks]

EXTRA_SENTENCES = [
    "The input is not modified.",
    "Runs in linear time.",
    "See https://example.org/docs for background.",
    ":param data: the input collection",
    "Returns a new object.",
    "",
]

COMMENTS = [
    "# walk through the input once",
    "# accumulate the result",
    "# TODO: handle generators lazily",
    "",
]


def render(op, plural, singular, r, docstring=True, oneliner=False, russian=False):
    spec = op(plural, singular, r)
    stem, summary, body, result = spec[:4]
    extra_args = spec[4] if len(spec) > 4 else []
    name = f"{stem}_{plural}" if r.random() < 0.7 else f"get_{stem}_{plural}"
    args = ", ".join([plural] + extra_args)
    lines = [f"def {name}({args}):"]
    if docstring:
        text = summary
        if russian:
            text = "Вычисляет значение для набора данных."
        more = r.choice(EXTRA_SENTENCES)
        if more:
            lines.append(f'    """{text}\n\n    {more}\n    """')
        else:
            lines.append(f'    """{text}"""')
    if oneliner:
        lines.append(f"    return list({plural})")
        return name, summary, "\n".join(lines) + "\n"
    comment = r.choice(COMMENTS)
    if comment:
        lines.append("    " + comment)
    for b in body:
        lines.append("    " + b)
    lines.append(f"    return {result}")
    return name, summary, "\n".join(lines) + "\n"


def render_method_class(plural, singular, r):
    cls = singular.capitalize() + "Store"
    src = [
        f"class {cls}:",
        f'    """Container that keeps {plural} in memory."""',
        "",
        "    def __init__(self, capacity):",
        "        self.capacity = capacity",
        f"        self.{plural} = []",
        "",
        f"    def add(self, {singular}):",
        f'        """Append one {singular} if capacity allows."""',
        f"        if len(self.{plural}) >= self.capacity:",
        "            return False",
        f"        self.{plural}.append({singular})",
        "        return True",
    ]
    return "\n".join(src) + "\n"


def build_corpus(out, r):
    combos = [(op, n) for op in OPS for n in NOUNS]
    r.shuffle(combos)
    train, held = combos[:500], combos[500:550]
    corpus_dir = os.path.join(out, "corpus")
    os.makedirs(corpus_dir, exist_ok=True)
    for i in range(250):
        chunks = ["import math", ""]
        for j in range(2):
            idx = 2 * i + j
            op, (plural, singular) = train[idx]
            docstring = idx % 10 != 3
            oneliner = idx % 25 == 7
            russian = idx % 97 == 11
            _, _, text = render(op, plural, singular, r, docstring, oneliner, russian)
            chunks.append(text)
        if i % 25 == 0:
            chunks.append(render_method_class(*train[2 * i][1], r))
        with open(os.path.join(corpus_dir, f"mod_{i:03d}.py"), "w") as f:
            f.write("\n\n".join(c.rstrip("\n") for c in chunks if c is not None) + "\n")
    return held


def strip_docstring(src):
    lines = src.split("\n")
    out, skipping = [], False
    for k, line in enumerate(lines):
        if k == 1 and line.strip().startswith('"""'):
            skipping = not (line.strip().endswith('"""') and len(line.strip()) > 3)
            continue
        if skipping:
            if line.strip().endswith('"""'):
                skipping = False
            continue
        out.append(line)
    return "\n".join(out)


def build_heldout(out, held, r):
    d = os.path.join(out, "heldout")
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "queries.jsonl"), "w") as q, \
            open(os.path.join(d, "candidates.jsonl"), "w") as c, \
            open(os.path.join(d, "relevance.jsonl"), "w") as rel:
        for k, (op, (plural, singular)) in enumerate(held):
            _, summary, text = render(op, plural, singular, r)
            q.write(json.dumps({"qid": f"q{k}", "text": summary}) + "\n")
            c.write(json.dumps({"cid": f"c{k}", "code": strip_docstring(text)}) + "\n")
            rel.write(json.dumps({"qid": f"q{k}", "relevant": [f"c{k}"]}) + "\n")


def build_code2code(out, r):
    d = os.path.join(out, "code2code")
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "groups.jsonl"), "w") as g:
        for p in range(30):
            op = OPS[p % len(OPS)]
            size = 1 if p == 29 else 2 + (p % 4)
            sols = []
            for k in range(size):
                plural, singular = NOUNS[(p * 3 + k) % len(NOUNS)]
                _, _, text = render(op, plural, singular, r)
                sols.append({"id": f"p{p}_s{k}", "code": strip_docstring(text)})
            g.write(json.dumps({"problem": f"p{p}", "solutions": sols}) + "\n")


APPENDIX = """class Node:
  def __init__(self, v):
    self.data = v
    self.left = None
    self.right = None

# Function to print postorder traversal
def printPostorder(node):
  if node == None:
    return

  # First recur on the left subtree
  printPostorder(node.left)

  # Then recur on the right subtree
  printPostorder(node.right)

  # Now deal with the node
  print(node.data, end=' ')
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..",
                                                  "tests", "fixtures"))
    ap.add_argument("--seed", type=int, default=20240601)
    args = ap.parse_args()
    r = random.Random(args.seed)
    held = build_corpus(args.out, r)
    build_heldout(args.out, held, r)
    build_code2code(args.out, r)
    os.makedirs(os.path.join(args.out, "appendix"), exist_ok=True)
    with open(os.path.join(args.out, "appendix", "postorder.py"), "w") as f:
        f.write(APPENDIX)


if __name__ == "__main__":
    main()
