"""Builds the labeled laziness fixture.

Every pair is constructed so its label follows from how it was built: a
faithful statement-for-statement translation, a translation whose body is cut
short behind a placeholder comment, or one that silently drops most
statements. No detector output is consulted.
"""
import json
import sys

FIELDS = ["len", "cap", "head", "tail", "flags", "count", "mode", "state"]


def c_stmts(n, var="acc"):
    out = []
    for i in range(n):
        k = i % 4
        if k == 0:
            out.append(f"    {var} += v[{i}] * {i + 1};")
        elif k == 1:
            out.append(f"    if ({var} > {100 + i}) {var} -= {i};")
        elif k == 2:
            out.append(f"    {var} ^= v[{i}];")
        else:
            out.append(f"    v[{i}] = {var} & 0xff;")
    return out


def rust_stmts(n, var="acc"):
    out = []
    for i in range(n):
        k = i % 4
        if k == 0:
            out.append(f"    {var} += v[{i}] * {i + 1};")
        elif k == 1:
            out.append(f"    if {var} > {100 + i} {{ {var} -= {i}; }}")
        elif k == 2:
            out.append(f"    {var} ^= v[{i}];")
        else:
            out.append(f"    v[{i}] = {var} & 0xff;")
    return out


def c_fn(name, n):
    body = "\n".join(["    int acc = 0;"] + c_stmts(n) + ["    return acc;"])
    return f"int {name}(int *v)\n{{\n{body}\n}}\n"


def rust_fn(name, stmts, comment_lines=()):
    body = ["    let mut acc: i32 = 0;"] + list(stmts) + [f"    {c}" for c in comment_lines] + ["    acc"]
    return f"pub fn {name}(v: &mut [i32]) -> i32 {{\n" + "\n".join(body) + "\n}\n"


pairs = []


def add(name, c, rust, lazy, why):
    pairs.append({"id": name, "c": c, "rust": rust, "lazy": lazy, "construction": why})


# Faithful translations of every size, some with ordinary comments.
for n in [1, 3, 6, 9, 12, 16, 20, 25, 30, 40, 55, 70]:
    name = f"faithful_{n}"
    add(name, c_fn(name, n), rust_fn(name, rust_stmts(n)), False, "statement-for-statement")
for n, note in [(8, "// mix the input into the accumulator"), (14, "/* keep the low byte only */"),
                (22, "// wrapping is intended here"), (35, "// see the C original for the table layout")]:
    name = f"commented_{n}"
    add(name, c_fn(name, n), rust_fn(name, rust_stmts(n), [note]), False,
        "statement-for-statement with an ordinary comment")

# Short C functions whose Rust is much denser: below the statement floor.
for n in [2, 3, 4, 5]:
    name = f"dense_{n}"
    rust = f"pub fn {name}(v: &mut [i32]) -> i32 {{\n    v.iter().take({n}).sum()\n}}\n"
    add(name, c_fn(name, n), rust, False, "idiomatic rewrite of a short function")

# Moderately condensed but above the ratio threshold.
for n in [20, 30, 50]:
    name = f"condensed_{n}"
    keep = (n * 6 + 9) // 10  # about 60% of the statements survive
    add(name, c_fn(name, n), rust_fn(name, rust_stmts(keep)), False, "merged statements, 60% kept")

# Placeholder comments replacing the tail of the body.
placeholders = [
    "// ... rest of the implementation",
    "// Rest of the function follows the same pattern",
    "/* remaining cases omitted for brevity */",
    "// the remaining fields are handled similarly",
    "// similar to above for the other entries",
    "// OMITTED: bookkeeping",
    "/* ... */",
    "// ...",
    "// REMAINING LOGIC HERE",
    "// code omitted",
    "// Similar To Above",
    "/// rest of the loop body",
]
for i, ph in enumerate(placeholders):
    n = 12 + 4 * i
    keep = n // 2
    name = f"placeholder_{i}"
    add(name, c_fn(name, n), rust_fn(name, rust_stmts(keep), [ph]), True, f"body cut after {keep} of {n}: {ph}")

# A placeholder even when the function is tiny.
add("placeholder_short", c_fn("placeholder_short", 3),
    rust_fn("placeholder_short", rust_stmts(1), ["// rest of the implementation"]), True, "tiny function cut short")

# Silent truncation: most statements dropped, no comment.
for n, keep in [(10, 2), (15, 3), (20, 4), (24, 5), (30, 6), (40, 6), (60, 10), (80, 12)]:
    name = f"truncated_{n}"
    add(name, c_fn(name, n), rust_fn(name, rust_stmts(keep)), True, f"silently kept {keep} of {n} statements")

if len(sys.argv) > 1:
    with open(sys.argv[1], "w") as f:
        json.dump({"pairs": pairs}, f, indent=1)
        f.write("\n")
print(len(pairs), "pairs,", sum(p["lazy"] for p in pairs), "lazy")
