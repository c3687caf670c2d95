"""Independent brute-force oracles.

These deliberately re-derive results with different code paths and data
structures than the library (full DP matrices, quadratic scans, explicit
water-level search) so agreement is meaningful.
"""

from __future__ import annotations

from collections import defaultdict


def chrf_oracle(hyp: str, ref: str, max_order: int = 6, beta: float = 2.0) -> float:
    """Enumerate all n-grams into plain dicts, compute per-order F-beta,
    average over orders where either side has n-grams."""
    hyp = "".join(ch for ch in hyp if not ch.isspace())
    ref = "".join(ch for ch in ref if not ch.isspace())
    if hyp == "" and ref == "":
        return 100.0
    if hyp == "" or ref == "":
        return 0.0
    total_f = 0.0
    used_orders = 0
    for n in range(1, max_order + 1):
        hyp_counts: dict[str, int] = defaultdict(int)
        ref_counts: dict[str, int] = defaultdict(int)
        for i in range(len(hyp) - n + 1):
            hyp_counts[hyp[i : i + n]] += 1
        for i in range(len(ref) - n + 1):
            ref_counts[ref[i : i + n]] += 1
        n_hyp = sum(hyp_counts.values())
        n_ref = sum(ref_counts.values())
        if n_hyp == 0 and n_ref == 0:
            continue
        matched = 0
        for gram, count in hyp_counts.items():
            if gram in ref_counts:
                matched += min(count, ref_counts[gram])
        precision = matched / n_hyp if n_hyp else 0.0
        recall = matched / n_ref if n_ref else 0.0
        if precision + recall == 0:
            f = 0.0
        else:
            b2 = beta * beta
            denom = b2 * precision + recall
            f = (1 + b2) * precision * recall / denom if denom else 0.0
        total_f += f
        used_orders += 1
    return 100.0 * total_f / used_orders if used_orders else 0.0


def edit_distance_oracle(a, b) -> int:
    """Full-matrix Wagner-Fischer."""
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
    return d[m][n]


def virama_fix_oracle(text: str, virama_chars: frozenset[str]) -> str:
    """Character-by-character scan: drop any run of space characters that
    sits immediately before a virama-class character."""
    spaces = {" ", " "}
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in spaces:
            j = i
            while j < n and text[j] in spaces:
                j += 1
            if j < n and text[j] in virama_chars:
                i = j  # drop the run
                continue
            out.append(text[i:j])
            i = j
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def dedup_lines_oracle(docs_lines: list[list[str]]) -> list[list[str]]:
    """Sequential pass with an explicit seen-set, on plain lists."""
    seen = set()
    out = []
    for lines in docs_lines:
        kept = []
        for line in lines:
            key = line.rstrip()
            if key not in seen:
                seen.add(key)
                kept.append(line)
        out.append(kept)
    return out


def token_overlap_oracle(a: list[str], b: list[str]) -> float:
    if not a and not b:
        return 0.0
    b_pool = list(b)
    inter = 0
    for tok in a:
        if tok in b_pool:
            b_pool.remove(tok)
            inter += 1
    return inter / max(len(a), len(b))


def multiway_oracle(records_left, records_right, predicate: str, n: int = 8):
    """Quadratic scan over (lang, text, en_text) tuples; returns the set of
    emitted (src_lang, tgt_lang, src_text, tgt_text)."""

    def ngram_set(text):
        toks = text.split()
        return {tuple(toks[i : i + n]) for i in range(len(toks) - n + 1)}

    out = set()
    for x_lang, x_text, en_l in records_left:
        for y_lang, y_text, en_r in records_right:
            if x_lang == y_lang:
                continue
            exact = en_l == en_r
            shared = bool(ngram_set(en_l) & ngram_set(en_r))
            if (
                (predicate == "exact" and exact)
                or (predicate == "ngram" and shared)
                or (predicate == "both" and (exact or shared))
            ):
                out.add((x_lang, y_lang, x_text, y_text))
    return out


def unimax_oracle(counts: dict[str, int], budget: float, n_epochs: int) -> dict[str, float]:
    """Water-level construction: find L with sum(min(cap, L)) = budget by
    bisection, allocate min(cap, L)."""
    caps = {l: n_epochs * c for l, c in counts.items()}
    total = sum(caps.values())
    if budget >= total:
        return dict(caps)
    lo, hi = 0.0, max(caps.values())
    for _ in range(200):
        mid = (lo + hi) / 2
        if sum(min(c, mid) for c in caps.values()) < budget:
            lo = mid
        else:
            hi = mid
    level = (lo + hi) / 2
    return {l: min(c, level) for l, c in caps.items()}
