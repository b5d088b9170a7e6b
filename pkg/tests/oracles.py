"""Brute-force reference implementations, kept independent of nereval's code paths."""
from fractions import Fraction


def enumerate_strict_spans(tags):
    """Every (label, i, j) such that tags[i..j] is a complete strict IOB2 entity."""
    spans = set()
    n = len(tags)
    for i in range(n):
        if not tags[i].startswith("B-") or len(tags[i]) == 2:
            continue
        label = tags[i][2:]
        for j in range(i, n):
            if any(tags[k] != "I-" + label for k in range(i + 1, j + 1)):
                break
            if j + 1 == n or tags[j + 1] != "I-" + label:
                spans.add((label, i, j))
    return spans


def _prf(tp, gold_n, pred_n):
    p = Fraction(tp, pred_n) if pred_n else Fraction(0)
    r = Fraction(tp, gold_n) if gold_n else Fraction(0)
    f = 2 * p * r / (p + r) if p + r else Fraction(0)
    return p, r, f


def strict_scores(gold_corpus, pred_corpus):
    """Exact micro/macro/weighted (P, R, F1) as Fractions, via span sets."""
    gold, pred = set(), set()
    for k, (g, p) in enumerate(zip(gold_corpus, pred_corpus)):
        gold |= {(k,) + s for s in enumerate_strict_spans(g)}
        pred |= {(k,) + s for s in enumerate_strict_spans(p)}
    hits = gold & pred
    labels = sorted({s[1] for s in gold | pred})
    per_class = {}
    for label in labels:
        tp = sum(1 for s in hits if s[1] == label)
        gn = sum(1 for s in gold if s[1] == label)
        pn = sum(1 for s in pred if s[1] == label)
        per_class[label] = (_prf(tp, gn, pn), gn)
    micro = _prf(len(hits), len(gold), len(pred))
    if not labels:
        zero = (Fraction(0),) * 3
        return {"micro": zero, "macro": zero, "weighted": zero}
    macro = tuple(sum(v[0][i] for v in per_class.values()) / len(labels) for i in range(3))
    total = sum(v[1] for v in per_class.values())
    weighted = tuple(
        sum(v[0][i] * v[1] for v in per_class.values()) / total if total else Fraction(0)
        for i in range(3)
    )
    return {"micro": micro, "macro": macro, "weighted": weighted}


def token_weighted_f1(gold, pred):
    """Support-weighted F1 over raw tags, every token counted, O included."""
    labels = set(gold) | set(pred)
    total = Fraction(0)
    for label in labels:
        tp = sum(1 for g, p in zip(gold, pred) if g == p == label)
        gn = gold.count(label)
        pn = pred.count(label)
        total += _prf(tp, gn, pn)[2] * gn
    return total / len(gold)


def intersection_oracle(a, b):
    shared = sum(1 for x in a if x in b)
    union = len(a) + len(b) - shared
    return shared, Fraction(shared, len(a)), Fraction(shared, len(b)), Fraction(shared, union)
