from typing import Iterable, Optional, Union


def redgreen(ok: bool) -> str:
    if ok:
        return "green"
    return "red"


def okfmt(ok: bool) -> str:
    rg = redgreen(ok)
    return f"[{rg}]{'pass' if ok else 'FAIL'}[/{rg}]"


def ifmt(amount: Optional[int], expected: Optional[int] = None) -> str:
    if amount is None:
        return ""
    if expected is None:
        return f"{amount:,d}"
    rg = redgreen(amount == expected)
    return f"[{rg}]{amount:,d}[/{rg}]"


def sfmt(seconds: Union[int, float]) -> str:
    if seconds < 1:
        return f"{seconds * 1000:.0f} ms"
    return f"{seconds:.2f} s"


def setfmt(items: Iterable[object]) -> str:
    """Render a collection as {a, b, c}, or the empty-set sign."""
    texts = [str(item) for item in items]
    if not texts:
        return "∅"
    return "{" + ", ".join(texts) + "}"


def polyfmt(coefficients: Iterable[int], var: str = "q") -> str:
    terms = []
    for degree, c in enumerate(coefficients):
        if c == 0:
            continue
        if degree == 0:
            terms.append(f"{c}")
        elif degree == 1:
            terms.append(f"{c}{var}" if c != 1 else var)
        else:
            terms.append(f"{c}{var}^{degree}" if c != 1 else f"{var}^{degree}")
    return " + ".join(terms) or "0"
