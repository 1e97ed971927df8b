"""Line-oriented text formats for systems, graphs and community lists.

Every reader raises :class:`InvalidInput` with the offending line number.
Lines starting with ``#`` and blank lines are ignored, except that
:func:`read_blobmap` looks inside the ``# blobmap`` comment block.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .core import Community, CommunityParams, InvalidInput, RankedSystem, WeightedSystem
from .lifting import SocialGraph
from .multifacet import FacetedSystem
from .weighted import BlobMap

__all__ = [
    "format_number",
    "parse_number",
    "read_ranked",
    "write_ranked",
    "read_weighted",
    "write_weighted",
    "read_faceted",
    "write_faceted",
    "read_graph",
    "write_graph",
    "read_communities",
    "write_communities",
    "params_header",
    "write_reduced",
    "read_blobmap",
    "read_system",
]


def format_number(x) -> str:
    """Exact decimal when ``x`` has a terminating expansion, else 17 significant digits."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d == 1:
        places = max(twos, fives)
        digits = str(abs(x.numerator) * 10**places // x.denominator).rjust(places + 1, "0")
        sign = "-" if x < 0 else ""
        return f"{sign}{digits[:-places]}.{digits[-places:]}".rstrip("0")
    return repr(float(x))


def parse_number(token: str, lineno: int) -> Fraction:
    try:
        value = Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"line {lineno}: {token!r} is not a number") from None
    return value


def _int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InvalidInput(f"line {lineno}: {what} {token!r} is not an integer") from None


def _text(source) -> str:
    # a Path or a newline-free string is a file name; anything else is file content
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        try:
            return Path(source).read_text()
        except OSError as exc:
            raise InvalidInput(f"cannot read {source}: {exc.strerror}") from None
    return source


def _lines(source):
    """``(lineno, stripped)`` for non-blank, non-comment lines of a path or text."""
    text = _text(source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _header(lines, keyword: str):
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise InvalidInput(f"line 1: empty file, expected '{keyword} ...' header") from None
    tokens = line.split()
    if tokens[0] != keyword:
        raise InvalidInput(f"line {lineno}: expected '{keyword}' header, got {tokens[0]!r}")
    return lineno, tokens[1:]


def _size(tokens, lineno, keyword):
    if not tokens:
        raise InvalidInput(f"line {lineno}: '{keyword}' header needs n")
    n = _int(tokens[0], lineno, "n")
    if n < 1:
        raise InvalidInput(f"line {lineno}: n must be positive")
    return n


def _check_id(i: int, n: int, lineno: int):
    if not 0 <= i < n:
        raise InvalidInput(f"line {lineno}: member {i} outside 0..{n - 1}")


def _wrap(lineno, build):
    try:
        return build()
    except InvalidInput as exc:
        raise InvalidInput(f"line {lineno}: {exc}") from None


def read_ranked(source) -> RankedSystem:
    lines = _lines(source)
    lineno, tokens = _header(lines, "ranked")
    n = _size(tokens, lineno, "ranked")
    rankings: list[list[int] | None] = [None] * n
    for lineno, line in lines:
        head, sep, rest = line.partition(":")
        if not sep:
            raise InvalidInput(f"line {lineno}: expected '<i>: <j1> <j2> ...'")
        i = _int(head.strip(), lineno, "member")
        _check_id(i, n, lineno)
        if rankings[i] is not None:
            raise InvalidInput(f"line {lineno}: member {i} listed twice")
        row = [_int(tok, lineno, "member") for tok in rest.split()]
        for j in row:
            _check_id(j, n, lineno)
        if len(set(row)) != len(row):
            raise InvalidInput(f"line {lineno}: member {i} ranks someone twice")
        rankings[i] = row
    return RankedSystem([r or [] for r in rankings], n=n)


def _ranked_text(system: RankedSystem) -> list[str]:
    lines = [f"ranked {system.n}"]
    for i in range(system.n):
        row = system.ranking(i).tolist()
        lines.append(f"{i}:" + "".join(f" {j}" for j in row))
    return lines


def write_ranked(system: RankedSystem, path=None) -> str:
    return _emit(_ranked_text(system), path)


def read_weighted(source) -> WeightedSystem:
    lines = _lines(source)
    lineno, tokens = _header(lines, "weighted")
    n = _size(tokens, lineno, "weighted")
    weights = {}
    for lineno, line in lines:
        tokens = line.split()
        if len(tokens) != 3:
            raise InvalidInput(f"line {lineno}: expected '<i> <j> <w>'")
        i, j = _int(tokens[0], lineno, "member"), _int(tokens[1], lineno, "member")
        _check_id(i, n, lineno)
        _check_id(j, n, lineno)
        w = parse_number(tokens[2], lineno)
        if not 0 <= w <= 1:
            raise InvalidInput(f"line {lineno}: weight {tokens[2]} outside [0, 1]")
        if (i, j) in weights:
            raise InvalidInput(f"line {lineno}: pair ({i}, {j}) given twice")
        weights[(i, j)] = w
    return WeightedSystem(n, weights)


def write_weighted(system: WeightedSystem, path=None) -> str:
    lines = [f"weighted {system.n}"]
    for i in range(system.n):
        for j, w in sorted(system.row(i).items()):
            if w:
                lines.append(f"{i} {j} {format_number(w)}")
    return _emit(lines, path)


def read_faceted(source) -> FacetedSystem:
    lines = _lines(source)
    lineno, tokens = _header(lines, "faceted")
    n = _size(tokens, lineno, "faceted")
    if len(tokens) < 2:
        raise InvalidInput(f"line {lineno}: 'faceted' header needs n and f")
    f = _int(tokens[1], lineno, "f")
    if f < 1:
        raise InvalidInput(f"line {lineno}: f must be positive")
    facets: list[dict[int, list[int]]] = [{} for _ in range(n)]
    for lineno, line in lines:
        head, sep, rest = line.partition(":")
        member, slash, facet = head.strip().partition("/")
        if not sep or not slash:
            raise InvalidInput(f"line {lineno}: expected '<i>/<facet>: <j1> <j2> ...'")
        i, j = _int(member, lineno, "member"), _int(facet, lineno, "facet")
        _check_id(i, n, lineno)
        if not 1 <= j <= f:
            raise InvalidInput(f"line {lineno}: facet {j} outside 1..{f}")
        if j in facets[i]:
            raise InvalidInput(f"line {lineno}: facet {i}/{j} given twice")
        row = [_int(tok, lineno, "member") for tok in rest.split()]
        for x in row:
            _check_id(x, n, lineno)
        if len(set(row)) != len(row):
            raise InvalidInput(f"line {lineno}: facet {i}/{j} ranks someone twice")
        facets[i][j] = row
    rankings = []
    for i, given in enumerate(facets):
        if not given:
            raise InvalidInput(f"member {i} has no facets")
        top = max(given)
        if sorted(given) != list(range(1, top + 1)):
            raise InvalidInput(f"member {i} has gaps in its facet numbering")
        rankings.append([given[j] for j in range(1, top + 1)])
    return FacetedSystem(rankings, f=f)


def write_faceted(system: FacetedSystem, path=None) -> str:
    lines = [f"faceted {system.n} {system.f}"]
    for i in range(system.n):
        for j in range(1, system.facet_counts[i] + 1):
            lines.append(f"{i}/{j}:" + "".join(f" {x}" for x in system.facet(i, j).tolist()))
    return _emit(lines, path)


def read_graph(source) -> SocialGraph:
    lines = _lines(source)
    lineno, tokens = _header(lines, "graph")
    n = _size(tokens, lineno, "graph")
    if len(tokens) < 2 or tokens[1] not in ("directed", "undirected"):
        raise InvalidInput(f"line {lineno}: graph header needs 'directed' or 'undirected'")
    extra = tokens[2:]
    if extra not in ([], ["selfloops"]):
        raise InvalidInput(f"line {lineno}: unexpected header tokens {' '.join(extra)!r}")
    graph = SocialGraph(n, directed=tokens[1] == "directed", selfloops=bool(extra))
    for lineno, line in lines:
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise InvalidInput(f"line {lineno}: expected '<i> <j> [w]'")
        i, j = _int(tokens[0], lineno, "vertex"), _int(tokens[1], lineno, "vertex")
        w = parse_number(tokens[2], lineno) if len(tokens) == 3 else Fraction(1)
        _wrap(lineno, lambda: graph.add_edge(i, j, w))
    return graph


def write_graph(graph: SocialGraph, path=None) -> str:
    header = f"graph {graph.n} {'directed' if graph.directed else 'undirected'}"
    if graph.selfloops:
        header += " selfloops"
    lines = [header]
    for i, j, w in graph.edges():
        if not graph.directed and j < i:
            continue
        if graph.selfloops and i == j and w == 1:
            continue
        lines.append(f"{i} {j}" if w == 1 else f"{i} {j} {format_number(w)}")
    return _emit(lines, path)


def params_header(params: CommunityParams) -> str:
    return (f"communities theta={format_number(params.theta)} "
            f"alpha={format_number(params.alpha)} beta={format_number(params.beta)}")


def write_communities(communities, params: CommunityParams, path=None, planted: bool = False) -> str:
    """One community per line, ascending ids, lines sorted lexicographically."""
    rows = sorted(tuple(sorted(int(x) for x in (c.members if isinstance(c, Community) else c))) for c in communities)
    lines = ["# planted"] if planted else []
    lines.append(params_header(params))
    lines += [" ".join(map(str, row)) for row in rows]
    return _emit(lines, path)


def read_communities(source):
    """Returns ``(params, list of member tuples)``."""
    lines = _lines(source)
    lineno, tokens = _header(lines, "communities")
    values = {}
    for tok in tokens:
        key, eq, val = tok.partition("=")
        if not eq or key not in ("theta", "alpha", "beta"):
            raise InvalidInput(f"line {lineno}: bad header field {tok!r}")
        values[key] = parse_number(val, lineno)
    if set(values) != {"theta", "alpha", "beta"}:
        raise InvalidInput(f"line {lineno}: header needs theta=, alpha= and beta=")
    params = _wrap(lineno, lambda: CommunityParams(values["theta"], values["alpha"], values["beta"]))
    sets = []
    for lineno, line in lines:
        sets.append(tuple(sorted(_int(tok, lineno, "member") for tok in line.split())))
    return params, sets


def write_reduced(system: RankedSystem, blob_map: BlobMap, path=None) -> str:
    """Ranked format preceded by a ``# blobmap`` block listing each member's node range."""
    lines = [f"# blobmap k={blob_map.k} n={blob_map.n}"]
    for s in range(blob_map.n):
        r = blob_map.forward(s)
        lines.append(f"# {s}: {r.start}-{r.stop - 1}")
    lines.append("# end blobmap")
    return _emit(lines + _ranked_text(system), path)


def read_blobmap(source) -> BlobMap:
    text = _text(source)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("# blobmap"):
            fields = dict(tok.split("=", 1) for tok in line.split()[2:] if "=" in tok)
            if "k" not in fields or "n" not in fields:
                raise InvalidInput(f"line {lineno}: blobmap header needs k= and n=")
            return BlobMap(_int(fields["k"], lineno, "k"), _int(fields["n"], lineno, "n"))
    raise InvalidInput("no '# blobmap' block found")


def read_system(source):
    """Dispatch on the header keyword: ranked, weighted, faceted or graph."""
    for lineno, line in _lines(source):
        keyword = line.split()[0]
        readers = {"ranked": read_ranked, "weighted": read_weighted, "faceted": read_faceted,
                   "graph": read_graph}
        if keyword not in readers:
            raise InvalidInput(f"line {lineno}: unknown system type {keyword!r}")
        return readers[keyword](source)
    raise InvalidInput("line 1: empty file")


def _emit(lines, path) -> str:
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
