"""Text format (`.pkb`) for authoring knowledge bases.

Grammar (whitespace-insensitive, `#` comments to end of line):

    document   = { kb_header | symptom_decl | disease_decl | utilities_decl }
    kb_header  = "kb" string "version" string
    symptom_decl = "symptom" ident [string] "{" { "base" sex curve } "}"
    disease_decl = "disease" ident [string] "{"
                     { "prior" sex curve | "cycle" curve | node | "direct" ident curve }
                   "}"
    node       = ("pathstate" ident | "symptom" ident) "{" "link" curve { node } "}"
    utilities_decl = "utilities" "{" { ident "{" "symptomatic" number "operation" number "}" } "}"
    curve      = "{" point { point } "}"
    point      = "(" number "," number ")"
    sex        = "male" | "female"

Numbers are plain decimals (no exponents); identifiers are
[A-Za-z_][A-Za-z0-9_]*; labels are optional quoted strings defaulting to the
id.  The parser recovers at declaration boundaries to report as many
problems as it can, and every diagnostic carries a source span.  The
serializer emits a canonical form (2-space indent, fixed field order,
shortest round-tripping decimals) so serialize(parse(x)) is a fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from .kb_model import (
    AGE_DOMAIN,
    CYCLE_DOMAIN,
    DISEASE_ROOT,
    LINK_TIME_DOMAIN,
    PATHSTATE,
    SEXES,
    SYMPTOM_REF,
    CausalNode,
    Curve,
    DiseaseDef,
    KnowledgeBase,
    SymptomDef,
    UtilityTable,
)

ERROR = "error"
WARNING = "warning"

_TOP_KEYWORDS = ("kb", "symptom", "disease", "utilities")


@dataclass(frozen=True)
class SourceSpan:
    start_line: int
    start_col: int
    end_line: int
    end_col: int
    start_offset: int  # byte offsets into the UTF-8 input
    end_offset: int

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}"


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    message: str
    span: SourceSpan

    def __str__(self) -> str:
        return f"{self.span}: {self.severity}: {self.message}"


@dataclass
class ParseResult:
    kb: KnowledgeBase | None
    diagnostics: list[ParseDiagnostic]

    @property
    def ok(self) -> bool:
        return self.kb is not None

    @property
    def errors(self) -> list[ParseDiagnostic]:
        return [d for d in self.diagnostics if d.severity == ERROR]


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT NUMBER STRING LBRACE RBRACE LPAREN RPAREN COMMA EOF
    text: str
    span: SourceSpan
    value: float | str | None = None


def _is_ident_start(c: str) -> bool:
    return c.isascii() and (c.isalpha() or c == "_")


def _is_ident(c: str) -> bool:
    return c.isascii() and (c.isalnum() or c == "_")


def _is_digit(c: str) -> bool:
    return "0" <= c <= "9"  # ASCII only; str.isdigit also accepts e.g. superscripts


class _Lexer:
    def __init__(self, text: str, diags: list[ParseDiagnostic]):
        self.text = text
        self.diags = diags
        self.i = 0
        self.line = 1
        self.col = 1
        self.byte = 0

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            c = self.text[self.i]
            self.byte += len(c.encode("utf-8"))
            if c == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.i += 1

    def _mark(self):
        return (self.line, self.col, self.byte)

    def _span(self, mark) -> SourceSpan:
        return SourceSpan(mark[0], mark[1], self.line, self.col, mark[2], self.byte)

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        text = self.text
        while self.i < len(text):
            c = text[self.i]
            if c in " \t\r\n":
                self._advance()
                continue
            if c == "#":
                while self.i < len(text) and text[self.i] != "\n":
                    self._advance()
                continue
            mark = self._mark()
            if c in "{}(),":
                kind = {"{": "LBRACE", "}": "RBRACE", "(": "LPAREN", ")": "RPAREN", ",": "COMMA"}[c]
                self._advance()
                out.append(_Token(kind, c, self._span(mark)))
                continue
            if _is_ident_start(c):
                start = self.i
                while self.i < len(text) and _is_ident(text[self.i]):
                    self._advance()
                word = text[start:self.i]
                out.append(_Token("IDENT", word, self._span(mark)))
                continue
            if _is_digit(c) or (c == "-" and self.i + 1 < len(text) and _is_digit(text[self.i + 1])):
                start = self.i
                if c == "-":
                    self._advance()
                while self.i < len(text) and _is_digit(text[self.i]):
                    self._advance()
                if (
                    self.i + 1 < len(text)
                    and text[self.i] == "."
                    and _is_digit(text[self.i + 1])
                ):
                    self._advance()
                    while self.i < len(text) and _is_digit(text[self.i]):
                        self._advance()
                word = text[start:self.i]
                out.append(_Token("NUMBER", word, self._span(mark), value=float(word)))
                continue
            if c == '"':
                self._advance()
                chars: list[str] = []
                closed = False
                while self.i < len(text):
                    ch = text[self.i]
                    if ch == "\n":
                        break
                    if ch == '"':
                        self._advance()
                        closed = True
                        break
                    if ch == "\\" and self.i + 1 < len(text):
                        esc = text[self.i + 1]
                        mapped = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                        if mapped is not None:
                            chars.append(mapped)
                            self._advance(2)
                            continue
                    chars.append(ch)
                    self._advance()
                span = self._span(mark)
                if not closed:
                    self.diags.append(ParseDiagnostic(ERROR, "unterminated string", span))
                out.append(_Token("STRING", text[mark[2]:], span, value="".join(chars)))
                continue
            self._advance()
            self.diags.append(
                ParseDiagnostic(ERROR, f"unexpected character {c!r}", self._span(mark))
            )
        eof = SourceSpan(self.line, self.col, self.line, self.col, self.byte, self.byte)
        out.append(_Token("EOF", "", eof))
        return out


@dataclass
class _DiseaseDraft:
    id: str
    label: str
    span: SourceSpan
    priors: dict[str, Curve] = field(default_factory=dict)
    cycle: Curve | None = None
    cycle_span: SourceSpan | None = None
    children: list[tuple[Curve, CausalNode]] = field(default_factory=list)
    direct: dict[str, Curve] = field(default_factory=dict)
    node_ids: dict[str, SourceSpan] = field(default_factory=dict)
    sym_refs: list[tuple[str, SourceSpan]] = field(default_factory=list)
    sym_refs_direct: list[tuple[str, SourceSpan]] = field(default_factory=list)


class _Parser:
    def __init__(self, tokens: list[_Token], diags: list[ParseDiagnostic]):
        self.toks = tokens
        self.pos = 0
        self.diags = diags
        self.name: str | None = None
        self.version: str | None = None
        self.header_span: SourceSpan | None = None
        self.symptoms: list[SymptomDef] = []
        self.symptom_spans: dict[str, SourceSpan] = {}
        self.diseases: list[_DiseaseDraft] = []
        self.utilities: dict[tuple[str, str], float] | None = None
        self.utilities_span: SourceSpan | None = None
        self.utility_rows: dict[str, SourceSpan] = {}

    # --- token plumbing -------------------------------------------------
    def cur(self) -> _Token:
        return self.toks[self.pos]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.cur()
        return t.kind == kind and (text is None or t.text == text)

    def at_word(self, *words: str) -> bool:
        t = self.cur()
        return t.kind == "IDENT" and t.text in words

    def eat(self) -> _Token:
        t = self.cur()
        if t.kind != "EOF":
            self.pos += 1
        return t

    def error(self, message: str, span: SourceSpan | None = None) -> None:
        self.diags.append(ParseDiagnostic(ERROR, message, span or self.cur().span))

    def warn(self, message: str, span: SourceSpan | None = None) -> None:
        self.diags.append(ParseDiagnostic(WARNING, message, span or self.cur().span))

    def expect(self, kind: str, what: str) -> _Token | None:
        if self.at(kind):
            return self.eat()
        self.error(f"expected {what}, found {self.cur().text or self.cur().kind!r}")
        return None

    def expect_word(self, word: str) -> _Token | None:
        if self.at_word(word):
            return self.eat()
        self.error(f"expected '{word}', found {self.cur().text or self.cur().kind!r}")
        return None

    def _sync(self, *, to_top: bool) -> None:
        # Panic-mode recovery: skip to a plausible restart point.
        depth = 0
        while not self.at("EOF"):
            t = self.cur()
            if t.kind == "LBRACE":
                depth += 1
            elif t.kind == "RBRACE":
                if depth == 0:
                    if not to_top:
                        return
                    self.eat()
                    continue
                depth -= 1
            elif depth <= 0 and t.kind == "IDENT" and t.text in _TOP_KEYWORDS:
                return
            self.eat()

    # --- grammar --------------------------------------------------------
    def parse_document(self) -> None:
        while not self.at("EOF"):
            if self.at_word("kb"):
                self.parse_header()
            elif self.at_word("symptom"):
                self.parse_symptom()
            elif self.at_word("disease"):
                self.parse_disease()
            elif self.at_word("utilities"):
                self.parse_utilities()
            else:
                self.error(
                    f"expected a declaration (kb, symptom, disease, utilities), "
                    f"found {self.cur().text or self.cur().kind!r}"
                )
                self.eat()
                self._sync(to_top=True)
        self.post_checks()

    def parse_header(self) -> None:
        kw = self.eat()
        if self.header_span is not None:
            self.error("duplicate kb header", kw.span)
        name = self.expect("STRING", "the knowledge base name as a string")
        self.expect_word("version")
        version = self.expect("STRING", "a version string")
        if name is not None:
            self.name = str(name.value)
        if version is not None:
            self.version = str(version.value)
        self.header_span = kw.span

    def parse_curve(self, domain: tuple[float, float], what: str) -> Curve | None:
        if self.expect("LBRACE", f"'{{' opening the {what} curve") is None:
            self._sync(to_top=False)
            return None
        points: list[tuple[float, float]] = []
        prev_x: float | None = None
        while self.at("LPAREN"):
            self.eat()
            xtok = self.expect("NUMBER", "a curve x value")
            self.expect("COMMA", "','")
            ptok = self.expect("NUMBER", "a probability")
            self.expect("RPAREN", "')'")
            if xtok is None or ptok is None:
                self._sync(to_top=False)
                break
            x, p = float(xtok.value), float(ptok.value)
            lo, hi = domain
            if not lo <= x <= hi:
                self.error(f"{what} x value {xtok.text} outside [{_fmt_num(lo)}, {_fmt_num(hi)}]", xtok.span)
            if prev_x is not None and x <= prev_x:
                self.error(f"{what} x values must be strictly increasing", xtok.span)
            if not 0.0 <= p <= 1.0:
                self.error(f"probability {ptok.text} outside [0, 1]", ptok.span)
            prev_x = x
            points.append((x, p))
        if not points:
            self.error(f"{what} curve needs at least one (x, p) point")
        self.expect("RBRACE", f"'}}' closing the {what} curve")
        return Curve(tuple(points)) if points else None

    def parse_symptom(self) -> None:
        self.eat()
        ident = self.expect("IDENT", "a symptom id")
        if ident is None:
            self._sync(to_top=True)
            return
        label = str(self.eat().value) if self.at("STRING") else ident.text
        if ident.text in self.symptom_spans:
            self.error(f"duplicate symptom id '{ident.text}'", ident.span)
        if self.expect("LBRACE", "'{'") is None:
            self._sync(to_top=True)
            return
        base: dict[str, Curve] = {}
        while self.at_word("base"):
            self.eat()
            sex = self.expect("IDENT", "a sex (male or female)")
            if sex is None:
                self._sync(to_top=False)
                break
            if sex.text not in SEXES:
                self.error(f"unknown sex '{sex.text}'", sex.span)
            elif sex.text in base:
                self.error(f"duplicate base rate for {sex.text}", sex.span)
            c = self.parse_curve(AGE_DOMAIN, "base rate")
            if c is not None and sex.text in SEXES:
                base[sex.text] = c
        for sex in SEXES:
            if sex not in base:
                self.error(f"symptom '{ident.text}' is missing a {sex} base rate", ident.span)
        self.expect("RBRACE", "'}' closing the symptom")
        self.symptom_spans[ident.text] = ident.span
        self.symptoms.append(SymptomDef(id=ident.text, label=label, base_rate=base))

    def parse_disease(self) -> None:
        self.eat()
        ident = self.expect("IDENT", "a disease id")
        if ident is None:
            self._sync(to_top=True)
            return
        label = str(self.eat().value) if self.at("STRING") else ident.text
        if any(d.id == ident.text for d in self.diseases):
            self.error(f"duplicate disease id '{ident.text}'", ident.span)
        draft = _DiseaseDraft(id=ident.text, label=label, span=ident.span)
        draft.node_ids[ident.text] = ident.span  # the root carries the disease id
        if self.expect("LBRACE", "'{'") is None:
            self._sync(to_top=True)
            return
        while True:
            if self.at_word("prior"):
                self.eat()
                sex = self.expect("IDENT", "a sex (male or female)")
                if sex is None:
                    self._sync(to_top=False)
                    continue
                if sex.text not in SEXES:
                    self.error(f"unknown sex '{sex.text}'", sex.span)
                elif sex.text in draft.priors:
                    self.error(f"duplicate prior for {sex.text}", sex.span)
                c = self.parse_curve(AGE_DOMAIN, "prior")
                if c is not None and sex.text in SEXES:
                    draft.priors[sex.text] = c
            elif self.at_word("cycle"):
                kw = self.eat()
                if draft.cycle is not None:
                    self.error("duplicate cycle curve", kw.span)
                draft.cycle = self.parse_curve(CYCLE_DOMAIN, "cycle weight")
                draft.cycle_span = kw.span
            elif self.at_word("pathstate", "symptom"):
                child = self.parse_node(draft)
                if child is not None:
                    draft.children.append(child)
            elif self.at_word("direct"):
                self.eat()
                sym = self.expect("IDENT", "a symptom id")
                c = self.parse_curve(LINK_TIME_DOMAIN, "direct likelihood")
                if sym is not None:
                    if sym.text in draft.direct:
                        self.error(f"duplicate direct likelihood for '{sym.text}'", sym.span)
                    draft.sym_refs_direct.append((sym.text, sym.span))
                    if c is not None:
                        draft.direct[sym.text] = c
            elif self.at("RBRACE"):
                self.eat()
                break
            elif self.at("EOF"):
                self.error("unexpected end of input inside disease block")
                break
            else:
                self.error(
                    "expected prior, cycle, pathstate, symptom, direct, or '}' "
                    f"in disease block, found {self.cur().text or self.cur().kind!r}"
                )
                self.eat()
                self._sync(to_top=False)
        if not draft.priors:
            self.error(f"disease '{draft.id}' declares no prior", ident.span)
        if draft.cycle is not None and not (
            "female" in draft.priors and "male" not in draft.priors
        ):
            self.error(
                "cycle weight is only allowed on female-only diseases",
                draft.cycle_span,
            )
        self.diseases.append(draft)

    def parse_node(self, draft: _DiseaseDraft) -> tuple[Curve, CausalNode] | None:
        kw = self.eat()  # pathstate | symptom
        kind = PATHSTATE if kw.text == "pathstate" else SYMPTOM_REF
        ident = self.expect("IDENT", "a node id")
        if ident is None:
            self._sync(to_top=False)
            return None
        if ident.text in draft.node_ids:
            self.error(f"duplicate node id '{ident.text}' in disease tree", ident.span)
        draft.node_ids[ident.text] = ident.span
        if kind == SYMPTOM_REF:
            draft.sym_refs.append((ident.text, ident.span))
        if self.expect("LBRACE", "'{'") is None:
            self._sync(to_top=False)
            return None
        self.expect_word("link")
        link = self.parse_curve(LINK_TIME_DOMAIN, "link")
        children: list[tuple[Curve, CausalNode]] = []
        while True:
            if self.at_word("pathstate", "symptom"):
                if kind == SYMPTOM_REF:
                    self.error("symptom nodes are leaves and cannot have children")
                child = self.parse_node(draft)
                if child is not None and kind == PATHSTATE:
                    children.append(child)
            elif self.at("RBRACE"):
                self.eat()
                break
            elif self.at("EOF"):
                self.error("unexpected end of input inside node block")
                break
            else:
                self.error(
                    f"expected a child node or '}}', found {self.cur().text or self.cur().kind!r}"
                )
                self.eat()
                self._sync(to_top=False)
        if link is None:
            return None
        node = CausalNode(
            id=ident.text,
            kind=kind,
            children=tuple(children),
            symptom_id=ident.text if kind == SYMPTOM_REF else None,
        )
        return (link, node)

    def parse_utilities(self) -> None:
        kw = self.eat()
        if self.utilities is not None:
            self.error("duplicate utilities block", kw.span)
        else:
            self.utilities = {}
            self.utilities_span = kw.span
        if self.expect("LBRACE", "'{'") is None:
            self._sync(to_top=True)
            return
        while self.at("IDENT"):
            row = self.eat()
            self.expect("LBRACE", "'{'")
            self.expect_word("symptomatic")
            symp = self.expect("NUMBER", "expected hospital days")
            self.expect_word("operation")
            oper = self.expect("NUMBER", "expected hospital days")
            self.expect("RBRACE", "'}' closing the utility row")
            if row.text in self.utility_rows:
                self.error(f"duplicate utility row for '{row.text}'", row.span)
            self.utility_rows[row.text] = row.span
            for tok, treatment in ((symp, "symptomatic"), (oper, "operation")):
                if tok is None:
                    continue
                if float(tok.value) < 0:
                    self.error("morbidity must be >= 0 days", tok.span)
                if self.utilities is not None:
                    self.utilities[(row.text, treatment)] = float(tok.value)
        self.expect("RBRACE", "'}' closing the utilities block")

    # --- cross-declaration checks ----------------------------------------
    def post_checks(self) -> None:
        declared = set(self.symptom_spans)
        for draft in self.diseases:
            seen: set[str] = set()
            for sym_id, span in draft.sym_refs:
                if sym_id not in declared:
                    self.error(f"symptom-ref to undeclared symptom '{sym_id}'", span)
                if sym_id in seen:
                    self.error(
                        f"symptom '{sym_id}' appears more than once in the tree of "
                        f"'{draft.id}'",
                        span,
                    )
                seen.add(sym_id)
            tree_syms = {sym_id for sym_id, _span in draft.sym_refs}
            for sym_id, span in draft.sym_refs_direct:
                if sym_id not in declared:
                    self.error(f"direct likelihood for undeclared symptom '{sym_id}'", span)
                elif sym_id not in tree_syms:
                    self.error(
                        f"direct likelihood for symptom '{sym_id}' not caused by '{draft.id}'",
                        span,
                    )
        eof_span = self.toks[-1].span
        if self.utilities is None:
            self.error("missing utilities block", eof_span)
        else:
            for draft in self.diseases:
                if draft.id not in self.utility_rows:
                    self.error(f"missing utility row for disease '{draft.id}'", draft.span)
            dis_ids = {d.id for d in self.diseases}
            for row_id, span in self.utility_rows.items():
                if row_id not in dis_ids:
                    self.error(f"utility row for undeclared disease '{row_id}'", span)

    def build(self) -> KnowledgeBase:
        diseases = tuple(
            DiseaseDef(
                id=d.id,
                label=d.label,
                tree=CausalNode(id=d.id, kind=DISEASE_ROOT, children=tuple(d.children)),
                prior_age=d.priors,
                cycle_weight=d.cycle,
                direct_likelihoods=d.direct,
            )
            for d in self.diseases
        )
        return KnowledgeBase(
            name=self.name if self.name is not None else "untitled",
            version=self.version if self.version is not None else "0",
            symptoms=tuple(self.symptoms),
            diseases=diseases,
            utilities=UtilityTable(morbidity=self.utilities or {}),
        )


def parse_kb(text: str | bytes) -> ParseResult:
    """Parse a `.pkb` document; never raises on any input."""
    diags: list[ParseDiagnostic] = []
    if isinstance(text, bytes):
        try:
            decoded = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = text[: exc.start].decode("utf-8", errors="replace")
            line = prefix.count("\n") + 1
            col = len(prefix) - (prefix.rfind("\n") + 1) + 1
            span = SourceSpan(line, col, line, col + 1, exc.start, min(exc.start + 1, len(text)))
            diags.append(
                ParseDiagnostic(ERROR, f"input is not valid UTF-8 at byte {exc.start}", span)
            )
            return ParseResult(kb=None, diagnostics=diags)
    else:
        decoded = text
    tokens = _Lexer(decoded, diags).tokens()
    parser = _Parser(tokens, diags)
    parser.parse_document()
    if any(d.severity == ERROR for d in diags):
        return ParseResult(kb=None, diagnostics=diags)
    return ParseResult(kb=parser.build(), diagnostics=diags)


# --- canonical serialization ---------------------------------------------


def _fmt_num(x: float) -> str:
    x = float(x)
    r = repr(x)
    if "e" not in r and "E" not in r:
        return r
    for prec in range(1, 18):
        s = f"{x:.{prec}f}"
        if float(s) == x:
            return s
    return format(Decimal(x), "f")


def _fmt_string(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{out}"'


def _fmt_curve(c: Curve) -> str:
    pts = " ".join(f"({_fmt_num(x)}, {_fmt_num(p)})" for x, p in c.points)
    return f"{{ {pts} }}"


def _emit_node(lines: list[str], link: Curve, node: CausalNode, indent: int) -> None:
    pad = "  " * indent
    word = "pathstate" if node.kind == PATHSTATE else "symptom"
    lines.append(f"{pad}{word} {node.id} {{")
    lines.append(f"{pad}  link {_fmt_curve(link)}")
    for child_link, child in node.children:
        _emit_node(lines, child_link, child, indent + 1)
    lines.append(f"{pad}}}")


def serialize_kb(kb: KnowledgeBase) -> str:
    """Canonical text form; deterministic, and a fixed point under reparsing."""
    lines: list[str] = [f"kb {_fmt_string(kb.name)} version {_fmt_string(kb.version)}"]
    for s in kb.symptoms:
        lines.append("")
        head = f"symptom {s.id}"
        if s.label != s.id:
            head += f" {_fmt_string(s.label)}"
        lines.append(head + " {")
        for sex in SEXES:
            if sex in s.base_rate:
                lines.append(f"  base {sex} {_fmt_curve(s.base_rate[sex])}")
        lines.append("}")
    for d in kb.diseases:
        lines.append("")
        head = f"disease {d.id}"
        if d.label != d.id:
            head += f" {_fmt_string(d.label)}"
        lines.append(head + " {")
        for sex in SEXES:
            if sex in d.prior_age:
                lines.append(f"  prior {sex} {_fmt_curve(d.prior_age[sex])}")
        if d.cycle_weight is not None:
            lines.append(f"  cycle {_fmt_curve(d.cycle_weight)}")
        for link, child in d.tree.children:
            _emit_node(lines, link, child, 1)
        for sym_id, c in d.direct_likelihoods.items():
            lines.append(f"  direct {sym_id} {_fmt_curve(c)}")
        lines.append("}")
    lines.append("")
    lines.append("utilities {")
    for d in kb.diseases:
        symp = _fmt_num(kb.utilities.morbidity[(d.id, "symptomatic")])
        oper = _fmt_num(kb.utilities.morbidity[(d.id, "operation")])
        lines.append(f"  {d.id} {{ symptomatic {symp} operation {oper} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --- JSON export ----------------------------------------------------------


def _curve_pairs(c: Curve) -> list[list[float]]:
    return [[x, p] for x, p in c.points]


def _node_dict(node: CausalNode, link: Curve | None) -> dict:
    doc: dict = {"id": node.id, "kind": node.kind}
    if link is not None:
        doc["link"] = _curve_pairs(link)
    doc["children"] = [_node_dict(child, clink) for clink, child in node.children]
    return doc


def export_json(kb: KnowledgeBase) -> dict:
    """Lossless structural mapping of the knowledge base for the service/UI."""
    return {
        "name": kb.name,
        "version": kb.version,
        "symptoms": [
            {
                "id": s.id,
                "label": s.label,
                "base": {sex: _curve_pairs(c) for sex, c in sorted(s.base_rate.items())},
            }
            for s in kb.symptoms
        ],
        "diseases": [
            {
                "id": d.id,
                "label": d.label,
                "prior": {sex: _curve_pairs(c) for sex, c in sorted(d.prior_age.items())},
                "cycle": _curve_pairs(d.cycle_weight) if d.cycle_weight else None,
                "tree": _node_dict(d.tree, None),
                "direct": {sym: _curve_pairs(c) for sym, c in d.direct_likelihoods.items()},
            }
            for d in kb.diseases
        ],
        "utilities": {
            d.id: {
                "symptomatic": kb.utilities.morbidity[(d.id, "symptomatic")],
                "operation": kb.utilities.morbidity[(d.id, "operation")],
            }
            for d in kb.diseases
        },
    }
