"""Grammar for command-line inputs: q, degree ranges, characters, integrands."""

import re
from fractions import Fraction
from typing import List, Tuple

from arith import GrammarError
from .dirichlet import Character, TableValue, build_character
from .integral import BracketPower

_INT = r"-?\d+"
_Q = re.compile(rf"^\s*(?P<num>{_INT})(?:\s*/\s*(?P<den>{_INT}))?\s*$")
_DEGREES = re.compile(r"^\s*(?P<lo>\d+)\s*(?:\.\.\s*(?P<hi>\d+)\s*)?$")
_VALUE = re.compile(rf"\s*(?:zeta\(\s*(?P<n>{_INT})\s*,\s*(?P<k>{_INT})\s*\)|(?P<v>{_INT}))\s*")
_CHI_PREFIX = re.compile(r"chi\(")
_BRACKET = re.compile(rf"bracket(?:_shift\((?P<shift>{_INT})\))?\^(?P<m>\d+)$")


def parse_q(text: str) -> Fraction:
    """'num/den' or an integer."""
    match = _Q.match(text)
    if match is None:
        raise GrammarError(f"q must look like num/den, got {text!r}", 0)
    den = int(match["den"]) if match["den"] is not None else 1
    if den == 0:
        raise GrammarError("q has a zero denominator", match.start("den"))
    return Fraction(int(match["num"]), den)


def parse_degrees(text: str) -> List[int]:
    """'a..b' (inclusive) or a single degree."""
    match = _DEGREES.match(text)
    if match is None:
        raise GrammarError(f"degree range must look like a..b or a, got {text!r}", 0)
    lo = int(match["lo"])
    hi = int(match["hi"]) if match["hi"] is not None else lo
    if hi < lo:
        raise GrammarError(f"empty degree range {text!r}", match.start("hi"))
    return list(range(lo, hi + 1))


def _parse_table(text: str, offset: int) -> Tuple[List[TableValue], int]:
    """Comma-separated values; returns them and the index just past the table."""
    values: List[TableValue] = []
    pos = 0
    while True:
        match = _VALUE.match(text, pos)
        if match is None:
            raise GrammarError("expected 0, 1, -1 or zeta(n,k)", offset + pos)
        if match["v"] is not None:
            values.append(int(match["v"]))
        else:
            values.append((int(match["n"]), int(match["k"])))
        pos = match.end()
        if pos < len(text) and text[pos] == ",":
            pos += 1
            continue
        return values, pos


def _parse_character_at(text: str, offset: int) -> Tuple[Character, int]:
    head, sep, rest = text.partition(":")
    if not sep or not head.strip().isdigit():
        raise GrammarError("character must look like d:v0,v1,...", offset)
    table, used = _parse_table(rest, offset + len(head) + 1)
    return build_character(int(head), table), len(head) + 1 + used


def parse_character(text: str) -> Character:
    """
    Parse 'd:v0,v1,...' with values 0, 1, -1 or zeta(n,k).

    Args:
        text: Character literal

    Returns:
        The validated Character

    Raises:
        GrammarError: On malformed input, with the offending position
        CharacterError: When the table is not a character
    """
    chi, used = _parse_character_at(text, 0)
    if text[used:].strip():
        raise GrammarError("trailing input after character table", used)
    return chi


def parse_integrand(text: str) -> BracketPower:
    """
    Parse one of bracket^m, bracket_shift(x)^n, chi(d:...)*bracket^m.

    Args:
        text: Integrand expression

    Returns:
        BracketPower

    Raises:
        GrammarError: With the position where parsing stopped
    """
    body = text.strip()
    lead = len(text) - len(text.lstrip())
    chi = None
    if _CHI_PREFIX.match(body):
        start = len("chi(")
        chi, used = _parse_character_at(body[start:], lead + start)
        pos = start + used
        if body[pos:pos + 2] != ")*":
            raise GrammarError("expected ')*' after character table", lead + pos)
        body = body[pos + 2:]
        lead += pos + 2
    match = _BRACKET.match(body)
    if match is None:
        raise GrammarError("expected bracket^m or bracket_shift(x)^n", lead)
    shift = int(match["shift"]) if match["shift"] is not None else 0
    if chi is not None and shift:
        raise GrammarError("a twisted integrand takes an unshifted bracket", lead)
    return BracketPower(int(match["m"]), shift, chi)
