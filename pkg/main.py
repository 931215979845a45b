#!/usr/bin/env python3
"""
q-Euler 数計算ツール - メインアプリケーション

Computes q-Euler numbers, q-Euler polynomials and their character twists
both by closed form and as fermionic p-adic q-integrals, and verifies the
identities they satisfy. All output is exact.
"""

import argparse
import json
import logging
import sys
from math import inf
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import ValidationError

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from config import RunConfig, load_defaults
from arith import Backend, DomainError, NotConvergedError, QEulerError, render, to_padic
from qeuler import (
    Ball,
    MeasureContext,
    check_additivity,
    classical_euler,
    generalized_q_euler,
    generalized_q_euler_closed,
    integrate,
    mu,
    mu_product_form,
    parse_character,
    parse_integrand,
    q_euler_closed,
    q_euler_integral,
    q_euler_poly,
    q_euler_poly_integral,
    total_mass,
)
from qeuler.checks import (
    SUITES,
    CheckReport,
    check_distribution,
    check_feq,
    check_limit,
    check_mass,
    check_qdiff,
)
from qeuler.integral import IntegralResult, certified_valuation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

DEFAULT_K = 6
DEFAULT_LEVEL = 2

Document = Dict[str, Any]
Rows = List[Dict[str, Any]]


def _header(config: RunConfig, backend: Optional[Backend] = None) -> Document:
    return {
        "p": config.prime,
        "q": config.q_text,
        "backend": (backend or config.backend).value,
    }


def _gap(x, p: int, cap: int) -> Optional[int]:
    """Certified agreement valuation, capped at the compared precision."""
    v = certified_valuation(x, p)
    return None if v == inf else int(min(v, cap))


def _require(result: IntegralResult, document: Document) -> IntegralResult:
    if not result.converged:
        raise NotConvergedError(
            f"{result.descriptor}: {result.achieved_precision}/{result.requested_precision} "
            f"digits after level {result.levels_used}", partial=document)
    return result


def _dual_rows(config: RunConfig, document: Document, closed_fn, integral_fn,
               progress: bool) -> Tuple[Document, Rows]:
    """Closed form in the configured backend against the p-adic integral, per degree."""
    p, M = config.prime, config.precision
    ctx = config.context()
    padic = config.context(Backend.PADIC)
    rows: Rows = []
    document["results"] = rows
    for m in config.degree_list:
        closed = closed_fn(m, ctx)
        result = integral_fn(m, padic, M, config.n_max, progress)
        row = {
            "m": m,
            "closed": render(closed),
            "integral": render(result.value),
            "agree_valuation": _gap(to_padic(closed, p, M) - result.value, p, M),
        }
        rows.append(row)
        _require(result, document)
    return document, rows


def cmd_euler(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """E_{m,q} by closed form and by integral."""
    return _dual_rows(config, _header(config), q_euler_closed, q_euler_integral, args.progress)


def cmd_euler_poly(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """E_{n,q}(x) by binomial expansion and by integral."""
    x = args.x
    document = _header(config)
    document["x"] = x
    return _dual_rows(
        config, document,
        lambda n, ctx: q_euler_poly(n, x, ctx),
        lambda n, ctx, M, n_max, progress: q_euler_poly_integral(n, x, ctx, M, n_max, progress),
        args.progress)


def cmd_euler_chi(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """E_{m,chi,q} by the derived closed form and by integral."""
    if not args.chi:
        raise DomainError("euler-chi needs --chi d:v0,v1,...")
    chi = parse_character(args.chi)
    document = _header(config)
    document["chi"] = str(chi)
    document["primitive"] = chi.primitive
    return _dual_rows(
        config, document,
        lambda m, ctx: generalized_q_euler_closed(m, chi, ctx),
        lambda m, ctx, M, n_max, progress: generalized_q_euler(m, chi, ctx, M, n_max, progress),
        args.progress)


def cmd_classical(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """Classical Euler numbers E_m."""
    rows = [{"m": m, "value": render(classical_euler(m))} for m in config.degree_list]
    return {"results": rows}, rows


def cmd_measure(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """The measure of one ball, its children and the total mass of its level."""
    ctx = MeasureContext(config.q_param())
    ball = Ball(args.a, args.d, args.N, config.prime)
    rows = [{"a": child.a, "N": child.N, "mu": render(mu(child, ctx))}
            for child in ball.children()]
    document = _header(config)
    document.update({
        "ball": f"{ball.a} + {ball.d}*{config.prime}^{ball.N} Z_{config.prime}",
        "mu": render(mu(ball, ctx)),
        "mu_product_form": render(mu_product_form(ball, ctx)),
        "additivity_residual": render(check_additivity(ball, ctx).residual),
        "total_mass": render(total_mass(ball.d, ball.N, ctx)),
        "children": rows,
    })
    return document, rows


def cmd_integrate(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """I_{-q}(f) for an integrand of the small grammar."""
    if not args.f:
        raise DomainError("integrate needs --f, e.g. --f 'bracket^1'")
    f = parse_integrand(args.f)
    result = integrate(f, config.context(), config.precision, config.n_max, args.progress)
    document = _header(config)
    document.update(result.to_dict())
    _require(result, document)
    return document, [document]


def cmd_check(config: RunConfig, args: argparse.Namespace) -> Tuple[Document, Rows]:
    """Run one invariant suite."""
    ctx = config.context()
    which = args.which
    if which in ("distribution", "mass"):
        ctx = MeasureContext(ctx.q)
    if which == "distribution":
        report = check_distribution(ctx, args.d, args.N, args.progress)
    elif which == "mass":
        report = check_mass(ctx, args.d, args.N)
    elif which == "feq":
        report = check_feq(ctx, config.degree_list, config.precision, config.n_max, args.progress)
    elif which == "qdiff":
        report = check_qdiff(ctx, args.K)
    else:
        report = check_limit(ctx)
    document = _header(config)
    document.update(report.to_dict())
    args.report = report
    return document, [c.to_dict() for c in report.cases]


COMMANDS = {
    "euler": cmd_euler,
    "euler-poly": cmd_euler_poly,
    "euler-chi": cmd_euler_chi,
    "classical": cmd_classical,
    "measure": cmd_measure,
    "integrate": cmd_integrate,
    "check": cmd_check,
}


def render_output(document: Document, rows: Rows, fmt: str) -> str:
    """
    Serialize a result.

    Args:
        document: Full JSON document
        rows: Table rows mirrored by the csv and text formats
        fmt: json, csv or text

    Returns:
        The text written to stdout
    """
    if fmt == "json":
        return json.dumps(document, ensure_ascii=False, indent=2)
    frame = pd.DataFrame(rows)
    if fmt == "csv":
        return frame.to_csv(index=False).rstrip("\n")
    return frame.to_string(index=False)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument('--p', type=int, help='素数 p（デフォルト: 3）')
    common.add_argument('--q', type=str, help='パラメータ q を num/den で指定（デフォルト: 1+p）')
    common.add_argument('--backend', choices=[b.value for b in Backend],
                        help='スカラーのバックエンド（rational | padic）')
    common.add_argument('--prec', type=int, help='p 進精度 M（デフォルト: 6）')
    common.add_argument('--m', type=str, help='次数の範囲 a..b または単一の次数')
    common.add_argument('--N-max', dest='n_max', type=int, help='レベルの上限 N_max')
    common.add_argument('--format', choices=['json', 'csv', 'text'], help='出力形式')
    common.add_argument('--config', type=str, metavar='FILE',
                        help='QEULER_* キーを含む設定ファイル（dotenv 形式）')
    common.add_argument('--verbose', action='store_true', help='デバッグログを標準エラーに出力')
    common.add_argument('--progress', action='store_true', help='進捗バーを標準エラーに表示')
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="q-Euler 数計算ツール - フェルミオン的 p 進 q 積分と恒等式の検証",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
使用例:
  # q-Euler 数を閉じた式と積分の両方で計算
  python main.py euler --p 3 --q 4 --m 0..2 --backend rational

  # q-Euler 多項式 E_{n,q}(x)
  python main.py euler-poly --p 3 --q 4 --m 0..3 --x 1

  # 指標付き q-Euler 数
  python main.py euler-chi --p 5 --q 6 --m 0..2 --chi "3:0,1,-1"

  # 被積分関数を指定して積分
  python main.py integrate --p 3 --q 4 --f "bracket^1" --prec 6

  # 恒等式の検証
  python main.py check distribution --p 3 --d 5 --N 2 --q 4 --backend rational
  python main.py check qdiff --p 3 --q 4 --K 12
        """
    )
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')

    sub.add_parser('euler', parents=[common], help='q-Euler 数 E_{m,q}')
    poly = sub.add_parser('euler-poly', parents=[common], help='q-Euler 多項式 E_{n,q}(x)')
    poly.add_argument('--x', type=int, default=0, help='変数 x（整数、デフォルト: 0）')
    chi = sub.add_parser('euler-chi', parents=[common], help='指標付き q-Euler 数 E_{m,χ,q}')
    chi.add_argument('--chi', type=str, help='ディリクレ指標 d:v0,v1,...')
    sub.add_parser('classical', parents=[common], help='古典的 Euler 数 E_m')

    measure = sub.add_parser('measure', parents=[common], help='球 a + d p^N Z_p の測度')
    measure.add_argument('--a', type=int, default=0, help='剰余 a（デフォルト: 0）')
    measure.add_argument('--d', type=int, default=1, help='奇数の法 d（デフォルト: 1）')
    measure.add_argument('--N', type=int, default=DEFAULT_LEVEL, help='レベル N')

    integrand = sub.add_parser('integrate', parents=[common], help='q 積分 I_{-q}(f)')
    integrand.add_argument('--f', type=str,
                           help='bracket^m | bracket_shift(x)^n | chi(d:...)*bracket^m')

    check = sub.add_parser('check', parents=[common], help='恒等式の検証スイート')
    check.add_argument('which', choices=SUITES, help='検証する恒等式')
    check.add_argument('--d', type=int, default=1, help='奇数の法 d（デフォルト: 1）')
    check.add_argument('--N', type=int, default=DEFAULT_LEVEL, help='最大レベル N')
    check.add_argument('--K', type=int, default=DEFAULT_K, help='母関数の打ち切り次数 K')
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the --config file, then explicit flags."""
    values = load_defaults(args.config)
    overrides = {
        "prime": args.p,
        "q": args.q,
        "backend": args.backend,
        "precision": args.prec,
        "degrees": args.m,
        "n_max": args.n_max,
        "output_format": args.format,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def _partial_document(partial: Any) -> Optional[Document]:
    if isinstance(partial, dict):
        return partial
    if hasattr(partial, "to_dict"):
        return partial.to_dict()
    return None


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help()
        return EXIT_INVALID

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")

    fmt = args.format or "json"
    try:
        config = build_config(args)
        fmt = config.output_format
        document, rows = COMMANDS[args.command](config, args)
    except NotConvergedError as e:
        partial = _partial_document(e.partial)
        if partial is not None:
            partial["converged"] = False
            print(json.dumps(partial, ensure_ascii=False, indent=2))
        print(f"エラー: 収束しませんでした (NOT-CONVERGED): {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except ValidationError as e:
        print(f"エラー: 設定が不正です: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (QEulerError, FileNotFoundError) as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_INVALID
    except KeyboardInterrupt:
        print("\n\n処理を中断しました。", file=sys.stderr)
        return 130

    print(render_output(document, rows, fmt))

    report: Optional[CheckReport] = getattr(args, "report", None)
    if report is not None and not report.passed:
        failure = report.first_failure
        print(f"エラー: 検証に失敗しました: {failure.label} "
              f"(valuation {failure.valuation}, 必要 {failure.target})", file=sys.stderr)
        return EXIT_CHECK_FAILED
    if report is not None and report.note:
        print(f"注記: {report.note}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
