"""
cli
~~~

Command line front end, run as `python -m orqi <group> <command> [options]`.

  - `finite`: relations, transform tables and sub-family transforms read from
    JSON (`dual`, `verify`, `image`, `invariants`, `extend`, `dualize`,
    `intersect`, `restrict`).
  - `geom`: transforms of point sets and named bodies, and the grid checks
    (`polar`, `dualpolar`, `flower`, `reciprocal`, `balls`, `widthsets`,
    `jcheck`, `unconditional`, `star`).
  - `measure`: Gaussian measure experiments (`gamma`, `bs`, `prekopa`).

Reports are canonical JSON on stdout (or `--output`), with a timestamp unless
`--no-timestamp`; tabular reports can be written as CSV with
`--format csv`.  Exit code 0 means success, 1 a usage, input or output
error, and 2 that a checked property was violated (the report then carries a
witness).
"""

import argparse as _argparse
import datetime as _datetime
import json as _json
import logging as _logging
import sys as _sys
import numpy as _np

from . import relation as _relation
from . import algebra as _algebra
from . import invariants as _invariants
from . import geometry as _geometry
from . import bodies as _bodies
from . import measure as _measure
from .functional import GridFunction
from .util import util as _util
from .util.grid import GridEvaluator

_logger = _logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

#: Smallest grid agreement accepted by the invariance checks.
INVARIANCE_THRESHOLD = 0.995


class RunConfig():
    """Options shared by every command.

      - :attr:`seed` integer seed, at least 0.
      - :attr:`samples` number of Monte Carlo samples.
      - :attr:`output` path to write the report to, or `None` for stdout.
      - :attr:`format` `"json"` or `"csv"`.
      - :attr:`grid` nodes per axis for grid checks, or `None` for the
        command's default.
      - :attr:`directions` size of the direction grid, or `None` for the
        default.
      - :attr:`exhaustive` force exhaustive law checks.
      - :attr:`timestamp` add a timestamp to JSON reports.

    :param **kwargs: Set any properties by keyword.
    """
    def __init__(self, **kwargs):
        self.seed = 0
        self.samples = _measure.DEFAULT_SAMPLES
        self.output = None
        self.format = "json"
        self.grid = None
        self.directions = None
        self.exhaustive = False
        self.timestamp = True

        for key, value in kwargs.items():
            try:
                if not hasattr(self, key):
                    raise Exception()
                setattr(self, key, value)
            except ValueError:
                raise
            except:
                raise ValueError("Have no property of name '{}'".format(key))

    @property
    def seed(self):
        return self._seed

    @seed.setter
    def seed(self, v):
        try:
            v = int(v)
            assert v >= 0
            self._seed = v
        except:
            raise ValueError("Should be an integer seed >= 0")

    @property
    def samples(self):
        return self._samples

    @samples.setter
    def samples(self, v):
        try:
            v = int(v)
            assert v > 0
            self._samples = v
        except:
            raise ValueError("Should be a positive number of samples")

    @property
    def output(self):
        return self._output

    @output.setter
    def output(self, v):
        self._output = None if v is None or v == "-" else str(v)

    @property
    def format(self):
        return self._format

    @format.setter
    def format(self, v):
        if v not in ("json", "csv"):
            raise ValueError("Should be format 'json' or 'csv'")
        self._format = v

    @property
    def grid(self):
        return self._grid

    @grid.setter
    def grid(self, v):
        if v is None:
            self._grid = None
            return
        try:
            v = int(v)
            assert v >= 2
            self._grid = v
        except:
            raise ValueError("Should be at least 2 grid nodes per axis")

    @property
    def directions(self):
        return self._directions

    @directions.setter
    def directions(self, v):
        if v is None:
            self._directions = None
            return
        try:
            v = int(v)
            assert v >= 3
            self._directions = v
        except:
            raise ValueError("Should be at least 3 directions")

    @property
    def exhaustive(self):
        return self._exhaustive

    @exhaustive.setter
    def exhaustive(self, v):
        self._exhaustive = bool(v)

    @property
    def timestamp(self):
        return self._timestamp

    @timestamp.setter
    def timestamp(self, v):
        self._timestamp = bool(v)

    @staticmethod
    def from_args(args):
        return RunConfig(seed=args.seed, samples=args.samples, output=args.output,
            format=args.format, grid=args.grid, directions=args.directions,
            exhaustive=args.exhaustive, timestamp=not args.no_timestamp)


class Outcome():
    """What a command produced.

    :param report: JSON-able dictionary.
    :param code: Exit code.
    :param table: Optional pair `(header, rows)` for CSV output.
    """
    def __init__(self, report, code=EXIT_OK, table=None):
        self.report = report
        self.code = code
        self.table = table


def emit(outcome, config):
    """Write the report in the configured format."""
    if config.format == "csv":
        if outcome.table is None:
            raise ValueError("This report is JSON only")
        header, rows = outcome.table
        _util.write_csv(header, rows, config.output)
        return
    report = dict(outcome.report)
    if config.timestamp:
        report["timestamp"] = _datetime.datetime.now(_datetime.timezone.utc).isoformat(timespec="seconds")
    _util.write_json(report, config.output)


#####  finite  #####

def _relation_from(path):
    return _relation.CostRelation.from_dict(_util.read_json(path))

def _subset(ground, text):
    """Parse `"a,b"` or a JSON list of labels."""
    if text is None or text.strip() == "":
        return ground.empty
    text = text.strip()
    if text.startswith("["):
        labels = _json.loads(text)
    else:
        labels = [s.strip() for s in text.split(",")]
    return ground.mask(labels)

def _single_input(args):
    if len(args.input) != 1:
        raise ValueError("Should give exactly one --input")
    return args.input[0]

def finite_dual(args, config):
    S = _relation_from(_single_input(args))
    K = _subset(S.ground, args.subset)
    return Outcome({"subset": K.labels, "dual": _relation.c_dual(S, K).labels})

def finite_verify(args, config):
    data = _util.read_json(_single_input(args))
    if not isinstance(data, dict):
        raise ValueError("Should be a JSON object")
    if "domain" in data:
        verdict = _algebra.is_orqi_on(_algebra.SubFamilyTransform.from_dict(data))
        report = {"input": "sub-family transform", "verdict": verdict.to_dict()}
    else:
        if "rel" in data:
            T = _relation.TransformTable.from_relation(_relation.CostRelation.from_dict(data))
            kind = "relation"
        else:
            T = _relation.TransformTable.from_dict(data)
            kind = "table"
        verdict = _relation.is_orqi(T, exhaustive=config.exhaustive, seed=config.seed)
        report = {"input": kind, "verdict": verdict.to_dict()}
        if verdict:
            report["relation"] = _relation.induced_relation(T).to_dict()
    return Outcome(report, EXIT_OK if verdict else EXIT_VIOLATION)

def finite_image(args, config):
    S = _relation_from(_single_input(args))
    return Outcome({"image": [K.labels for K in _relation.image_class(S)]})

def finite_invariants(args, config):
    S = _relation_from(_single_input(args))
    return Outcome(_invariants.classify(S).to_dict())

def finite_extend(args, config):
    T = _algebra.SubFamilyTransform.from_dict(_util.read_json(_single_input(args)))
    verdict = _algebra.is_orqi_on(T)
    if not verdict:
        return Outcome({"precondition": verdict.to_dict()}, EXIT_VIOLATION)
    result = _algebra.extend_from_subclass(T)
    if not result:
        return Outcome(result.to_dict(), EXIT_VIOLATION)
    return Outcome({"relation": result.to_dict()})

def finite_dualize(args, config):
    S = _relation_from(_single_input(args))
    return Outcome({"relation": _algebra.dual_orqi(S).to_dict()})

def finite_intersect(args, config):
    relations = [_relation_from(path) for path in args.input]
    return Outcome({"relation": _algebra.intersect_orqis(relations).to_dict()})

def finite_restrict(args, config):
    S = _relation_from(_single_input(args))
    M0 = _subset(S.ground, args.subset)
    return Outcome({"subset": M0.labels, "relation": _algebra.restrict_to_set(S, M0).to_dict()})


#####  geom  #####

_DEFAULT_BODIES = {"polar": "square", "dualpolar": "k0", "flower": "flower", "reciprocal": "square",
    "balls": "ball", "unconditional": "square", "star": "ball", "widthsets": "reuleaux"}

def _body(args):
    name = args.body or _DEFAULT_BODIES[args.command]
    return _bodies.named_body(name, epsilon=getattr(args, "epsilon", None))

def _point_set(args):
    if args.input:
        path = _single_input(args)
        if path.lower().endswith(".csv"):
            return _geometry.PointSet.from_csv(path)
        return _geometry.PointSet.from_dict(_util.read_json(path))
    body = _body(args)
    if body.generators is None:
        raise ValueError("Body '{}' has no generators".format(body.name))
    return body.generators

def _evaluator(args, config, dim, half_width=3.0, default_grid=201):
    lo, hi = (-half_width, half_width) if args.box is None else args.box
    return GridEvaluator([(lo, hi)] * dim, config.grid or default_grid)

def _membership_table(evaluator, *oracles):
    points = evaluator.points()
    columns = [evaluator.evaluate(o).ravel() for o in oracles]
    header = ["x{}".format(i + 1) for i in range(evaluator.dim)] + (["member"] if len(oracles) == 1 else ["first", "second"])
    return header, [list(p) + [bool(c[i]) for c in columns] for i, p in enumerate(points)]

def _transform(name, P, config):
    directions = None
    if config.directions is not None:
        directions = _util.direction_grid(P.dim, config.directions)
    if name == "polar":
        return _geometry.polar(P)
    if name == "dualpolar":
        return _geometry.dual_polar(P)
    if name == "reciprocal":
        return _geometry.reciprocal(P, directions)
    if name == "unconditional":
        return _geometry.unconditional_dual(P)
    if name == "balls":
        return _geometry.balls_transform(P)
    if name == "flower":
        return _geometry.flower_dual(P)
    raise ValueError("Unknown transform {!r}".format(name))

def geom_transform(args, config):
    """Any of the point set transforms, optionally checking that a named body
    is invariant."""
    P = _point_set(args)
    image = _transform(args.command, P, config)
    evaluator = _evaluator(args, config, P.dim)
    report = {"transform": args.command, "generators": len(P)}
    if isinstance(image, _geometry.HalfspaceSet):
        report["set"] = image.to_dict()
    else:
        report["members"] = int(evaluator.evaluate(image).sum())
        report["grid"] = {"box": [list(b) for b in evaluator.box], "resolution": list(evaluator.resolution)}
    code = EXIT_OK
    if args.invariant_check:
        if args.input:
            raise ValueError("Should give --body, not --input, for an invariance check")
        body = _body(args)
        grid = evaluator.agreement(image, body.oracle)
        report["body"] = body.name
        report["invariance"] = grid.to_dict()
        report["holds"] = grid.agreement >= INVARIANCE_THRESHOLD
        code = EXIT_OK if report["holds"] else EXIT_VIOLATION
        table = _membership_table(evaluator, image, body.oracle)
    else:
        table = _membership_table(evaluator, image)
    return Outcome(report, code, table)

def geom_widthsets(args, config):
    body = _body(args)
    if body.generators is None:
        raise ValueError("Body '{}' has no generators".format(body.name))
    epsilon = args.epsilon or 1.0
    if body.name != "reuleaux" and args.epsilon is None:
        raise ValueError("Should give --epsilon for body '{}'".format(body.name))
    image = _geometry.ball_intersection(body.generators, epsilon)
    evaluator = _evaluator(args, config, body.dim, half_width=epsilon)
    grid = evaluator.agreement(image, body.oracle)
    holds = grid.agreement >= INVARIANCE_THRESHOLD
    report = {"body": body.name, "epsilon": epsilon, "invariance": grid.to_dict(), "holds": holds}
    return Outcome(report, EXIT_OK if holds else EXIT_VIOLATION, _membership_table(evaluator, image, body.oracle))

def geom_jcheck(args, config):
    if args.dim != 2:
        raise ValueError("Should be --dim 2")
    resolution = config.grid or 200
    reports = _geometry.j_polarity_check(config.seed, resolution=resolution)
    evaluator = GridEvaluator([(-2.0, 2.0), (-2.0, 2.0)], resolution)
    disc = _geometry.MembershipOracle(2, margin=lambda p: 1 - _np.linalg.norm(p, axis=1))
    k0_ball = evaluator.agreement(_geometry.tilde_j(_geometry.k0_oracle(2)), disc)
    holds = all(r.agreement >= INVARIANCE_THRESHOLD for r in reports + [k0_ball])
    report = {"seed": config.seed, "bodies": [r.to_dict() for r in reports],
        "k0_ball": k0_ball.to_dict(), "holds": holds}
    rows = [[i, r.agreement, r.compared, r.disagreements, r.excluded] for i, r in enumerate(reports)]
    table = (["body", "agreement", "compared", "disagreements", "excluded"], rows)
    return Outcome(report, EXIT_OK if holds else EXIT_VIOLATION, table)

def geom_star(args, config):
    body = _body(args)
    directions = _util.direction_grid(body.dim, config.directions)
    g = _geometry.gauge_of(body.oracle, directions)
    dual = _geometry.star_dual(g)
    report = {"body": body.name, "directions": directions.tolist(),
        "gauge": _util.encode_extended(g.values), "dual": _util.encode_extended(dual.values),
        "involution": _geometry.star_dual(dual) == g}
    header = ["d{}".format(i + 1) for i in range(body.dim)] + ["gauge", "dual"]
    rows = [list(d) + [a, b] for d, a, b in zip(directions.tolist(), g.values.tolist(), dual.values.tolist())]
    return Outcome(report, table=(header, rows))


#####  measure  #####

def _measure_body(source):
    if source in _bodies.NAMES:
        return _bodies.named_body(source)
    data = _util.read_json(source)
    if isinstance(data, dict) and "values" in data:
        return _bodies.Body.from_grid_function(source, GridFunction.from_dict(data))
    raise ValueError("Should be a body name or a JSON profile with 'box', 'resolution' and 'values'")

def measure_gamma(args, config):
    body = _measure_body(args.body)
    estimate = _measure.gaussian_measure(body.oracle, samples=config.samples, seed=config.seed)
    report = {"body": body.name, "gamma": estimate.to_dict()}
    if body.name == "k0":
        reference = _measure.gamma_k0_reference(2)
        report["reference"] = reference
        report["agrees"] = estimate.agrees(reference)
    table = (["body", "mean", "stderr", "n_samples", "seed"],
        [[body.name, estimate.mean, estimate.stderr, estimate.n_samples, estimate.seed]])
    return Outcome(report, table=table)

def measure_bs(args, config):
    body = _measure_body(args.body)
    try:
        report = _measure.bs_experiment(body, samples=config.samples, seed=config.seed,
            exploratory=args.exploratory)
    except _measure.SymmetryFailed as ex:
        return Outcome({"body": body.name, "error": str(ex), "witness": ex.witness}, EXIT_VIOLATION)
    table = (["body", "product", "gamma_K0_sq", "margin_sigma", "holds"],
        [[body.name, report["product"], report["gamma_K0_sq"], report["margin_sigma"], report["holds"]]])
    return Outcome(report, EXIT_OK if report["holds"] else EXIT_VIOLATION, table)

def measure_prekopa(args, config):
    source = args.body
    polar_set = None
    if source == "ball":
        L = _bodies.named_body("ball").oracle
        polar_set = L
    elif source in _bodies.NAMES:
        body = _bodies.named_body(source)
        if body.generators is None or body.generators.rays.shape[0] > 0:
            raise ValueError("Should be a bounded polytope, not '{}'".format(source))
        L = _geometry.PointSet(body.generators.points)
    elif source.lower().endswith(".csv"):
        L = _geometry.PointSet.from_csv(source)
    else:
        L = _geometry.PointSet.from_dict(_util.read_json(source))
    s = _np.linspace(0.1, 1.0, config.grid or 10)
    rows = _measure.prekopa_table(L, s, s, samples=config.samples, seed=config.seed, polar_set=polar_set)
    verdict = _measure.prekopa_verdict(rows)
    report = {"body": source, "pairs": len(rows), "seed": config.seed, "samples": config.samples,
        "verdict": verdict.to_dict()}
    header = ["s", "t", "lhs", "rhs", "sigma"]
    table = (header, [[r[k] for k in header] for r in rows])
    return Outcome(report, EXIT_OK if verdict else EXIT_VIOLATION, table)


#####  Argument parsing  #####

class _Parser(_argparse.ArgumentParser):
    """Usage errors exit with code 1."""
    def error(self, message):
        self.print_usage(_sys.stderr)
        self.exit(EXIT_ERROR, "{}: error: {}\n".format(self.prog, message))

def _common():
    common = _Parser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeat for debug)")
    common.add_argument("-o", "--output", default=None, help="Write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=_measure.DEFAULT_SAMPLES)
    common.add_argument("--grid", type=int, default=None, help="Grid nodes per axis")
    common.add_argument("--directions", type=int, default=None, help="Size of the direction grid")
    common.add_argument("--exhaustive", action="store_true", help="Never sample law checks")
    common.add_argument("--no-timestamp", action="store_true", help="Leave the timestamp out of JSON reports")
    return common

def build_parser():
    common = _common()
    parser = _Parser(prog="orqi", description="Order reversing quasi involutions: finite, geometric and measure experiments.")
    groups = parser.add_subparsers(dest="group", metavar="group")
    groups.required = True

    finite = groups.add_parser("finite", help="Finite ground sets").add_subparsers(dest="command", metavar="command")
    finite.required = True
    for name, handler, help_text in [
            ("dual", finite_dual, "c-dual of a subset"),
            ("verify", finite_verify, "check the ORQI laws"),
            ("image", finite_image, "image class of a relation"),
            ("invariants", finite_invariants, "classify the invariant sets"),
            ("extend", finite_extend, "extend a sub-family transform"),
            ("dualize", finite_dualize, "the dual ORQI"),
            ("intersect", finite_intersect, "intersection of ORQIs"),
            ("restrict", finite_restrict, "restrict to a subset")]:
        p = finite.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--input", "-i", action="append", required=True, help="JSON input ('-' for stdin)")
        if name in ("dual", "restrict"):
            p.add_argument("--subset", default="", help="Labels, comma separated or a JSON list")
        p.set_defaults(handler=handler)

    geom = groups.add_parser("geom", help="Sets in R^n").add_subparsers(dest="command", metavar="command")
    geom.required = True
    for name in ("polar", "dualpolar", "flower", "reciprocal", "balls", "unconditional"):
        p = geom.add_parser(name, parents=[common], help="the {} transform".format(name))
        p.add_argument("--input", "-i", action="append", default=None, help="Points as CSV or PointSet JSON")
        p.add_argument("--body", choices=_bodies.NAMES, default=None)
        p.add_argument("--box", type=float, nargs=2, default=None, metavar=("LOW", "HIGH"))
        p.add_argument("--invariant-check", action="store_true", help="Compare the image with the body")
        p.set_defaults(handler=geom_transform)
    p = geom.add_parser("widthsets", parents=[common], help="invariance under ball intersection")
    p.add_argument("--body", choices=_bodies.NAMES, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--box", type=float, nargs=2, default=None, metavar=("LOW", "HIGH"))
    p.set_defaults(handler=geom_widthsets)
    p = geom.add_parser("jcheck", parents=[common], help="the J transform against dual polarity")
    p.add_argument("--dim", type=int, default=2)
    p.set_defaults(handler=geom_jcheck)
    p = geom.add_parser("star", parents=[common], help="star duality of a body's gauge")
    p.add_argument("--body", choices=_bodies.NAMES, default=None)
    p.set_defaults(handler=geom_star)

    meas = groups.add_parser("measure", help="Gaussian measure experiments").add_subparsers(dest="command", metavar="command")
    meas.required = True
    p = meas.add_parser("gamma", parents=[common], help="Gaussian measure of a body")
    p.add_argument("--body", required=True, help="Body name or JSON profile")
    p.set_defaults(handler=measure_gamma)
    p = meas.add_parser("bs", parents=[common], help="the product inequality for dual polarity")
    p.add_argument("--body", required=True, help="Body name or JSON profile")
    p.add_argument("--exploratory", action="store_true", help="Allow bodies which are not essentially symmetric")
    p.set_defaults(handler=measure_bs)
    p = meas.add_parser("prekopa", parents=[common], help="the pointwise Prekopa-Leindler condition")
    p.add_argument("--body", default="square", help="'ball', a polytope body name, or vertices as CSV / JSON")
    p.set_defaults(handler=measure_prekopa)
    return parser

def main(argv=None):
    """Run the command line; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else EXIT_ERROR
    level = [_logging.WARNING, _logging.INFO, _logging.DEBUG][min(args.verbose, 2)]
    _logging.basicConfig(level=level, stream=_sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        config = RunConfig.from_args(args)
        outcome = args.handler(args, config)
        emit(outcome, config)
    except (ValueError, IndexError, OSError) as ex:
        _logger.debug("Command failed", exc_info=True)
        print("orqi: error: {}".format(ex), file=_sys.stderr)
        return EXIT_ERROR
    return outcome.code
