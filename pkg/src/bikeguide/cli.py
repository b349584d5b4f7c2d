"""Command-line entry point: plan inspection, map generation, batch
simulation, serving, and log replay.

Exit codes: 0 success, 1 usage, 2 validation, 3 runtime. A config file
(--config, YAML, sections keyed by subcommand) preloads defaults;
explicit flags always win. Output files are written via a temp file in
the target directory and renamed into place, so a failed run never
leaves a partial artifact.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import click
import yaml

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


class ValidationFailure(Exception):
    """Semantically invalid input (bad value, unknown map, bad file)."""


def _fail(message: str) -> ValidationFailure:
    return ValidationFailure(message)


# --- option callbacks; these run at parse time, including on config
# --- file values, so bad numbers never reach the subcommand body

def _check_fraction_positive(ctx, param, value):
    if value is None:
        return None
    try:
        f = Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise _fail(f"--{param.name} must be a rational number, "
                    f"got {value!r}") from None
    if f <= 0:
        raise _fail(f"--{param.name} must be positive, got {value}")
    return f


def _check_unit_interval(ctx, param, value):
    if value is None:
        return None
    if not 0.0 <= value <= 1.0:
        raise _fail(f"--{param.name} must lie in [0, 1], got {value}")
    return value


def _check_at_least_one(ctx, param, value):
    if value is None:
        return None
    if value < 1:
        raise _fail(f"--{param.name} must be at least 1, got {value}")
    return value


def _check_non_negative(ctx, param, value):
    if value is None:
        return None
    if value < 0:
        raise _fail(f"--{param.name} must be non-negative, got {value}")
    return value


def _check_timer(ctx, param, value):
    if value is None:
        return None
    if value <= 0:
        raise _fail(f"--{param.name} must be positive, got {value}")
    return value


def _load_config(ctx, param, value):
    if not value:
        return None
    path = Path(value)
    if not path.is_file():
        raise _fail(f"config file not found: {value}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise _fail(f"config file is not valid YAML: {exc}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise _fail("config file must hold a mapping of "
                    "subcommand -> flag values")
    ctx.default_map = data
    return value


def _dump_flags(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    dump = {}
    for name, command in sorted(cli.commands.items()):
        flags = []
        for p in command.params:
            if isinstance(p, click.Option):
                flags.extend(p.opts)
        dump[name] = sorted(flags)
    click.echo(json.dumps(dump, indent=2, sort_keys=True))
    ctx.exit(EXIT_OK)


def _write_atomic(path: str, text: str) -> None:
    # write-then-rename: readers never observe a partial file
    target = Path(path)
    if target.parent and not target.parent.is_dir():
        raise _fail(f"output directory does not exist: {target.parent}")
    fd, tmp = tempfile.mkstemp(dir=str(target.parent) or ".",
                               prefix=target.name + ".", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_map_ref(ref: str):
    """A map flag value is a file path or a bundled map name."""
    from .world.bundled import bundled_map_names, load_bundled_map
    from .world.mapdoc import MapDocumentError, parse_map

    path = Path(ref)
    if path.is_file():
        try:
            return parse_map(path.read_text())
        except MapDocumentError as exc:
            raise _fail(f"{ref}: {exc}") from None
    try:
        return load_bundled_map(ref)
    except KeyError:
        raise _fail(f"unknown map {ref!r}: not a file, and bundled maps "
                    f"are {', '.join(bundled_map_names())}") from None


@click.group()
@click.option("--config", type=click.Path(), is_eager=True,
              expose_value=False, callback=_load_config,
              help="YAML file preloading flag defaults per subcommand.")
@click.option("--dump-flags", is_flag=True, is_eager=True,
              expose_value=False, callback=_dump_flags,
              help="Print every subcommand's flags as JSON and exit.")
def cli():
    """Instruction-giving agent toolkit for the bike-share map task."""


@cli.command()
@click.option("--map", "map_ref", required=True,
              help="Bundled map name or map file path.")
@click.option("--agent", type=click.Choice(["responsive", "predictive"]),
              default="responsive", show_default=True,
              help="Whose cost model plans the route.")
@click.option("--delta", default="1", show_default=True,
              callback=_check_fraction_positive,
              help="Ambiguity penalty weight for the predictive planner.")
@click.option("--audit", is_flag=True,
              help="Also dump every move's similar set for map debugging.")
def plan(map_ref, agent, delta, audit):
    """Print the initial plan, its U score, similar sets, witnesses."""
    from .ambiguity import AmbiguityCostConfig, AmbiguityIndex
    from .dialogue.agents import action_ref
    from .dialogue.inefficiency import enumerate_witnesses
    from .execution.belief import determinize
    from .planning.search import search
    from .world.compile import compile_map

    spec = _load_map_ref(map_ref)
    compiled = compile_map(spec)
    index = AmbiguityIndex(spec, compiled.problem.actions)
    cost_fn = None
    if agent == "predictive":
        cost_fn = index.cost_fn(AmbiguityCostConfig(delta=delta))

    det = determinize(compiled.initial_belief_for(), compiled.problem)
    result = search(det, start=det.initial_true, cost_fn=cost_fn)
    if result is None:
        raise click.ClickException(f"{spec.name}: no plan exists")
    actions = result.actions

    click.echo(f"map: {spec.name} ({len(spec.landmarks)} landmarks, "
               f"{len(spec.bikes)} bikes, base {spec.base})")
    click.echo(f"agent: {agent}"
               + (f"  delta: {delta}" if agent == "predictive" else ""))
    base_cost = sum(a.cost for a in actions)
    u_score = index.inexplicability(actions)
    click.echo(f"plan: {len(actions)} steps, base cost {base_cost}, "
               f"U={u_score}")
    for i, action in enumerate(actions, start=1):
        similars = sorted(index.similar_set(action), key=lambda a: a.sort_key)
        note = ", ".join(action_ref(s) for s in similars) or "-"
        click.echo(f"  {i:3d}. {action_ref(action):<24s} similar: {note}")

    witnesses = enumerate_witnesses(actions, det)
    if witnesses:
        click.echo("local inefficiency (base costs):")
        for w in witnesses:
            repl = " ".join(action_ref(a) for a in w.replacement) or "(skip)"
            click.echo(f"  steps {w.start + 1}..{w.end + 1}: cost "
                       f"{w.segment_cost} -> {w.replacement_cost}: {repl}")
    else:
        click.echo("local inefficiency: none")

    if audit:
        click.echo("similar-set audit:")
        moves = sorted((a for a in compiled.problem.actions
                        if index.similar_set(a)), key=lambda a: a.sort_key)
        for action in moves:
            members = ", ".join(
                action_ref(s) for s in
                sorted(index.similar_set(action), key=lambda a: a.sort_key))
            click.echo(f"  {action_ref(action):<24s} -> {members}")


@cli.command()
@click.option("--seed", type=int, required=True,
              help="Generator seed; same seed, same map, byte for byte.")
@click.option("--landmarks", type=int, default=20, show_default=True,
              callback=_check_at_least_one)
@click.option("--bikes", type=int, default=5, show_default=True,
              callback=_check_non_negative)
@click.option("--ambiguity-quota", type=int, default=3, show_default=True,
              callback=_check_non_negative,
              help="Minimum junctions offering same-type destinations.")
@click.option("--visibility-quota", type=int, default=2, show_default=True,
              callback=_check_non_negative,
              help="Minimum bikes visible from an adjacent landmark.")
@click.option("--districts", type=int, default=4, show_default=True,
              callback=_check_at_least_one)
@click.option("--name", default=None, help="Map name (default: seed-derived).")
@click.option("--out", type=click.Path(), default=None,
              help="Write the map document here (default: stdout).")
def genmap(seed, landmarks, bikes, ambiguity_quota, visibility_quota,
           districts, name, out):
    """Generate a map document."""
    from .world.generate import GenerationError, generate_map
    from .world.mapdoc import serialize_map

    try:
        spec = generate_map(seed=seed, landmarks=landmarks, bikes=bikes,
                            ambiguity_quota=ambiguity_quota,
                            visibility_quota=visibility_quota,
                            districts=districts, name=name)
    except GenerationError as exc:
        raise _fail(str(exc)) from None
    text = serialize_map(spec)
    if out is None:
        click.echo(text, nl=False)
    else:
        _write_atomic(out, text)
        click.echo(f"wrote {out} ({spec.name}: {landmarks} landmarks, "
                   f"{bikes} bikes)")


@cli.command()
@click.option("--map", "map_refs", multiple=True,
              help="Bundled map name or file path; repeatable "
                   "(default: every bundled map).")
@click.option("--agent", type=click.Choice(["responsive", "predictive",
                                            "both"]),
              default="both", show_default=True)
@click.option("--delta", default="1", show_default=True,
              callback=_check_fraction_positive,
              help="Ambiguity penalty weight for the predictive agent.")
@click.option("--n", type=int, default=1000, show_default=True,
              callback=_check_at_least_one, help="Episodes per map/agent.")
@click.option("--gamma", type=float, default=0.95, show_default=True,
              callback=_check_unit_interval,
              help="Per-instruction compliance probability.")
@click.option("--hesitate-otherwise", type=float, default=0.5,
              show_default=True, callback=_check_unit_interval,
              help="Hesitation probability on unambiguous instructions.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed; reports are byte-identical per seed.")
@click.option("--jobs", type=int, default=1, show_default=True,
              callback=_check_at_least_one,
              help="Worker processes for episode sampling.")
@click.option("--max-replans", type=int, default=None,
              callback=_check_at_least_one,
              help="Abort an episode after this many replans "
                   "(default: scales with the map; raise for low gamma).")
@click.option("--look-back", type=int, default=2, show_default=True,
              callback=_check_non_negative,
              help="Inefficiency window steps behind the current action.")
@click.option("--look-ahead", type=int, default=2, show_default=True,
              callback=_check_non_negative,
              help="Inefficiency window steps ahead of the current action.")
@click.option("--out", type=click.Path(), default=None,
              help="Write the aggregated report CSV here.")
@click.option("--rows-out", type=click.Path(), default=None,
              help="Write per-episode metric rows here "
                   "(single map/agent runs only).")
def simulate(map_refs, agent, delta, n, gamma, hesitate_otherwise, seed,
             jobs, max_replans, look_back, look_ahead, out, rows_out):
    """Run simulated-user batches and print the comparison table."""
    from .dialogue.agents import AgentConfig
    from .sim import (BatchConfig, UserConfig, run_batch, rows_to_csv,
                      summary_table, summary_to_csv)
    from .world.bundled import bundled_map_names

    refs = list(map_refs) or list(bundled_map_names())
    kinds = ["responsive", "predictive"] if agent == "both" else [agent]
    if rows_out is not None and (len(refs) > 1 or len(kinds) > 1):
        raise _fail("--rows-out needs exactly one --map and a single "
                    "--agent, else episode rows from different runs "
                    "would interleave")

    user_config = UserConfig(gamma=gamma,
                             hesitate_otherwise=hesitate_otherwise)
    batch_config = BatchConfig(episodes=n, master_seed=seed, jobs=jobs,
                               max_replans=max_replans)
    results = []
    for ref in refs:
        spec = _load_map_ref(ref)
        for kind in kinds:
            agent_config = AgentConfig(kind=kind, delta=delta,
                                       look_back=look_back,
                                       look_ahead=look_ahead)
            results.append(run_batch(spec, agent_config, user_config,
                                     batch_config))

    click.echo(f"episodes per run: {n}  gamma: {gamma}  delta: {delta}  "
               f"hesitation: 1.0 ambiguous / {hesitate_otherwise} otherwise  "
               f"seed: {seed}")
    click.echo(summary_table(results), nl=False)
    if out is not None:
        _write_atomic(out, summary_to_csv(results))
        click.echo(f"wrote {out}")
    if rows_out is not None:
        _write_atomic(rows_out, rows_to_csv(results[0].rows))
        click.echo(f"wrote {rows_out}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True,
              callback=_check_at_least_one)
@click.option("--maps-dir", type=click.Path(), default=None,
              help="Directory of extra .map files to serve.")
@click.option("--agent-config", type=click.Path(), default=None,
              help="YAML with session defaults: timer1, timer2, repeat, "
                   "visited_variant, ack_on_pickup, look_back, look_ahead.")
@click.option("--frontend-dir", type=click.Path(), default=None,
              help="Static frontend build to serve at /.")
def serve(host, port, maps_dir, agent_config, frontend_dir):
    """Run the live session service."""
    import uvicorn

    from .service.app import create_app
    from .world.mapdoc import MapDocumentError, parse_map

    extra = {}
    if maps_dir is not None:
        root = Path(maps_dir)
        if not root.is_dir():
            raise _fail(f"--maps-dir is not a directory: {maps_dir}")
        for path in sorted(root.glob("*.map")):
            try:
                spec = parse_map(path.read_text())
            except MapDocumentError as exc:
                raise _fail(f"{path}: {exc}") from None
            extra[spec.name] = spec

    defaults = {}
    if agent_config is not None:
        path = Path(agent_config)
        if not path.is_file():
            raise _fail(f"agent config not found: {agent_config}")
        try:
            defaults = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as exc:
            raise _fail(f"agent config is not valid YAML: {exc}") from None
        if not isinstance(defaults, dict):
            raise _fail("agent config must hold a mapping")

    app = create_app(extra_maps=extra, agent_defaults=defaults,
                     frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port)


@cli.command()
@click.argument("log", type=click.Path())
def replay(log):
    """Re-derive utterances from an exported log and diff."""
    from .service.replay import LogFormatError, replay_log

    path = Path(log)
    if not path.is_file():
        raise _fail(f"log file not found: {log}")
    try:
        report = replay_log(path.read_text())
    except LogFormatError as exc:
        raise _fail(f"{log}: {exc}") from None
    click.echo(report.summary())
    if not report.matched:
        for line in report.diffs:
            click.echo(f"  {line}")
        raise click.exceptions.Exit(EXIT_RUNTIME)


def main(argv=None) -> int:
    try:
        # click returns Exit codes in non-standalone mode instead of
        # raising, so the result has to be honoured as well
        result = cli.main(args=argv, prog_name="bikeguide",
                          standalone_mode=False)
        if isinstance(result, int):
            return result
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"usage error: {exc.format_message()}", err=True)
        return EXIT_USAGE
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return EXIT_RUNTIME
    except ValidationFailure as exc:
        click.echo(f"validation error: {exc}", err=True)
        return EXIT_VALIDATION
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - the CLI boundary
        click.echo(f"error: {exc}", err=True)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
