"""Command line interface.

Exit codes: 0 success, 1 violations or runtime failure, 2 usage error.
Every path and the default sampler seed can come from RELANN_* environment
variables; explicit flags win.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .alignment import AlignmentError, load_alignment_path, load_sample_alignment
from .config import ConfigError, ServiceConfig, config_from_env
from .corpus import (
    CorpusError,
    corpus_stats,
    load_corpus_dir,
    load_sample_corpus,
    sample_first_terms,
)
from .inventory import (
    Inventory,
    InventoryError,
    Origin,
    UnknownIdError,
    load_seed_inventory,
    parse_inventory,
    validate_inventory,
)
from .records import validate_record
from .stats import (
    FrequencyScope,
    NoCompositeRecordsError,
    avg_chain_length,
    frequencies_to_dict,
    relatedness_report,
    relatedness_to_dict,
    relation_frequencies,
    render_chain_length,
    render_frequencies,
    render_relatedness,
    render_summary,
    summarize,
    summary_to_dict,
)
from .store import CorruptLogError, RecordStore, export_dataset, load_records_jsonl


def _config(ctx: click.Context) -> ServiceConfig:
    return ctx.obj["config"]


def _load_inventory(cfg: ServiceConfig) -> Inventory:
    if cfg.inventory_path is not None:
        from .inventory import load_inventory_path
        return load_inventory_path(cfg.inventory_path)
    return load_seed_inventory()


def _load_corpus(cfg: ServiceConfig):
    if cfg.corpus_dir is not None:
        return load_corpus_dir(cfg.corpus_dir)
    return load_sample_corpus()


def _store_records(cfg: ServiceConfig):
    if not cfg.store_path.exists():
        return []
    store = RecordStore(cfg.store_path)
    try:
        return store.list_records()
    finally:
        store.close()


@click.group()
@click.option("--inventory", "inventory_path", type=click.Path(path_type=Path),
              envvar="RELANN_INVENTORY", default=None,
              help="Inventory file (defaults to the packaged seed).")
@click.option("--alignment", "alignment_path", type=click.Path(path_type=Path),
              envvar="RELANN_ALIGNMENT", default=None,
              help="Sense alignment file (defaults to the packaged sample).")
@click.option("--corpus-dir", type=click.Path(path_type=Path),
              envvar="RELANN_CORPUS_DIR", default=None,
              help="Corpus directory (defaults to the packaged sample).")
@click.option("--store", "store_path", type=click.Path(path_type=Path),
              envvar="RELANN_STORE", default=None,
              help="Record store path (JSON lines log).")
@click.pass_context
def main(ctx: click.Context, inventory_path, alignment_path, corpus_dir, store_path) -> None:
    """Ontology-grounded semantic relation annotation toolkit."""
    try:
        cfg = config_from_env()
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    overrides = {}
    if inventory_path is not None:
        overrides["inventory_path"] = inventory_path
    if alignment_path is not None:
        overrides["alignment_path"] = alignment_path
    if corpus_dir is not None:
        overrides["corpus_dir"] = corpus_dir
    if store_path is not None:
        overrides["store_path"] = store_path
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    ctx.ensure_object(dict)
    ctx.obj["config"] = cfg


@main.command()
@click.pass_context
def ingest(ctx: click.Context) -> None:
    """Load the corpus and report per-source token counts."""
    cfg = _config(ctx)
    try:
        corpus, glossary = _load_corpus(cfg)
    except CorpusError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    stats = corpus_stats(corpus.sources.values())
    for source_id in sorted(stats.per_source):
        click.echo(f"{source_id}\t{stats.per_source[source_id]} tokens")
    click.echo(f"total\t{stats.total} tokens")
    click.echo(f"sentences\t{len(corpus.sentences)}")
    click.echo(f"glossary headwords\t{len(glossary)}")


@main.command()
@click.option("--seed", type=int, default=None, envvar="RELANN_SEED",
              help="Sampler seed (default from config).")
@click.option("--n", type=int, default=10, show_default=True,
              help="Number of first-term positions to draw.")
@click.pass_context
def sample(ctx: click.Context, seed: int | None, n: int) -> None:
    """Draw first-term candidates from glossary-listed tokens."""
    cfg = _config(ctx)
    if n < 0:
        raise click.UsageError("--n must be non-negative")
    effective_seed = seed if seed is not None else cfg.default_seed
    try:
        corpus, glossary = _load_corpus(cfg)
        picks = sample_first_terms(corpus.sentences.values(), glossary, effective_seed, n)
    except CorpusError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    for pick in picks:
        token = corpus.sentences[pick.sentence].tokens[pick.first_term]
        click.echo(f"{pick.sentence}\t{pick.first_term}\t{token.surface}")


@main.command()
@click.pass_context
def validate(ctx: click.Context) -> None:
    """Lint the inventory, the alignment table, and the stored dataset."""
    cfg = _config(ctx)
    problems = 0

    if cfg.inventory_path is not None:
        document = Path(cfg.inventory_path).read_text("utf-8")
    else:
        from importlib.resources import files
        document = files("relann").joinpath("data/inventory.yaml").read_text("utf-8")
    try:
        inv = parse_inventory(document)
    except InventoryError as exc:
        click.echo(f"inventory: {exc}", err=True)
        sys.exit(1)
    for violation in validate_inventory(inv):
        click.echo(f"inventory {violation}")
        problems += 1

    try:
        if cfg.alignment_path is not None:
            load_alignment_path(cfg.alignment_path, inv)
        else:
            load_sample_alignment(inv)
    except (AlignmentError, UnknownIdError) as exc:
        # UnknownIdError covers alignment entries whose class is missing
        # from the inventory under lint.
        click.echo(f"alignment: {exc}")
        problems += 1

    try:
        records = _store_records(cfg)
    except CorruptLogError as exc:
        click.echo(f"store: {exc}")
        problems += 1
        records = []
    for record in records:
        for violation in validate_record(record, inv):
            click.echo(f"record {record.id} {violation}")
            problems += 1

    if problems:
        click.echo(f"{problems} violation(s)")
        sys.exit(1)
    click.echo("ok")


@main.command()
@click.option("--table1", "report", flag_value="table1",
              help="Classification summary (counts, percentages, origin splits).")
@click.option("--frequencies", "report", flag_value="frequencies",
              help="Relation usage within a scope.")
@click.option("--chain-length", "report", flag_value="chain-length",
              help="Average links per composite record.")
@click.option("--relatedness", "report", flag_value="relatedness",
              help="Mean relatedness per relation and per outcome.")
@click.option("--scope", type=click.Choice([s.value for s in FrequencyScope]),
              default="direct", show_default=True,
              help="Scope for --frequencies.")
@click.option("--origin", type=click.Choice([o.value for o in Origin]), default=None,
              help="Restrict --frequencies to one relation origin.")
@click.option("--fold/--no-fold", default=False,
              help="Merge each relation with its inverse in --frequencies.")
@click.option("--records", "records_path", type=click.Path(exists=True, path_type=Path),
              default=None, help="Read records from a JSON-lines file instead of the store.")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@click.pass_context
def stats(ctx: click.Context, report, scope, origin, fold, records_path, as_json) -> None:
    """Aggregate reports over the dataset."""
    if report is None:
        raise click.UsageError(
            "pick a report: --table1, --frequencies, --chain-length, or --relatedness")
    cfg = _config(ctx)
    inv = _load_inventory(cfg)
    records = (
        load_records_jsonl(records_path) if records_path is not None
        else _store_records(cfg))

    if report == "table1":
        summary = summarize(records, inv)
        click.echo(json.dumps(summary_to_dict(summary), indent=2) if as_json
                   else render_summary(summary))
    elif report == "frequencies":
        freq = relation_frequencies(
            records, scope, inv,
            origin=Origin(origin) if origin else None,
            fold_directions=fold)
        click.echo(json.dumps(frequencies_to_dict(freq), indent=2) if as_json
                   else render_frequencies(freq))
    elif report == "chain-length":
        try:
            value = avg_chain_length(records)
        except NoCompositeRecordsError:
            click.echo("no composite records", err=True)
            sys.exit(1)
        click.echo(json.dumps({"average": float(value)}) if as_json
                   else render_chain_length(value))
    else:
        rel = relatedness_report(records)
        click.echo(json.dumps(relatedness_to_dict(rel), indent=2) if as_json
                   else render_relatedness(rel))


@main.command()
@click.option("--host", default=None, envvar="RELANN_HOST", help="Bind address.")
@click.option("--port", type=int, default=None, envvar="RELANN_PORT", help="Bind port.")
@click.pass_context
def serve(ctx: click.Context, host: str | None, port: int | None) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    cfg = _config(ctx)
    if host is not None or port is not None:
        from dataclasses import replace
        cfg = replace(cfg, host=host or cfg.host, port=port or cfg.port)
    try:
        app = create_app(cfg)
    except (ConfigError, InventoryError, AlignmentError, CorpusError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except CorruptLogError as exc:
        click.echo(f"store is corrupt: {exc}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")


@main.command()
@click.option("--output", type=click.Path(path_type=Path), default=None,
              help="Write to a file instead of stdout.")
@click.pass_context
def export(ctx: click.Context, output: Path | None) -> None:
    """Emit the full dataset as one JSON document."""
    cfg = _config(ctx)
    inv = _load_inventory(cfg)
    try:
        records = _store_records(cfg)
    except CorruptLogError as exc:
        click.echo(f"store is corrupt: {exc}", err=True)
        sys.exit(1)
    doc = export_dataset(records, inv.version)
    text = json.dumps(doc, indent=2, sort_keys=True)
    if output is None:
        click.echo(text)
    else:
        output.write_text(text + "\n", "utf-8")
        click.echo(f"wrote {doc['record_count']} records to {output}")


if __name__ == "__main__":
    main()
