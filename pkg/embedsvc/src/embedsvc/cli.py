"""embedsvc command line: export an embedding store or serve the protocols."""

from __future__ import annotations

import sys

import click

from .encoder import EncoderError, get_encoder
from .store import StoreError, export_store, load_sentence_file


@click.group()
def cli():
    pass


@cli.command()
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sentences JSONL holding the cwe:* entries.")
@click.option("--cve-file", "cve_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sentences JSONL holding the cve:* entries.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--model", "spec", default="hash:256",
              help="Encoder spec: hash:<dim> or st:<name-or-path>.")
@click.option("--normalize/--no-normalize", default=True)
def export(catalog_path, cve_path, out, spec, normalize):
    """Encode pre-segmented sentences into an embedding-store JSONL.

    Inputs come from the ranking toolkit's `preprocess --sentences-out`
    (a combined file works through either option).
    """
    if not catalog_path and not cve_path:
        raise StoreError("pass --catalog and/or --cve-file")
    sentences = {}
    for path in (catalog_path, cve_path):
        if path:
            for key, sents in load_sentence_file(path).items():
                if key in sentences and sentences[key] != sents:
                    raise StoreError(f"conflicting sentences for {key!r}")
                sentences[key] = sents
    encoder = get_encoder(spec)
    lines = export_store(encoder, sentences, out, normalize=normalize)
    click.echo(f"wrote {lines} vectors (dim {encoder.dim}, {encoder.name}) to {out}")


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8100)
@click.option("--model", "spec", default="hash:256")
def serve(host, port, spec):
    """Serve POST /embed and POST /score_batch."""
    import uvicorn

    from .service import create_app

    app = create_app(get_encoder(spec))
    uvicorn.run(app, host=host, port=port, log_level="warning")


def main():
    try:
        cli(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(1)
    except (EncoderError, StoreError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
