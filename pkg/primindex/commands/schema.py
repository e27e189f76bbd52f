# primindex/commands/schema.py

import click

from primindex.services.export import certificate_schema, to_json


@click.command("schema")
def schema_cmd():
    """Print the JSON Schema of the index certificate."""
    click.echo(to_json(certificate_schema()))
