import click

from primindex import __version__
from primindex.commands.bounds import bounds_cmd
from primindex.commands.construct import construct_cmd
from primindex.commands.enumerate import enumerate_cmd
from primindex.commands.index import index_cmd
from primindex.commands.schema import schema_cmd
from primindex.commands.verify import verify_cmd
from primindex.logger import setup_logging


@click.group()
@click.version_option(__version__, prog_name="primindex")
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING... (default: LOG_LEVEL or INFO).")
def cli(log_level):
    """Primitivity and simplicity indices of words in free groups."""
    setup_logging(log_level)


cli.add_command(index_cmd)
cli.add_command(verify_cmd)
cli.add_command(enumerate_cmd)
cli.add_command(bounds_cmd)
cli.add_command(construct_cmd)
cli.add_command(schema_cmd)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
