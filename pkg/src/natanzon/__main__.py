from natanzon.pipeline.cli import run

run()
