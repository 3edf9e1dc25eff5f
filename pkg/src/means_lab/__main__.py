from means_lab.cli import run

run()
