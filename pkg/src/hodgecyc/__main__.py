from hodgecyc.cli import entry

entry()
