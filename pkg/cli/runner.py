"""
Programmatic entry point mirroring ``python manage.py stego ...``.

Exit status: 0 on success, 1 on steganographic failures (nothing found,
too little capacity, bad checksum), 2 on usage or input errors.
"""
import sys

from django.core.management.base import CommandError

from cli.management.commands.stego import Command

PROG = 'manage.py'


def run(argv, stdout=None, stderr=None):
    stderr = stderr or sys.stderr
    command = Command(stdout=stdout or sys.stdout, stderr=stderr)
    try:
        command.run_from_argv([PROG, 'stego', *argv])
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except CommandError as exc:
        # argument errors raised while parsing, outside the command's own handling
        stderr.write(f'{exc}\n')
        return 2
    return 0
