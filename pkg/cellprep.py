#!/usr/bin/env python3
"""cellprep: cells, preparation and integration over Q_p from the command line.

    python cellprep.py zeta --prime 5 "t"
    python cellprep.py decompose --prime 5 "!pow(2,t)" --format json
    echo "(t)*(t-1)" | python cellprep.py prepare --prime 3 -
"""

import logging
import sys

from cli.commands import CommandProcessor
from config import LOG_LEVEL


def main(argv=None) -> int:
    """Main entry point"""
    logging.basicConfig(
        level=LOG_LEVEL,
        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    results = CommandProcessor(sys.argv[1:] if argv is None else argv).run()

    if results['success']:
        print(results['output'])
    else:
        print(f"❌ Error: {results['error']}", file=sys.stderr)
    return results['exit_code']


if __name__ == "__main__":
    sys.exit(main())
