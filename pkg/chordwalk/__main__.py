import sys

from chordwalk.main import main

sys.exit(main())
