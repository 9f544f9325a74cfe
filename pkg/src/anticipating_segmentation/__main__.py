import sys

from anticipating_segmentation.cli import main

sys.exit(main())
