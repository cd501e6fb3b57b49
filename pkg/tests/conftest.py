import sys
from pathlib import Path

# Make the shared helpers importable regardless of invocation directory.
sys.path.insert(0, str(Path(__file__).parent))
