import sys
from pathlib import Path

# make the shared oracle module importable from any test
sys.path.insert(0, str(Path(__file__).parent))
