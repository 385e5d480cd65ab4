import sys
from pathlib import Path

# reuse the core suite's test-only image writers
sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))
