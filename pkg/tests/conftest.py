import sys
from pathlib import Path

# Make the shared brute-force oracles importable as `import oracles`.
sys.path.insert(0, str(Path(__file__).parent))
