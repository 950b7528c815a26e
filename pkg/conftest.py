import sys
from pathlib import Path

# Permite importar conditional_parity sem instalação
sys.path.insert(0, str(Path(__file__).resolve().parent))
