# /thetaflex/conftest.py
# Katalog główny na sys.path, żeby `modules` był importowalny w testach.

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
